"""Symmetric logarithmic derivatives and quantum Fisher information.

Implements the four QFI forms used for inverse-temperature estimation: the
thermal-state variance formula, the diagonal-state sum, the general
eigenbasis Lyapunov solver with the coherence decomposition
F = F_d + Tr[rho Ltilde^2], and the analytic qubit expressions built on the
closed-form beta-derivatives of the evolved state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import DensityMatrix, QubitInit, as_state, qubit_state
from .errors import DomainError, ModelIntegrityError
from .spectrum import Bath, Spectrum, _readonly, thermal_distribution

# Eigenvalue pairs of rho with p_m + p_n at or below this guard are outside
# the numerical support and contribute zero to the SLD.
EPS_GUARD = 1e-12

FD_STEP_MIN = 1e-8
FD_STEP_MAX = 1e-3


@dataclass(frozen=True)
class _QubitModel:
    """Scalar ingredients of the closed-form qubit solution at fixed (beta, gamma)."""

    omega: float
    gamma: float
    a: float
    r: float
    pi2: float
    lam: float      # relaxation eigenvalue gamma/(pi2 - pi1) < 0
    dpi2: float     # d pi2 / d beta = -(1 - pi2) pi2 omega < 0
    rho12_0: complex


def _qubit_model(init: QubitInit, spectrum: Spectrum, bath: Bath) -> _QubitModel:
    if spectrum.n_levels != 2:
        raise DomainError("closed-form qubit machinery requires a two-level spectrum")
    omega = spectrum.gap(1, 2)
    pi2 = float(thermal_distribution(spectrum, bath.beta).pi[1])
    lam = bath.gamma / (2.0 * pi2 - 1.0)
    dpi2 = -(1.0 - pi2) * pi2 * omega
    return _QubitModel(
        omega=omega,
        gamma=bath.gamma,
        a=init.a,
        r=init.r,
        pi2=pi2,
        lam=lam,
        dpi2=dpi2,
        rho12_0=init.rho12_0,
    )


def _populations2(m: _QubitModel, t):
    return m.pi2 - np.exp(m.lam * t) * (m.pi2 - m.a)


def _delta(m: _QubitModel, t):
    """Relaxation weight of the population derivative: d p2/d beta = dpi2 * delta.

    delta = 1 - e^{lam t} + (2/gamma) t lam^2 e^{lam t} (pi2 - a); the 1/gamma
    comes from d lam/d beta = -(2 lam^2/gamma) dpi2 and makes the trace a
    function of gamma*t only.
    """
    return -np.expm1(m.lam * t) + (2.0 / m.gamma) * m.lam**2 * t * np.exp(m.lam * t) * (m.pi2 - m.a)


def _alpha(m: _QubitModel, t):
    """Coherence log-derivative: d rho12/d beta = alpha * rho12(t)."""
    return -(m.lam**2) * t / m.gamma * m.dpi2


def _coherence(m: _QubitModel, t):
    return m.rho12_0 * np.exp(m.lam * t / 2.0) * np.exp(1j * m.omega * t)


@dataclass(frozen=True)
class DerivativeBundle:
    """Partial beta-derivative of the evolved state at fixed initial state."""

    d_populations: np.ndarray
    d_coherence: complex
    alpha: float
    delta: float

    def __post_init__(self) -> None:
        dp = np.asarray(self.d_populations, dtype=float)
        if not np.all(np.isfinite(dp)):
            raise DomainError("population derivative must be finite")
        scale = 1.0 + float(np.max(np.abs(dp))) if dp.size else 1.0
        if abs(math.fsum(dp)) > 1e-12 * scale:
            raise DomainError("population derivative components must sum to zero")
        object.__setattr__(self, "d_populations", _readonly(dp))


@dataclass(frozen=True)
class SldMatrix:
    """Hermitian solution L of the Lyapunov equation d rho = (L rho + rho L)/2."""

    elements: np.ndarray
    residual: float
    from_fallback: bool = False

    def __post_init__(self) -> None:
        m = np.asarray(self.elements, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("SLD must be a square matrix")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > 1e-12 * scale:
            raise DomainError("SLD must be Hermitian")
        object.__setattr__(self, "elements", _readonly(m))

    @property
    def l11(self) -> float:
        return float(self.elements[0, 0].real)

    @property
    def l22(self) -> float:
        return float(self.elements[1, 1].real)

    @property
    def l12(self) -> complex:
        return complex(self.elements[0, 1])


@dataclass(frozen=True)
class QfiResult:
    """QFI split into its diagonal part and the coherence gain, with the SLD used."""

    total: float
    diagonal_part: float
    coherence_gain: float
    sld: SldMatrix
    pure_state: bool = False

    def __post_init__(self) -> None:
        for name in ("total", "diagonal_part", "coherence_gain"):
            if getattr(self, name) < -1e-12:
                raise ModelIntegrityError(f"{name} must be nonnegative (within -1e-12)")
        mismatch = abs(self.total - (self.diagonal_part + self.coherence_gain))
        if mismatch > 1e-9 * max(abs(self.total), 1e-12):
            raise ModelIntegrityError("QFI parts do not sum to the total")


def beta_derivative_qubit(
    init: QubitInit, spectrum: Spectrum, bath: Bath, t: float
) -> DerivativeBundle:
    """Closed-form partial derivative of the evolved qubit state w.r.t. beta.

    d p = dpi2 * delta * [-1, 1] with dpi2 = -(1-pi2) pi2 omega;
    d rho12 = alpha * rho12(t). Validated against central finite differences
    of the propagated state (see finite_difference_state_derivative).
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    m = _qubit_model(init, spectrum, bath)
    delta = float(_delta(m, t))
    alpha = float(_alpha(m, t))
    g = m.dpi2 * delta
    d_coherence = complex(alpha * _coherence(m, t))
    return DerivativeBundle(
        d_populations=np.array([-g, g]),
        d_coherence=d_coherence,
        alpha=alpha,
        delta=delta,
    )


def finite_difference_state_derivative(
    init: QubitInit, spectrum: Spectrum, bath: Bath, t: float, h: float = 1e-6
) -> DerivativeBundle:
    """Central-difference beta-derivative with the initial state held fixed.

    This is the partial derivative: (a, r, phi) do not move with beta, so at a
    thermal initial population a = pi2(beta) it reproduces (1 - e^{lam t}) dpi,
    not the total derivative dpi.
    """
    if not (FD_STEP_MIN <= h <= FD_STEP_MAX):
        raise DomainError(f"h must lie in [{FD_STEP_MIN:g}, {FD_STEP_MAX:g}]")
    if t < 0:
        raise DomainError("t must be nonnegative")
    up = _qubit_model(init, spectrum, Bath(beta=bath.beta + h, gamma=bath.gamma))
    dn = _qubit_model(init, spectrum, Bath(beta=bath.beta - h, gamma=bath.gamma))
    # p1 = 1 - p2 identically, so difference p2 once; forming 1-p2 on each
    # side separately would leak rounding of size eps/(2h) into the sum.
    dp2 = float((_populations2(up, t) - _populations2(dn, t)) / (2.0 * h))
    d_coherence = complex((_coherence(up, t) - _coherence(dn, t)) / (2.0 * h))
    alpha = float(t / 2.0 * (up.lam - dn.lam) / (2.0 * h))
    dpi2 = (up.pi2 - dn.pi2) / (2.0 * h)
    delta = dp2 / dpi2
    return DerivativeBundle(
        d_populations=np.array([-dp2, dp2]),
        d_coherence=d_coherence,
        alpha=alpha,
        delta=delta,
    )


def thermal_population_derivative(spectrum: Spectrum, beta_tilde: float) -> np.ndarray:
    """Total derivative of the Gibbs populations: d pi_j = (<H> - eps_j) pi_j."""
    pi = thermal_distribution(spectrum, beta_tilde).pi
    eps = np.asarray(spectrum.energies, dtype=float)
    mean = math.fsum(eps * pi)
    return (mean - eps) * pi


def thermal_qfi(spectrum: Spectrum, beta_tilde: float) -> float:
    """QFI of the thermal state itself: the energy variance.

    F = sum_j (<H> - eps_j)^2 pi_j; for a qubit this is omega12^2 pi2 (1-pi2).
    """
    pi = thermal_distribution(spectrum, beta_tilde).pi
    eps = np.asarray(spectrum.energies, dtype=float)
    mean = math.fsum(eps * pi)
    return math.fsum((mean - eps) ** 2 * pi)


def diagonal_qfi(p, dp) -> float:
    """Classical Fisher information of the populations: sum dp_k^2 / p_k.

    Components with p_k at or below the support guard contribute nothing
    unless dp_k is significant there, in which case the information diverges
    and math.inf is returned (flag, not an exception).
    """
    p = np.asarray(p, dtype=float)
    dp = np.asarray(dp, dtype=float)
    if p.shape != dp.shape or p.ndim != 1:
        raise DomainError("p and dp must be vectors of equal length")
    if np.any(p < -1e-12):
        raise DomainError("p must be nonnegative")
    if abs(math.fsum(p) - 1.0) > 1e-9:
        raise DomainError("p must sum to one")
    scale = 1.0 + float(np.max(np.abs(dp)))
    if abs(math.fsum(dp)) > 1e-8 * scale:
        raise DomainError("dp components must sum to zero")
    total = 0.0
    for pk, dpk in zip(p, dp):
        if pk > EPS_GUARD:
            total += dpk * dpk / pk
        elif abs(dpk) > EPS_GUARD:
            return math.inf
    return total


def _validate_drho(drho: np.ndarray) -> np.ndarray:
    d = np.asarray(drho, dtype=complex)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DomainError("drho must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(d)))) if d.size else 1.0
    if np.max(np.abs(d - d.conj().T)) > 1e-12 * scale:
        raise DomainError("drho must be Hermitian")
    if abs(np.trace(d)) > 1e-8 * scale:
        raise DomainError("drho must be traceless")
    return d


def sld_general(rho: DensityMatrix | np.ndarray, drho) -> SldMatrix:
    """Solve the Lyapunov equation in the eigenbasis of rho.

    L_mn = 2 (drho)_mn / (p_m + p_n) over eigenvalue pairs inside the support;
    pairs with p_m + p_n <= EPS_GUARD are zeroed (support convention). The
    returned matrix carries its Lyapunov residual, which must stay below
    1e-9 (1 + ||drho||_F).
    """
    state = as_state(rho)
    d = _validate_drho(drho)
    if d.shape != state.elements.shape:
        raise DomainError("drho must match the state dimension")
    values, vectors = np.linalg.eigh(state.elements)
    d_eig = vectors.conj().T @ d @ vectors
    pair_sums = values[:, None] + values[None, :]
    supported = pair_sums > EPS_GUARD
    l_eig = np.where(supported, 2.0 * d_eig / np.where(supported, pair_sums, 1.0), 0.0)
    l = vectors @ l_eig @ vectors.conj().T
    l = (l + l.conj().T) / 2.0
    residual = float(np.linalg.norm(d - (l @ state.elements + state.elements @ l) / 2.0))
    tol = 1e-9 * (1.0 + float(np.linalg.norm(d)))
    if residual > tol:
        raise ModelIntegrityError(
            f"Lyapunov residual {residual:.3e} exceeds {tol:.3e}; "
            "drho is not supported on the state"
        )
    return SldMatrix(elements=l, residual=residual)


def qubit_sld(init: QubitInit, spectrum: Spectrum, bath: Bath, t: float) -> SldMatrix:
    """Closed-form qubit SLD.

    With g = d rho22/d beta, m = |rho12|^2 and D = (1-rho22) rho22 - m:
      l11 = (2 g m - 2 alpha rho22 m - rho22 g)/D
      l22 = (-2 g m - 2 alpha (1-rho22) m + (1-rho22) g)/D
      l12 = (2 alpha (1-rho22) rho22 - (1-2 rho22) g)/D * rho12
    Falls back to the eigenbasis solver when D vanishes (pure state, t=0).
    """
    model = _qubit_model(init, spectrum, bath)
    if t < 0:
        raise DomainError("t must be nonnegative")
    p2 = float(_populations2(model, t))
    rho12 = complex(_coherence(model, t))
    mod2 = abs(rho12) ** 2
    delta = float(_delta(model, t))
    alpha = float(_alpha(model, t))
    g = model.dpi2 * delta
    d_mat = np.array(
        [[-g, alpha * rho12], [alpha * rho12.conjugate(), g]], dtype=complex
    )
    denom = (1.0 - p2) * p2 - mod2
    if abs(denom) < EPS_GUARD:
        result = sld_general(qubit_state(init, spectrum, bath, t), d_mat)
        return SldMatrix(
            elements=result.elements, residual=result.residual, from_fallback=True
        )
    l11 = (2.0 * g * mod2 - 2.0 * alpha * p2 * mod2 - p2 * g) / denom
    l22 = (-2.0 * g * mod2 - 2.0 * alpha * (1.0 - p2) * mod2 + (1.0 - p2) * g) / denom
    l12 = (2.0 * alpha * (1.0 - p2) * p2 - (1.0 - 2.0 * p2) * g) / denom * rho12
    l = np.array([[l11, l12], [l12.conjugate(), l22]], dtype=complex)
    rho = np.array([[1.0 - p2, rho12], [rho12.conjugate(), p2]], dtype=complex)
    residual = float(np.linalg.norm(d_mat - (l @ rho + rho @ l) / 2.0))
    tol = 1e-9 * (1.0 + float(np.linalg.norm(d_mat)))
    if residual > tol:
        raise ModelIntegrityError(f"qubit SLD residual {residual:.3e} exceeds {tol:.3e}")
    return SldMatrix(elements=l, residual=residual)


def qubit_qfi(init: QubitInit, spectrum: Spectrum, bath: Bath, t: float) -> QfiResult:
    """Analytic qubit QFI split into diagonal part and coherence gain.

    total = g^2/D + 4 m (alpha^2 (1-p2) p2 - alpha (1-2 p2) g - g^2)/D;
    diagonal_part = g^2/(p2 (1-p2)); the phase phi never enters (only |rho12|^2
    appears). At the pure-state point (t=0, r=1) D vanishes while the
    numerator vanishes faster; the continuous limit F=0 is returned flagged.
    """
    model = _qubit_model(init, spectrum, bath)
    if t < 0:
        raise DomainError("t must be nonnegative")
    p2 = float(_populations2(model, t))
    mod2 = abs(model.rho12_0) ** 2 * math.exp(model.lam * t)
    delta = float(_delta(model, t))
    alpha = float(_alpha(model, t))
    g = model.dpi2 * delta
    denom = (1.0 - p2) * p2 - mod2
    sld = qubit_sld(init, spectrum, bath, t)
    if denom <= EPS_GUARD:
        return QfiResult(
            total=0.0, diagonal_part=0.0, coherence_gain=0.0, sld=sld, pure_state=True
        )
    total = (
        g**2 / denom
        + 4.0
        * mod2
        * (alpha**2 * (1.0 - p2) * p2 - alpha * (1.0 - 2.0 * p2) * g - g**2)
        / denom
    )
    diagonal_part = g**2 / ((1.0 - p2) * p2)
    return QfiResult(
        total=total,
        diagonal_part=diagonal_part,
        coherence_gain=total - diagonal_part,
        sld=sld,
    )


def qfi_values(init: QubitInit, spectrum: Spectrum, bath: Bath, times) -> np.ndarray:
    """Vectorized qubit QFI over a time grid (totals only, no SLD assembly)."""
    model = _qubit_model(init, spectrum, bath)
    t = np.asarray(times, dtype=float)
    if np.any(t < 0):
        raise DomainError("times must be nonnegative")
    p2 = _populations2(model, t)
    mod2 = abs(model.rho12_0) ** 2 * np.exp(model.lam * t)
    alpha = _alpha(model, t)
    g = model.dpi2 * _delta(model, t)
    denom = (1.0 - p2) * p2 - mod2
    with np.errstate(divide="ignore", invalid="ignore"):
        total = (
            g**2 / denom
            + 4.0
            * mod2
            * (alpha**2 * (1.0 - p2) * p2 - alpha * (1.0 - 2.0 * p2) * g - g**2)
            / denom
        )
    return np.where(denom <= EPS_GUARD, 0.0, total)


def trace_arrays(init: QubitInit, spectrum: Spectrum, bath: Bath, times) -> dict:
    """All per-time trace quantities on a grid, keyed by output column name."""
    model = _qubit_model(init, spectrum, bath)
    t = np.asarray(times, dtype=float)
    values = qfi_values(init, spectrum, bath, t)
    asymptote = thermal_qfi(spectrum, bath.beta)
    delta = _delta(model, t)
    g = model.dpi2 * delta
    return {
        "t": t,
        "F": values,
        "F_norm": values / asymptote,
        "p2": _populations2(model, t),
        "abs_rho12": np.abs(model.rho12_0) * np.exp(model.lam * t / 2.0),
        "dbeta_p2": g,
        "alpha": _alpha(model, t),
        "delta": delta,
    }


def qfi_decomposition(rho: DensityMatrix | np.ndarray, drho) -> QfiResult:
    """Decompose the QFI of (rho, drho) into diagonal information plus gain.

    Solves the full Lyapunov problem for L, the diagonal problem for L_d,
    forms Ltilde = L - L_d, and checks F = F_d + Tr[rho Ltilde^2] to 1e-9
    relative. The gain is nonnegative: {rho, Ltilde} is hollow, so the cross
    terms of the expansion vanish.
    """
    state = as_state(rho)
    sld = sld_general(state, drho)
    d = np.asarray(drho, dtype=complex)
    p = state.populations
    dp = np.diag(d).real
    total = float(np.trace(d @ sld.elements).real)
    diagonal_part = diagonal_qfi(p, dp)
    l_d = np.where(p > EPS_GUARD, dp / np.where(p > EPS_GUARD, p, 1.0), 0.0)
    l_tilde = sld.elements - np.diag(l_d)
    gain = float(np.trace(state.elements @ l_tilde @ l_tilde).real)
    if gain < -1e-12:
        raise ModelIntegrityError(f"coherence gain {gain:.3e} is negative beyond tolerance")
    mismatch = abs(total - (diagonal_part + gain))
    if mismatch > 1e-9 * max(abs(total), 1e-12):
        raise ModelIntegrityError(
            f"decomposition identity violated: |F - (F_d + gain)| = {mismatch:.3e}"
        )
    return QfiResult(
        total=total, diagonal_part=diagonal_part, coherence_gain=gain, sld=sld
    )
