"""Time evolution of the probe state.

Populations relax under the classical generator A_beta (decoupled from the
coherences), each coherence decays exponentially at its own rate while
rotating at the transition frequency, and the qubit case has a closed form.
Includes the generalized-amplitude-damping (GAD) channel used as the
finite-temperature comparison model.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, ModelIntegrityError
from .spectrum import (
    Bath,
    RateMatrix,
    Spectrum,
    TransitionMatrix,
    _as_generator,
    _readonly,
    rate_matrix,
    thermal_distribution,
    transition_matrix,
)

# Eigenvector-matrix condition number beyond which the eigendecomposition
# propagator is abandoned for scaling-and-squaring.
EIG_CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class QubitInit:
    """Initial qubit state: excited population a, coherence fraction r, phase phi.

    The implied coherence is rho12(0) = sqrt((1-a)a) * r * exp(i*phi), so r=1
    saturates the purity bound. For a in {0, 1} the coherence is identically
    zero and r is normalized to 0 to avoid a spurious degree of freedom.
    """

    a: float
    r: float = 0.0
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.a <= 1.0):
            raise DomainError("a must lie in [0, 1]")
        if not (0.0 <= self.r <= 1.0):
            raise DomainError("r must lie in [0, 1]")
        if not (0.0 <= self.phi < 2.0 * math.pi):
            raise DomainError("phi must lie in [0, 2*pi)")
        if self.a in (0.0, 1.0) and self.r != 0.0:
            object.__setattr__(self, "r", 0.0)

    @property
    def theta(self) -> float:
        """Bloch polar angle theta = 2*arcsin(sqrt(a)), in [0, pi]."""
        return 2.0 * math.asin(math.sqrt(self.a))

    @property
    def rho12_0(self) -> complex:
        return math.sqrt((1.0 - self.a) * self.a) * self.r * cmath.exp(1j * self.phi)

    @classmethod
    def from_theta(cls, theta: float, r: float = 0.0, phi: float = 0.0) -> "QubitInit":
        if not (0.0 <= theta <= math.pi):
            raise DomainError("theta must lie in [0, pi]")
        return cls(a=math.sin(theta / 2.0) ** 2, r=r, phi=phi)


@dataclass(frozen=True)
class DensityMatrix:
    """N x N Hermitian, unit-trace, positive-semidefinite state."""

    elements: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.elements, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("state must be a square matrix")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise DomainError("state must be Hermitian within 1e-12")
        if abs(np.trace(m).real - 1.0) > 1e-12 or abs(np.trace(m).imag) > 1e-12:
            raise DomainError("state must have unit trace within 1e-12")
        if np.min(np.linalg.eigvalsh((m + m.conj().T) / 2.0)) < -1e-12:
            raise DomainError("state must be positive semidefinite within 1e-12")
        object.__setattr__(self, "elements", _readonly(m))

    @property
    def n_levels(self) -> int:
        return self.elements.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return np.diag(self.elements).real.copy()

    @property
    def diagonal_part(self) -> np.ndarray:
        """rho_d: the diagonal of the state as a full matrix."""
        return np.diag(np.diag(self.elements))

    @property
    def hollow_part(self) -> np.ndarray:
        """rho_coh: the state minus its diagonal (zero-diagonal remainder)."""
        return self.elements - self.diagonal_part

    @property
    def rho22(self) -> float:
        if self.n_levels != 2:
            raise DomainError("rho22 is defined for qubits only")
        return float(self.elements[1, 1].real)

    @property
    def rho12(self) -> complex:
        if self.n_levels != 2:
            raise DomainError("rho12 is defined for qubits only")
        return complex(self.elements[0, 1])

    @classmethod
    def from_populations(cls, p) -> "DensityMatrix":
        return cls(elements=np.diag(np.asarray(p, dtype=float)).astype(complex))

    @classmethod
    def from_qubit_init(cls, init: QubitInit) -> "DensityMatrix":
        c = init.rho12_0
        return cls(elements=np.array([[1.0 - init.a, c], [c.conjugate(), init.a]]))


def as_state(rho: DensityMatrix | np.ndarray) -> DensityMatrix:
    """Coerce an array-like to a validated DensityMatrix."""
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix(elements=np.asarray(rho, dtype=complex))


def propagation_method(a: TransitionMatrix | np.ndarray) -> str:
    """Which propagator branch applies to this generator: 'eig' or 'expm'.

    Valid generators are similar to symmetric matrices by detailed balance and
    always take the eigendecomposition branch; 'expm' covers near-defective
    input (eigenvector condition number beyond EIG_CONDITION_LIMIT).
    """
    mat = _as_generator(a)
    _, vectors = np.linalg.eig(mat)
    if np.linalg.cond(vectors) > EIG_CONDITION_LIMIT:
        return "expm"
    return "eig"


def propagate_populations(
    a: TransitionMatrix | np.ndarray, p0, t: float
) -> np.ndarray:
    """Populations exp(A t) p0 via eigendecomposition of the generator.

    Falls back to scaling-and-squaring when the eigenvector matrix is too
    ill-conditioned (see propagation_method). The result is clipped of
    negative rounding dust and renormalized to unit sum.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    mat = _as_generator(a)
    p0 = np.asarray(p0, dtype=float)
    if p0.ndim != 1 or p0.size != mat.shape[0]:
        raise DomainError("p0 must be a vector matching the generator size")
    if np.any(p0 < -1e-12) or abs(math.fsum(p0) - 1.0) > 1e-9:
        raise DomainError("p0 must be a probability vector")
    if t == 0.0:
        return p0.copy()
    values, vectors = np.linalg.eig(mat)
    if np.linalg.cond(vectors) > EIG_CONDITION_LIMIT:
        p = expm(mat * t) @ p0
    else:
        p = (vectors @ (np.exp(values * t) * np.linalg.solve(vectors, p0.astype(complex)))).real
    if np.min(p) < -1e-10:
        raise ModelIntegrityError(f"propagated populations went negative: min {np.min(p):.3e}")
    p = np.clip(p, 0.0, None)
    return p / math.fsum(p)


def coherence_decay_rate(rates: RateMatrix, i: int, j: int) -> float:
    """Decay rate c_ij = (sum_k Gamma_ki + sum_k Gamma_kj)/2 of coherence rho_ij.

    Indices are 1-based level labels; symmetric in (i, j); for the qubit,
    c_12 = (Gamma_12 + Gamma_21)/2 = -lambda/2.
    """
    n = rates.n_levels
    if i == j:
        raise DomainError("coherence indices must differ")
    if not (1 <= i <= n and 1 <= j <= n):
        raise DomainError("coherence indices out of range")
    g = rates.gamma_rates
    return 0.5 * (math.fsum(g[:, i - 1]) + math.fsum(g[:, j - 1]))


def propagate_coherence(c: float, omega: float, rho12_0: complex, t: float) -> complex:
    """Coherence after time t: modulus shrinks by e^{-ct}, phase advances by omega*t."""
    if not c > 0:
        raise DomainError("coherence decay rate must be positive")
    if t < 0:
        raise DomainError("t must be nonnegative")
    return rho12_0 * math.exp(-c * t) * cmath.exp(1j * omega * t)


def qubit_relaxation_rate(spectrum: Spectrum, bath: Bath) -> float:
    """The single decaying eigenvalue lambda = gamma/(pi_2 - pi_1) < 0 of the qubit generator."""
    if spectrum.n_levels != 2:
        raise DomainError("relaxation rate closed form requires a two-level spectrum")
    pi = thermal_distribution(spectrum, bath.beta).pi
    return bath.gamma / (pi[1] - pi[0])


def qubit_state(init: QubitInit, spectrum: Spectrum, bath: Bath, t: float) -> DensityMatrix:
    """Closed-form evolved qubit state.

    Populations relax toward the thermal pair at rate |lambda|; the coherence
    decays at |lambda|/2 while rotating at the gap frequency.
    """
    if spectrum.n_levels != 2:
        raise DomainError("qubit_state requires a two-level spectrum")
    if t < 0:
        raise DomainError("t must be nonnegative")
    pi2 = float(thermal_distribution(spectrum, bath.beta).pi[1])
    lam = bath.gamma / (2.0 * pi2 - 1.0)
    decay = math.exp(lam * t)
    p2 = pi2 - decay * (pi2 - init.a)
    rho12 = init.rho12_0 * math.exp(lam * t / 2.0) * cmath.exp(1j * spectrum.gap(1, 2) * t)
    return DensityMatrix(
        elements=np.array([[1.0 - p2, rho12], [rho12.conjugate(), p2]])
    )


def evolve_state(rho0: DensityMatrix | np.ndarray, spectrum: Spectrum, bath: Bath, t: float) -> DensityMatrix:
    """Evolve an N-level state: populations through the generator, coherences pairwise."""
    state = as_state(rho0)
    n = state.n_levels
    if n != spectrum.n_levels:
        raise DomainError("state size must match the spectrum")
    rates = rate_matrix(spectrum, bath)
    generator = transition_matrix(rates)
    p = propagate_populations(generator, state.populations, t)
    out = np.diag(p).astype(complex)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            c = coherence_decay_rate(rates, i, j)
            rho_ij = propagate_coherence(c, spectrum.gap(i, j), complex(state.elements[i - 1, j - 1]), t)
            out[i - 1, j - 1] = rho_ij
            out[j - 1, i - 1] = rho_ij.conjugate()
    return DensityMatrix(elements=out)


@dataclass(frozen=True)
class GadChannel:
    """Generalized amplitude damping with mixing weight p1 and transfer p2.

    p2 is tied to the dimensionless duration by p2 = 1 - exp(-(1+n12)*tau_tilde);
    the occupation number n12 is kept so the tie stays checkable.
    """

    p1: float
    p2: float
    tau_tilde: float
    n12: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise DomainError("channel probabilities must lie in [0, 1]")
        if self.tau_tilde < 0:
            raise DomainError("tau_tilde must be nonnegative")
        expected_p2 = -math.expm1(-(1.0 + self.n12) * self.tau_tilde)
        if abs(self.p2 - expected_p2) > 1e-12:
            raise DomainError("p2 is not consistent with (n12, tau_tilde)")


def gad_params(n12: float, tau_tilde: float) -> GadChannel:
    """Channel parameters from the occupation number and dimensionless duration.

    Implements p1 = n12/(2*n12 - 1) verbatim; that weight leaves [0, 1] for
    n12 < 1, which is outside the parameterization's regime of use.
    """
    if not n12 >= 1.0:
        raise DomainError("n12 must be at least 1 for the channel parameterization")
    if tau_tilde < 0:
        raise DomainError("tau_tilde must be nonnegative")
    p1 = n12 / (2.0 * n12 - 1.0)
    p2 = -math.expm1(-(1.0 + n12) * tau_tilde)
    return GadChannel(p1=p1, p2=p2, tau_tilde=tau_tilde, n12=n12)


def gad_kraus_operators(ch: GadChannel) -> list[np.ndarray]:
    """The four Kraus operators; completeness sum(K^dag K) = 1 is asserted."""
    s1 = math.sqrt(ch.p1)
    s1c = math.sqrt(1.0 - ch.p1)
    s2 = math.sqrt(ch.p2)
    s2c = math.sqrt(1.0 - ch.p2)
    kraus = [
        s1 * np.array([[1.0, 0.0], [0.0, s2c]], dtype=complex),
        s1 * np.array([[0.0, s2], [0.0, 0.0]], dtype=complex),
        s1c * np.array([[s2c, 0.0], [0.0, 1.0]], dtype=complex),
        s1c * np.array([[0.0, 0.0], [s2, 0.0]], dtype=complex),
    ]
    completeness = sum(k.conj().T @ k for k in kraus)
    if np.max(np.abs(completeness - np.eye(2))) > 1e-12:
        raise ModelIntegrityError("Kraus completeness sum(K^dag K) = 1 violated")
    return kraus


def gad_apply(ch: GadChannel, rho: DensityMatrix | np.ndarray) -> DensityMatrix:
    """Apply the channel: rho' = sum_k K_k rho K_k^dag."""
    state = as_state(rho)
    if state.n_levels != 2:
        raise DomainError("the damping channel acts on qubits")
    out = np.zeros((2, 2), dtype=complex)
    for k in gad_kraus_operators(ch):
        out += k @ state.elements @ k.conj().T
    out = (out + out.conj().T) / 2.0
    return DensityMatrix(elements=out)


def gad_fixed_point(ch: GadChannel) -> np.ndarray:
    """The channel's stationary state diag(p1, 1-p1), invariant for any p2."""
    return np.diag([ch.p1, 1.0 - ch.p1]).astype(complex)


def beta_from_thermal_ratio(n12: float, omega12: float) -> float:
    """Invert the Bose occupation at gap omega12: beta = ln(1 + 1/n12)/omega12."""
    if not n12 > 0:
        raise DomainError("n12 must be positive")
    if not omega12 > 0:
        raise DomainError("omega12 must be positive")
    return math.log1p(1.0 / n12) / omega12


def gamma_from_tau_tilde(tau_tilde: float, omega12: float) -> float:
    """Dimensional coupling rate gamma = tau_tilde * omega12 / 2."""
    if not tau_tilde > 0:
        raise DomainError("tau_tilde must be positive")
    if not omega12 > 0:
        raise DomainError("omega12 must be positive")
    return tau_tilde * omega12 / 2.0


def gad_master_comparison(
    n12: float, tau_tilde: float, omega12: float, a0: float = 0.0
) -> dict:
    """Populations after the channel vs the relaxation model at matched exponent.

    The channel at duration tau_tilde has relaxation exponent (1+n12)*tau_tilde;
    the matched master-equation time solves |lambda| t = (1+n12)*tau_tilde under
    the mapping gamma = tau_tilde*omega12/2. Returns both excited populations
    and their relative difference, starting from populations (1-a0, a0).
    """
    ch = gad_params(n12, tau_tilde)
    rho0 = DensityMatrix.from_populations([1.0 - a0, a0])
    p2_gad = gad_apply(ch, rho0).rho22

    beta = beta_from_thermal_ratio(n12, omega12)
    gamma = gamma_from_tau_tilde(tau_tilde, omega12) if tau_tilde > 0 else None
    if gamma is None:
        p2_master = a0
        t_compare = 0.0
        lam = 0.0
    else:
        spectrum = Spectrum.qubit(omega12)
        bath = Bath(beta=beta, gamma=gamma)
        pi2 = float(thermal_distribution(spectrum, beta).pi[1])
        lam = gamma / (2.0 * pi2 - 1.0)
        t_compare = (1.0 + n12) * tau_tilde / abs(lam)
        p2_master = pi2 - math.exp(lam * t_compare) * (pi2 - a0)
    rel_diff = abs(p2_gad - p2_master) / max(abs(p2_master), 1e-300)
    return {
        "n12": n12,
        "tau_tilde": tau_tilde,
        "omega12": omega12,
        "a0": a0,
        "beta": beta,
        "gamma": gamma if gamma is not None else 0.0,
        "lambda": lam,
        "t_compare": t_compare,
        "p2_gad": p2_gad,
        "p2_master": p2_master,
        "rel_diff": rel_diff,
    }


def gad_stationary_diagnostic(n12: float) -> dict:
    """Expose the gap between the channel's fixed point and the thermal state.

    The channel parameterization p1 = n12/(2*n12 - 1) differs from the Gibbs
    ground population (n12+1)/(2*n12+1); both approach 1/2 for large n12. This
    reports both, without deciding which was intended.
    """
    ch = gad_params(n12, 0.0)
    ground_thermal = (n12 + 1.0) / (2.0 * n12 + 1.0)
    excited_thermal = n12 / (2.0 * n12 + 1.0)
    excited_fixed = 1.0 - ch.p1
    return {
        "n12": n12,
        "ground_fixed_point": ch.p1,
        "ground_thermal": ground_thermal,
        "excited_fixed_point": excited_fixed,
        "excited_thermal": excited_thermal,
        "excited_rel_gap": abs(excited_fixed - excited_thermal) / excited_thermal,
    }
