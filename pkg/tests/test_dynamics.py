"""State preparation, propagation, and the generalized amplitude-damping channel."""

import cmath
import math

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import random_nlevel_model, random_scenario, random_time
from thermoqfi import (
    Bath,
    DensityMatrix,
    DomainError,
    QubitInit,
    Spectrum,
    beta_from_thermal_ratio,
    coherence_decay_rate,
    evolve_state,
    gad_apply,
    gad_fixed_point,
    gad_kraus_operators,
    gad_master_comparison,
    gad_params,
    gad_stationary_diagnostic,
    gamma_from_tau_tilde,
    propagate_coherence,
    propagate_populations,
    propagation_method,
    qubit_relaxation_rate,
    qubit_state,
    rate_matrix,
    thermal_distribution,
    thermal_ratio,
    transition_matrix,
)


def _reference_parts():
    spectrum = Spectrum.qubit(1.0)
    bath = Bath(beta=math.log(3.0), gamma=1.0)
    return spectrum, bath


class TestQubitInit:
    def test_theta_round_trip(self):
        init = QubitInit.from_theta(2.0 * math.pi / 3.0, r=0.5)
        assert init.a == pytest.approx(0.75, rel=1e-15)
        assert init.theta == pytest.approx(2.0 * math.pi / 3.0, rel=1e-12)

    def test_coherence_amplitude(self):
        init = QubitInit(a=0.1, r=1.0, phi=0.25)
        assert abs(init.rho12_0) == pytest.approx(0.3, rel=1e-15)
        assert cmath.phase(init.rho12_0) == pytest.approx(0.25, rel=1e-12)

    def test_r_is_normalized_on_population_extremes(self):
        assert QubitInit(a=0.0, r=1.0).r == 0.0
        assert QubitInit(a=1.0, r=0.7).r == 0.0
        assert QubitInit(a=0.0, r=1.0).rho12_0 == 0

    def test_domain(self):
        with pytest.raises(DomainError):
            QubitInit(a=1.2)
        with pytest.raises(DomainError):
            QubitInit(a=0.5, r=-0.1)
        with pytest.raises(DomainError):
            QubitInit(a=0.5, phi=7.0)
        with pytest.raises(DomainError):
            QubitInit.from_theta(-0.1)


class TestDensityMatrix:
    def test_from_qubit_init(self):
        rho = DensityMatrix.from_qubit_init(QubitInit(a=0.25, r=1.0))
        assert rho.rho22 == pytest.approx(0.25)
        assert rho.rho12 == pytest.approx(math.sqrt(0.75 * 0.25))

    def test_rejects_invalid_states(self):
        with pytest.raises(DomainError):
            DensityMatrix(elements=np.array([[0.5, 0.5], [0.1, 0.5]]))  # not Hermitian
        with pytest.raises(DomainError):
            DensityMatrix(elements=np.array([[0.6, 0.0], [0.0, 0.6]]))  # trace
        with pytest.raises(DomainError):
            DensityMatrix(elements=np.array([[1.2, 0.0], [0.0, -0.2]]))  # not PSD
        with pytest.raises(DomainError):
            DensityMatrix(elements=np.array([[0.5, 0.6], [0.6, 0.5]]))  # not PSD

    def test_diagonal_and_hollow_split(self):
        rho = DensityMatrix.from_qubit_init(QubitInit(a=0.25, r=0.8, phi=1.0))
        np.testing.assert_allclose(
            rho.diagonal_part + rho.hollow_part, rho.elements, atol=1e-16
        )
        assert np.all(np.diag(rho.hollow_part) == 0)


class TestPropagatePopulations:
    def test_matches_qubit_closed_form(self):
        spectrum, bath = _reference_parts()
        a = transition_matrix(rate_matrix(spectrum, bath))
        for a0 in (0.0, 0.3, 0.9):
            for t in (0.0, 0.4, 2.0):
                p = propagate_populations(a, np.array([1.0 - a0, a0]), t)
                expected = 0.25 - math.exp(-2.0 * t) * (0.25 - a0)
                assert p[1] == pytest.approx(expected, abs=1e-14)

    def test_matches_matrix_exponential(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            spectrum, bath = random_nlevel_model(rng)
            a = transition_matrix(rate_matrix(spectrum, bath))
            n = spectrum.n_levels
            p0 = rng.uniform(0.1, 1.0, size=n)
            p0 /= p0.sum()
            t = float(rng.uniform(0.0, 3.0))
            expected = expm(a.a * t) @ p0
            np.testing.assert_allclose(
                propagate_populations(a, p0, t), expected, rtol=0, atol=1e-12
            )

    def test_conserves_probability_and_reaches_gibbs(self):
        rng = np.random.default_rng(31)
        spectrum, bath = random_nlevel_model(rng, n_max=6)
        a = transition_matrix(rate_matrix(spectrum, bath))
        n = spectrum.n_levels
        p0 = np.zeros(n)
        p0[-1] = 1.0
        p = propagate_populations(a, p0, 80.0)
        assert math.fsum(p) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(
            p, thermal_distribution(spectrum, bath.beta).pi, rtol=0, atol=1e-10
        )

    def test_expm_fallback_on_defective_cascade(self):
        # The equal-rate decay chain 3 -> 2 -> 1 is the textbook defective
        # generator: its secular t*exp(-t) term has no eigendecomposition, so
        # the propagator must switch to the matrix exponential.
        a = np.array([[0.0, 1.0, 0.0], [0.0, -1.0, 1.0], [0.0, 0.0, -1.0]])
        assert propagation_method(a) == "expm"
        t = 2.0
        p = propagate_populations(a, np.array([0.0, 0.0, 1.0]), t)
        expected = np.array(
            [
                1.0 - math.exp(-t) - t * math.exp(-t),
                t * math.exp(-t),
                math.exp(-t),
            ]
        )
        np.testing.assert_allclose(p, expected, rtol=0, atol=1e-12)

    def test_eig_method_on_regular_models(self):
        spectrum, bath = _reference_parts()
        a = transition_matrix(rate_matrix(spectrum, bath))
        assert propagation_method(a) == "eig"

    def test_domain(self):
        spectrum, bath = _reference_parts()
        a = transition_matrix(rate_matrix(spectrum, bath))
        with pytest.raises(DomainError):
            propagate_populations(a, np.array([0.6, 0.6]), 1.0)  # not normalized
        with pytest.raises(DomainError):
            propagate_populations(a, np.array([1.1, -0.1]), 1.0)  # negative
        with pytest.raises(DomainError):
            propagate_populations(a, np.array([0.5, 0.5]), -1.0)  # negative time


class TestCoherence:
    def test_reference_decay_rate(self):
        spectrum, bath = _reference_parts()
        rates = rate_matrix(spectrum, bath)
        # c_12 = (Gamma_12 + Gamma_21)/2 = (1.5 + 0.5)/2 = -lambda/2
        assert coherence_decay_rate(rates, 1, 2) == pytest.approx(1.0, rel=1e-15)

    def test_three_level_pair_rates(self):
        rng = np.random.default_rng(37)
        spectrum, bath = random_nlevel_model(rng, n_max=5)
        rates = rate_matrix(spectrum, bath)
        g = rates.gamma_rates
        n = spectrum.n_levels
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j:
                    continue
                expected = 0.5 * (
                    math.fsum(g[:, i - 1]) + math.fsum(g[:, j - 1])
                )
                assert coherence_decay_rate(rates, i, j) == pytest.approx(
                    expected, rel=1e-13
                )

    def test_pair_validation(self):
        spectrum, bath = _reference_parts()
        rates = rate_matrix(spectrum, bath)
        with pytest.raises(DomainError):
            coherence_decay_rate(rates, 1, 1)
        with pytest.raises(DomainError):
            coherence_decay_rate(rates, 0, 2)
        with pytest.raises(DomainError):
            coherence_decay_rate(rates, 1, 3)

    def test_propagate_coherence_decay_and_rotation(self):
        z = propagate_coherence(0.5, 2.0, 0.3 + 0.0j, 1.5)
        assert abs(z) == pytest.approx(0.3 * math.exp(-0.75), rel=1e-14)
        assert cmath.phase(z) == pytest.approx(
            math.remainder(3.0, 2.0 * math.pi), rel=1e-12
        )


class TestQubitState:
    def test_relaxation_rate(self):
        spectrum, bath = _reference_parts()
        assert qubit_relaxation_rate(spectrum, bath) == pytest.approx(-2.0, rel=1e-15)

    def test_reference_population_trajectory(self):
        spectrum, bath = _reference_parts()
        ground = QubitInit(a=0.0)
        assert qubit_state(ground, spectrum, bath, 1.0).rho22 == pytest.approx(
            0.25 * (1.0 - math.exp(-2.0)), rel=1e-14
        )
        assert qubit_state(ground, spectrum, bath, 0.5).rho22 == pytest.approx(
            0.25 * (1.0 - math.exp(-1.0)), rel=1e-14
        )

    def test_coherence_half_rate_and_phase(self):
        spectrum, bath = _reference_parts()
        init = QubitInit(a=0.25, r=1.0, phi=0.4)
        t = 1.3
        rho = qubit_state(init, spectrum, bath, t)
        expected = init.rho12_0 * math.exp(-t) * cmath.exp(1j * t)
        assert rho.rho12 == pytest.approx(expected, rel=1e-13)

    def test_agrees_with_general_evolution(self):
        rng = np.random.default_rng(41)
        for _ in range(25):
            s = random_scenario(rng)
            t = random_time(rng, s)
            direct = qubit_state(s.init, s.spectrum, s.bath, t)
            general = evolve_state(
                DensityMatrix.from_qubit_init(s.init), s.spectrum, s.bath, t
            )
            np.testing.assert_allclose(
                direct.elements, general.elements, rtol=0, atol=1e-12
            )

    def test_three_level_evolution_preserves_state_structure(self):
        rng = np.random.default_rng(43)
        spectrum = Spectrum(energies=(0.0, 0.8, 2.1))
        bath = Bath(beta=0.9, gamma=0.7)
        p = np.array([0.5, 0.3, 0.2])
        psi = rng.normal(size=3) + 1j * rng.normal(size=3)
        psi /= np.linalg.norm(psi)
        mat = 0.8 * np.diag(p).astype(complex) + 0.2 * np.outer(psi, psi.conj())
        rho0 = DensityMatrix(elements=(mat + mat.conj().T) / 2.0)
        rho_t = evolve_state(rho0, spectrum, bath, 1.7)
        assert abs(np.trace(rho_t.elements) - 1.0) <= 1e-12
        # populations follow the generator irrespective of coherences
        a = transition_matrix(rate_matrix(spectrum, bath))
        np.testing.assert_allclose(
            rho_t.populations,
            propagate_populations(a, rho0.populations, 1.7),
            rtol=0,
            atol=1e-12,
        )
        # far future: Gibbs diagonal, coherences gone
        rho_inf = evolve_state(rho0, spectrum, bath, 200.0)
        np.testing.assert_allclose(
            rho_inf.populations,
            thermal_distribution(spectrum, bath.beta).pi,
            rtol=0,
            atol=1e-10,
        )
        assert np.max(np.abs(rho_inf.hollow_part)) <= 1e-12


class TestConversions:
    def test_beta_from_occupation_round_trip(self):
        for n12 in (0.1, 1.0, 5.5, 9.5, 80.0):
            for omega in (0.5, 1.0, 5.0):
                beta = beta_from_thermal_ratio(n12, omega)
                assert thermal_ratio(beta, omega) == pytest.approx(n12, rel=1e-12)

    def test_reference_betas(self):
        assert beta_from_thermal_ratio(5.5, 5.0) == pytest.approx(0.0334108, abs=1e-7)
        assert beta_from_thermal_ratio(9.5, 5.0) == pytest.approx(0.0200167, abs=1e-7)

    def test_gamma_from_collision_time(self):
        assert gamma_from_tau_tilde(0.05, 5.0) == pytest.approx(0.125, rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            beta_from_thermal_ratio(0.0, 1.0)
        with pytest.raises(DomainError):
            gamma_from_tau_tilde(-0.1, 1.0)


class TestGadChannel:
    def test_reference_parameters(self):
        ch = gad_params(5.5, 0.05)
        assert ch.p1 == pytest.approx(5.5 / 10.0, rel=1e-15)
        assert ch.p2 == pytest.approx(1.0 - math.exp(-6.5 * 0.05), rel=1e-14)

    def test_kraus_completeness(self):
        for n12 in (1.0, 5.5, 9.5):
            for tau in (0.01, 0.05, 0.5):
                ops = gad_kraus_operators(gad_params(n12, tau))
                total = sum(k.conj().T @ k for k in ops)
                np.testing.assert_allclose(total, np.eye(2), rtol=0, atol=1e-14)

    def test_fixed_point_is_invariant(self):
        for n12 in (5.5, 9.5):
            ch = gad_params(n12, 0.05)
            fixed = gad_fixed_point(ch)
            mapped = gad_apply(ch, fixed)
            np.testing.assert_allclose(mapped.elements, fixed, rtol=0, atol=1e-14)

    def test_preserves_trace_and_positivity(self):
        rng = np.random.default_rng(47)
        ch = gad_params(5.5, 0.3)
        for _ in range(10):
            a0 = float(rng.uniform(0.0, 1.0))
            r = float(rng.uniform(0.0, 1.0))
            rho = DensityMatrix.from_qubit_init(QubitInit(a=a0, r=r))
            out = gad_apply(ch, rho)  # DensityMatrix validation checks both
            assert abs(np.trace(out.elements) - 1.0) <= 1e-12

    def test_requires_inverted_ground_weight(self):
        # p1 = n/(2n - 1) lies in (0, 1] only for n >= 1
        with pytest.raises(DomainError):
            gad_params(0.9, 0.05)
        with pytest.raises(DomainError):
            gad_params(0.4, 0.05)

    def test_ground_start_comparison_rows(self):
        row = gad_master_comparison(5.5, 0.05, omega12=5.0)
        assert row["gamma"] == pytest.approx(0.125, rel=1e-15)
        assert row["rel_diff"] == pytest.approx(1.0 / 55.0, rel=1e-10)
        row = gad_master_comparison(9.5, 0.02, omega12=5.0)
        assert row["rel_diff"] == pytest.approx(1.0 / 171.0, rel=1e-10)

    def test_comparison_gap_is_collision_time_independent(self):
        gaps = [
            gad_master_comparison(5.5, tau, omega12=5.0)["rel_diff"]
            for tau in (0.005, 0.01, 0.05)
        ]
        assert max(gaps) - min(gaps) <= 1e-12

    def test_stationary_diagnostic(self):
        diag = gad_stationary_diagnostic(5.5)
        assert diag["ground_fixed_point"] == pytest.approx(0.55, rel=1e-15)
        assert diag["ground_thermal"] == pytest.approx(6.5 / 12.0, rel=1e-15)
        assert diag["excited_rel_gap"] == pytest.approx(1.0 / 55.0, rel=1e-10)
