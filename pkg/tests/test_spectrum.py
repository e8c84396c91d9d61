"""Spectrum, bath, thermal state, and generator structure."""

import math

import numpy as np
import pytest

from conftest import random_nlevel_model
from thermoqfi import (
    Bath,
    DomainError,
    ModelIntegrityError,
    NoStationaryStateError,
    Spectrum,
    TransitionMatrix,
    rate_matrix,
    spectral_report,
    stationary_distribution,
    thermal_distribution,
    thermal_ratio,
    transition_matrix,
)


class TestSpectrum:
    def test_qubit_constructor(self):
        sp = Spectrum.qubit(2.5)
        assert sp.energies == (0.0, 2.5)
        assert sp.gap(1, 2) == 2.5

    def test_gap_is_one_based_and_signed(self):
        sp = Spectrum(energies=(0.0, 1.0, 3.0))
        assert sp.gap(1, 3) == 3.0
        assert sp.gap(3, 1) == -3.0
        assert sp.gap(2, 3) == 2.0

    def test_rejects_single_level(self):
        with pytest.raises(DomainError):
            Spectrum(energies=(1.0,))

    def test_rejects_nonincreasing(self):
        with pytest.raises(DomainError):
            Spectrum(energies=(0.0, 1.0, 1.0))
        with pytest.raises(DomainError):
            Spectrum(energies=(0.0, 2.0, 1.0))

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            Spectrum(energies=(0.0, math.inf))


class TestBath:
    def test_rejects_nonpositive_parameters(self):
        with pytest.raises(DomainError):
            Bath(beta=0.0, gamma=1.0)
        with pytest.raises(DomainError):
            Bath(beta=1.0, gamma=-0.5)
        with pytest.raises(DomainError):
            Bath(beta=math.nan, gamma=1.0)


class TestThermalRatio:
    def test_unit_occupation_at_log2(self):
        assert thermal_ratio(math.log(2.0), 1.0) == pytest.approx(1.0, rel=1e-15)

    def test_large_gap_underflows_to_zero(self):
        assert thermal_ratio(1.0, 800.0) == 0.0

    def test_small_gap_diverges_like_temperature(self):
        n = thermal_ratio(1e-9, 1.0)
        assert n == pytest.approx(1e9, rel=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            thermal_ratio(-1.0, 1.0)
        with pytest.raises(DomainError):
            thermal_ratio(1.0, 0.0)


class TestThermalDistribution:
    def test_reference_qubit_populations(self):
        dist = thermal_distribution(Spectrum.qubit(1.0), math.log(3.0))
        assert dist.pi[0] == pytest.approx(0.75, abs=1e-15)
        assert dist.pi[1] == pytest.approx(0.25, abs=1e-15)
        assert dist.partition == pytest.approx(4.0 / 3.0, rel=1e-15)

    def test_three_level_boltzmann_ratios(self):
        dist = thermal_distribution(Spectrum(energies=(0.0, 1.0, 2.0)), 1.0)
        assert dist.pi[1] / dist.pi[0] == pytest.approx(math.exp(-1.0), rel=1e-14)
        assert dist.pi[2] / dist.pi[1] == pytest.approx(math.exp(-1.0), rel=1e-14)
        assert math.fsum(dist.pi) == pytest.approx(1.0, abs=1e-15)

    def test_energy_shift_leaves_populations_invariant(self):
        base = thermal_distribution(Spectrum(energies=(0.0, 0.7, 1.9)), 1.3)
        shifted = thermal_distribution(Spectrum(energies=(100.0, 100.7, 101.9)), 1.3)
        np.testing.assert_allclose(shifted.pi, base.pi, rtol=0, atol=1e-15)

    def test_populations_nonincreasing(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            spectrum, bath = random_nlevel_model(rng)
            pi = thermal_distribution(spectrum, bath.beta).pi
            assert np.all(np.diff(pi) <= 0)


class TestRates:
    def test_downward_dominates_upward(self):
        rates = rate_matrix(Spectrum.qubit(1.0), Bath(beta=math.log(3.0), gamma=1.0))
        down = rates.gamma_rates[0, 1]  # 2 -> 1
        up = rates.gamma_rates[1, 0]    # 1 -> 2
        assert down > up
        # gamma (n+1) and gamma n with n = 1/(e^{beta omega} - 1) = 1/2
        assert down == pytest.approx(1.5, rel=1e-15)
        assert up == pytest.approx(0.5, rel=1e-15)

    def test_rate_detailed_balance_factor(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            spectrum, bath = random_nlevel_model(rng)
            rates = rate_matrix(spectrum, bath).gamma_rates
            n = spectrum.n_levels
            for i in range(n):
                for j in range(i + 1, n):
                    boltzmann = math.exp(-bath.beta * (spectrum.energies[j] - spectrum.energies[i]))
                    assert rates[j, i] / rates[i, j] == pytest.approx(boltzmann, rel=1e-12)


class TestTransitionMatrix:
    def test_reference_generator(self):
        a = transition_matrix(
            rate_matrix(Spectrum.qubit(1.0), Bath(beta=math.log(3.0), gamma=1.0))
        ).a
        np.testing.assert_allclose(a, [[-0.5, 1.5], [0.5, -1.5]], rtol=0, atol=1e-15)

    def test_columns_sum_to_zero(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            spectrum, bath = random_nlevel_model(rng)
            a = transition_matrix(rate_matrix(spectrum, bath)).a
            for j in range(a.shape[1]):
                assert abs(math.fsum(a[:, j])) <= 1e-13 * (1.0 + np.max(np.abs(a)))

    def test_rejects_nonzero_column_sum(self):
        with pytest.raises(DomainError):
            TransitionMatrix(a=np.array([[-0.5, 1.5], [0.6, -1.5]]))

    def test_rejects_nonpositive_off_diagonal(self):
        with pytest.raises(DomainError):
            TransitionMatrix(a=np.array([[0.0, 0.0], [0.0, 0.0]]))

    def test_matrix_is_readonly(self):
        a = transition_matrix(
            rate_matrix(Spectrum.qubit(1.0), Bath(beta=1.0, gamma=1.0))
        ).a
        with pytest.raises(ValueError):
            a[0, 0] = 0.0


class TestStationaryDistribution:
    def test_matches_gibbs(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            spectrum, bath = random_nlevel_model(rng)
            a = transition_matrix(rate_matrix(spectrum, bath))
            pi_num = stationary_distribution(a).pi
            pi_ref = thermal_distribution(spectrum, bath.beta).pi
            np.testing.assert_allclose(pi_num, pi_ref, rtol=0, atol=1e-12)

    def test_detailed_balance_of_generator(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            spectrum, bath = random_nlevel_model(rng)
            a = transition_matrix(rate_matrix(spectrum, bath)).a
            pi = thermal_distribution(spectrum, bath.beta).pi
            n = a.shape[0]
            for i in range(n):
                for j in range(i + 1, n):
                    flow, back = a[i, j] * pi[j], a[j, i] * pi[i]
                    assert abs(flow - back) <= 1e-12 * max(flow, back)

    def test_no_null_eigenvalue_raises(self):
        with pytest.raises(NoStationaryStateError):
            stationary_distribution(np.array([[-1.0, 0.5], [0.3, -2.0]]))


class TestSpectralReport:
    def test_reference_eigenvalues(self):
        a = transition_matrix(
            rate_matrix(Spectrum.qubit(1.0), Bath(beta=math.log(3.0), gamma=1.0))
        )
        report = spectral_report(a)
        np.testing.assert_allclose(report.eigenvalues, [0.0, -2.0], rtol=0, atol=1e-14)
        assert report.null_count == 1
        assert report.negative_count == 1

    def test_counts_on_random_models(self):
        rng = np.random.default_rng(19)
        for _ in range(25):
            spectrum, bath = random_nlevel_model(rng)
            report = spectral_report(transition_matrix(rate_matrix(spectrum, bath)))
            assert report.null_count == 1
            assert report.negative_count == spectrum.n_levels - 1
            assert report.eigenvalues[0] == pytest.approx(0.0, abs=report.tolerance)

    def test_gershgorin_discs_cover_spectrum(self):
        rng = np.random.default_rng(23)
        for _ in range(15):
            spectrum, bath = random_nlevel_model(rng)
            a = transition_matrix(rate_matrix(spectrum, bath)).a
            report = spectral_report(a)
            slack = 1e-9 * (1.0 + np.linalg.norm(a, np.inf))
            for lam in report.eigenvalues:
                inside = np.abs(lam - report.gershgorin_centers) <= report.gershgorin_radii + slack
                assert inside.any()

    def test_corrupted_generator_is_rejected(self):
        a = transition_matrix(
            rate_matrix(Spectrum.qubit(1.0), Bath(beta=math.log(3.0), gamma=1.0))
        ).a.copy()
        a[0, 0] += 0.1
        with pytest.raises(ModelIntegrityError, match="null-eigenvalue-count"):
            spectral_report(a)
