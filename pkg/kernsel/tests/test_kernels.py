"""
Tests for kernel families and their functionals.
"""
import math

import numpy as np
import pytest

from kernsel.business.criterion import estimate_at
from kernsel.business.densities import StdGaussian, Triangular2x, Uniform01
from kernsel.business.kernels import (FourierPaired, ParzenKernel, ProjectionKernel, RegularHistogram,
                                      TwoBumpGaussian, WeightedProjectionKernel, a_by_quadrature, a_eval,
                                      chi_eval, fourier_cutoff_family, gamma_bound, gaussian,
                                      histogram_family, kernel_eval, l2_norm_sq_by_quadrature,
                                      optimal_to_minimal_ratio, reciprocal_bandwidth_grid, parzen_family,
                                      theta_eval, upsilon_bound)
from kernsel.errors import ConfigurationError, InputDomainError, UnsupportedDensityError
from kernsel.utils.quadrature import integrate, interval_settings

from .conftest import small_families

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class TestBaseKernel:
    """K_a closed forms."""

    @pytest.mark.parametrize("a", [0.0, 1.5, 2.0, 3.0])
    def test_closed_form_constants(self, a, quad):
        base = TwoBumpGaussian(a)
        assert base.at_zero() == pytest.approx(math.exp(-a * a / 2.0) * INV_SQRT_2PI, abs=1e-12)
        assert float(base(0.0)) == pytest.approx(base.at_zero(), abs=1e-12)
        expected = (1.0 + math.exp(-a * a)) / (4.0 * math.sqrt(math.pi))
        assert base.l2_norm_sq() == pytest.approx(expected, abs=1e-15)
        assert l2_norm_sq_by_quadrature(base, **quad) == pytest.approx(expected, abs=1e-8)

    @pytest.mark.parametrize("a, positive", [(0.0, True), (1.5, True), (2.0, False), (3.0, False)])
    def test_minimal_penalty_sign(self, a, positive):
        base = TwoBumpGaussian(a)
        assert (2.0 * base.at_zero() - base.l2_norm_sq() > 0) is positive

    def test_symmetric_non_negative_unit_mass(self, quad):
        base = TwoBumpGaussian(1.5)
        u = np.linspace(-6.0, 6.0, 241)
        assert np.allclose(base(u), base(-u), atol=1e-15, rtol=0.0)
        assert np.all(base(u) >= 0)
        mass = integrate(base, -12.0, 12.0, max_panel=1.0, **interval_settings(quad))
        assert mass == pytest.approx(1.0, abs=1e-10)

    def test_self_convolution_matches_quadrature(self, quad):
        base = TwoBumpGaussian(2.0)
        for u in (0.0, 1.3, 4.0):
            numeric = integrate(lambda z: base(z) * base(u - z), -20.0, 20.0, max_panel=1.0,
                                **interval_settings(quad))
            assert float(base.self_convolution(u)) == pytest.approx(numeric, abs=1e-10)

    def test_sup_norm(self):
        assert gaussian().sup_norm() == pytest.approx(INV_SQRT_2PI, rel=1e-10)
        # two well separated bumps, each of height 1/2 phi(0)
        assert TwoBumpGaussian(3.0).sup_norm() == pytest.approx(0.5 * INV_SQRT_2PI, rel=1e-6)
        assert TwoBumpGaussian(3.0).sup_norm() > float(TwoBumpGaussian(3.0)(0.0))

    def test_negative_a_rejected(self):
        with pytest.raises(ConfigurationError):
            TwoBumpGaussian(-1.0)


class TestPointwise:

    def test_kernel_eval_examples(self):
        assert kernel_eval(ParzenKernel(gaussian(), 1.0), 0.0, 0.0) == pytest.approx(0.3989423, abs=1e-7)
        histogram = ProjectionKernel(RegularHistogram(4))
        assert kernel_eval(histogram, 0.1, 0.2) == 4.0
        assert kernel_eval(histogram, 0.1, 0.3) == 0.0

    def test_chi_eval_examples(self):
        assert chi_eval(ParzenKernel(gaussian(), 0.5), 0.37) == pytest.approx(0.7978846, abs=1e-7)
        assert chi_eval(ProjectionKernel(RegularHistogram(7)), 0.9) == 7.0
        # expanded basis: w0 + tau + tau
        fourier = WeightedProjectionKernel(FourierPaired(3, 1.0, (1.0,)))
        for x in (0.0, 0.2, 0.71):
            assert chi_eval(fourier, x) == pytest.approx(3.0, abs=1e-12)

    def test_a_and_theta_examples(self):
        parzen = ParzenKernel(gaussian(), 0.5)
        assert theta_eval(parzen, 1.7) == pytest.approx(0.5641896, abs=1e-7)
        assert a_eval(ParzenKernel(gaussian(), 1.0), 0.0, 2.0) == pytest.approx(0.1037769, abs=1e-7)
        assert theta_eval(ParzenKernel(TwoBumpGaussian(2.0), 0.1), 0.0) == pytest.approx(1.4362525, abs=1e-7)
        fourier = WeightedProjectionKernel(FourierPaired(3, 1.0, (0.5,)))
        assert theta_eval(fourier, 0.3) == pytest.approx(1.5, abs=1e-12)

    def test_array_inputs_broadcast(self):
        histogram = ProjectionKernel(RegularHistogram(2))
        values = kernel_eval(histogram, np.array([0.1, 0.6]), 0.2)
        assert isinstance(values, np.ndarray)
        assert values.tolist() == [2.0, 0.0]

    @pytest.mark.parametrize("variant", ["parzen", "histogram", "weighted"])
    def test_symmetry_and_theta_is_diagonal(self, variant):
        rng = np.random.default_rng(7)
        for k in small_families()[variant]:
            x, y = rng.uniform(0.0, 1.0, size=(2, 1000))
            assert np.array_equal(k.evaluate(x, y), k.evaluate(y, x))
            assert np.array_equal(k.a(x, y), k.a(y, x))
            assert np.array_equal(k.theta(x), k.a(x, x))

    @pytest.mark.parametrize("variant", ["histogram", "weighted"])
    def test_cauchy_schwarz_on_the_diagonals(self, variant):
        rng = np.random.default_rng(11)
        for k in small_families()[variant]:
            x, y = rng.uniform(0.0, 1.0, size=(2, 1000))
            assert np.all(np.abs(k.evaluate(x, y)) <= np.sqrt(k.chi(x) * k.chi(y)) + 1e-12)
            assert np.all(np.abs(k.a(x, y)) <= np.sqrt(k.theta(x) * k.theta(y)) + 1e-12)

    @pytest.mark.parametrize("variant", ["parzen", "histogram", "weighted"])
    def test_a_closed_form_matches_quadrature(self, variant, quad):
        for k in small_families()[variant]:
            for x, y in ((0.13, 0.13), (0.2, 0.77), (0.5, 0.55)):
                assert a_eval(k, x, y) == pytest.approx(a_by_quadrature(k, x, y, **quad), abs=1e-8)

    def test_basis_kernels_reject_points_outside_unit_interval(self):
        histogram = ProjectionKernel(RegularHistogram(3))
        with pytest.raises(InputDomainError):
            kernel_eval(histogram, 1.5, 0.2)
        with pytest.raises(InputDomainError):
            chi_eval(histogram, -0.01)
        with pytest.raises(InputDomainError):
            kernel_eval(ParzenKernel(gaussian(), 1.0), float("nan"), 0.0)


class TestBases:

    def test_histogram_partitions_unit_interval(self):
        basis = RegularHistogram(5)
        x = np.linspace(0.0, 1.0, 1001)
        assert np.all((basis.functions(x) > 0).sum(axis=-1) == 1)
        assert basis.bin_index(1.0) == 4

    def test_points_on_bin_edges_open_the_next_bin(self):
        k = ProjectionKernel(RegularHistogram(100))
        assert kernel_eval(k, 0.29, 0.295) == 100.0
        assert kernel_eval(k, 0.29, 0.285) == 0.0
        assert kernel_eval(k, 0.57, 0.575) == 100.0
        assert kernel_eval(k, 0.58, 0.575) == 0.0
        assert estimate_at(k, [0.29] * 5, 0.295) == pytest.approx(100.0)
        assert RegularHistogram(100).bin_index(np.array([0.0, 0.29, 0.57, 0.58, 1.0])).tolist() == [0, 29, 57, 58, 99]

    @pytest.mark.parametrize("basis", [RegularHistogram(3), FourierPaired(5)])
    def test_orthonormality(self, basis, quad):
        settings = interval_settings(quad)
        for i in range(basis.size):
            for j in range(i, basis.size):
                value = integrate(lambda t: basis.functions(t)[..., i] * basis.functions(t)[..., j],
                                  0.0, 1.0, breakpoints=basis.breakpoints(), **settings)
                assert value == pytest.approx(1.0 if i == j else 0.0, abs=1e-10)

    def test_invalid_parameters(self):
        with pytest.raises(ConfigurationError):
            RegularHistogram(0)
        with pytest.raises(ConfigurationError):
            FourierPaired(4)
        with pytest.raises(ConfigurationError):
            FourierPaired(5, 1.0, (0.5,))
        with pytest.raises(ConfigurationError):
            ParzenKernel(gaussian(), 0.0)
        with pytest.raises(ConfigurationError):
            WeightedProjectionKernel(RegularHistogram(2), (1.0, 1.5))
        with pytest.raises(ConfigurationError):
            WeightedProjectionKernel(RegularHistogram(2), (1.0,))

    def test_unequal_pair_weights_make_chi_vary(self):
        k = WeightedProjectionKernel(FourierPaired(3), (1.0, 1.0, 0.0))
        assert k.constant_chi() is None
        assert k.sup_kernel() == pytest.approx(3.0, rel=1e-9)


class TestFamilyConstants:

    def test_gamma_histograms(self):
        report = gamma_bound(histogram_family(range(1, 101)), 100)
        assert report.gamma == 1.0
        assert report.condition_holds

    def test_gamma_parzen_reciprocal_grid(self):
        report = gamma_bound(parzen_family(0.0, reciprocal_bandwidth_grid(50)), 100)
        assert report.gamma == 1.0
        assert report.condition_holds
        assert report.detail["min_bandwidth"] == pytest.approx(0.01)
        assert report.detail["bandwidth_threshold"] == pytest.approx(INV_SQRT_2PI / 100, rel=1e-9)

    def test_gamma_parzen_condition_fails_for_tiny_bandwidth(self):
        assert not gamma_bound(parzen_family(0.0, [0.001]), 100).condition_holds

    def test_gamma_fourier(self):
        family = [ProjectionKernel(FourierPaired(3))]
        assert gamma_bound(family, 100).gamma == 1.0
        assert gamma_bound(family, 2).gamma == pytest.approx(1.5)

    def test_mixed_family_rejected(self):
        with pytest.raises(ConfigurationError):
            gamma_bound([ParzenKernel(gaussian(), 1.0), ProjectionKernel(RegularHistogram(2))], 10)
        with pytest.raises(ConfigurationError):
            gamma_bound([], 10)

    def test_upsilon_examples(self):
        parzen = upsilon_bound(parzen_family(0.0, [0.5, 0.25]), StdGaussian())
        assert parzen.upsilon_lower == pytest.approx(1.0 + 2.0 * INV_SQRT_2PI, abs=1e-12)
        assert parzen.upsilon_lower == pytest.approx(1.7979, abs=1e-4)
        histogram = upsilon_bound(histogram_family(range(1, 101)), Triangular2x(), 100)
        assert histogram.upsilon_lower == 3.0
        assert histogram.components == {"sup_norm": 2.0, "gamma": 1.0}
        fourier = [ProjectionKernel(FourierPaired(3))]
        assert upsilon_bound(fourier, Uniform01(), 3).upsilon_lower == 2.0

    def test_upsilon_rejects_unbounded_density(self):
        class Unbounded:
            name = "unbounded"
            sup_norm = math.inf

        with pytest.raises(UnsupportedDensityError):
            upsilon_bound(histogram_family([1, 2]), Unbounded(), 10)

    def test_optimal_to_minimal_ratio(self):
        assert optimal_to_minimal_ratio(ProjectionKernel(RegularHistogram(9))) == 2.0
        base = gaussian()
        expected = 2 * base.at_zero() / (2 * base.at_zero() - base.l2_norm_sq())
        assert optimal_to_minimal_ratio(ParzenKernel(base, 0.3)) == pytest.approx(expected)
        assert optimal_to_minimal_ratio(ParzenKernel(TwoBumpGaussian(3.0), 0.3)) < 0

    def test_fourier_cutoff_family_is_nested(self):
        family = fourier_cutoff_family(7)
        assert [k.constant_chi() for k in family] == [1.0, 3.0, 5.0, 7.0]
