"""
Tests for oracle-mode diagnostics against known densities.
"""
import math

import numpy as np
import pytest

from kernsel.business.criterion import build_criterion_table
from kernsel.business.densities import StdGaussian, Triangular2x, Uniform01
from kernsel.business.kernels import (FourierPaired, ParzenKernel, ProjectionKernel, RegularHistogram,
                                      TwoBumpGaussian, WeightedProjectionKernel, gaussian, histogram_family,
                                      parzen_family)
from kernsel.business.oracle import (bernstein_bound, bias, chi_mean, diagnose, diagnose_kernel,
                                     expected_estimation_error, family_true_risks, ideal_penalty,
                                     ideal_penalty_expansion, smoothed_density, smoothed_density_by_quadrature,
                                     true_risk, ustat_decomposition, variance_functional)
from kernsel.errors import ConfigurationError, DataError

from .conftest import density_for, small_families


class TestSmoothedDensity:

    def test_examples(self, quad):
        parzen = ParzenKernel(gaussian(), 1.0)
        assert smoothed_density(parzen, StdGaussian(), 0.0, **quad) == pytest.approx(0.2820948, abs=1e-7)
        constant = ProjectionKernel(RegularHistogram(1))
        for density in (Uniform01(), Triangular2x()):
            values = smoothed_density(constant, density, np.linspace(0.0, 1.0, 9), **quad)
            assert np.allclose(values, 1.0, atol=1e-14)
        two_bins = ProjectionKernel(RegularHistogram(2))
        assert smoothed_density(two_bins, Triangular2x(), 0.25, **quad) == pytest.approx(0.5, abs=1e-14)

    @pytest.mark.parametrize("variant", ["parzen", "histogram", "weighted"])
    @pytest.mark.parametrize("density", [StdGaussian(), Uniform01(), Triangular2x()], ids=lambda d: d.name)
    def test_closed_form_matches_quadrature(self, variant, density, quad):
        if variant != "parzen" and not density.within_unit_interval():
            pytest.skip("basis kernels need a density on [0, 1]")
        for k in small_families()[variant]:
            for x in (0.05, 0.5, 0.93):
                assert smoothed_density(k, density, x, **quad) == pytest.approx(
                    smoothed_density_by_quadrature(k, density, x, **quad), abs=1e-9)

    def test_incompatible_pair_rejected(self, quad):
        with pytest.raises(ConfigurationError):
            smoothed_density(ProjectionKernel(RegularHistogram(2)), StdGaussian(), 0.5, **quad)


class TestDeterministicFunctionals:

    def test_bias_examples(self, quad):
        assert bias(ProjectionKernel(RegularHistogram(1)), Uniform01(), **quad) == pytest.approx(0.0, abs=1e-14)
        histogram = ProjectionKernel(RegularHistogram(4))
        assert bias(histogram, Triangular2x(), **quad) == pytest.approx(1.0 / 48.0, abs=1e-15)
        assert bias(histogram, Triangular2x(), method="quadrature", **quad) == pytest.approx(1.0 / 48.0, abs=1e-10)
        narrow = bias(ParzenKernel(gaussian(), 0.1), StdGaussian(), **quad)
        wide = bias(ParzenKernel(gaussian(), 1.0), StdGaussian(), **quad)
        assert 0 < narrow <= wide

    @pytest.mark.parametrize("variant", ["parzen", "histogram", "weighted"])
    def test_bias_paths_agree(self, variant, quad):
        density = density_for(variant)
        for k in small_families()[variant]:
            assert bias(k, density, **quad) == pytest.approx(bias(k, density, method="quadrature", **quad),
                                                             abs=1e-9)

    def test_variance_functional_examples(self, quad):
        assert variance_functional(ProjectionKernel(RegularHistogram(7)), Uniform01(), **quad) == 7.0
        assert variance_functional(ParzenKernel(gaussian(), 0.5), StdGaussian(), **quad) == pytest.approx(
            0.5641896, abs=1e-7)
        fourier = WeightedProjectionKernel(FourierPaired(3, 1.0, (1.0,)))
        assert variance_functional(fourier, Triangular2x(), **quad) == pytest.approx(3.0, abs=1e-12)

    def test_non_constant_theta_is_integrated(self, quad):
        k = WeightedProjectionKernel(RegularHistogram(2), (1.0, 0.5))
        # Theta = 2 on [0, 1/2) and 0.5 on [1/2, 1]; P(bin 1) = 1/4 under s(x) = 2x
        assert variance_functional(k, Triangular2x(), **quad) == pytest.approx(2 * 0.25 + 0.5 * 0.75, abs=1e-12)
        assert chi_mean(k, Triangular2x(), **quad) == pytest.approx(2 * 0.25 + 1.0 * 0.75, abs=1e-12)

    def test_expected_estimation_error(self, quad):
        k = ParzenKernel(gaussian(), 0.5)
        expected = (0.5641895835477563 - 1.0 / math.sqrt(5.0 * math.pi)) / 50
        assert expected_estimation_error(k, StdGaussian(), 50, **quad) == pytest.approx(expected, rel=1e-9)


class TestSampleQuantities:

    def test_true_risk_examples(self, uniform_sample, quad):
        constant = ProjectionKernel(RegularHistogram(1))
        assert true_risk(constant, uniform_sample, Uniform01(), **quad) == pytest.approx(0.0, abs=1e-8)
        two_bins = ProjectionKernel(RegularHistogram(2))
        for method in ("quadrature", "analytic"):
            assert true_risk(two_bins, [0.1, 0.2], Triangular2x(), method=method, **quad) == pytest.approx(
                7.0 / 3.0, abs=1e-9)
        with pytest.raises(ConfigurationError):
            true_risk(two_bins, [0.1, 0.2], Triangular2x(), method="exact", **quad)

    @pytest.mark.parametrize("variant", ["parzen", "histogram", "weighted"])
    def test_risk_paths_and_family_risks_agree(self, variant, quad):
        density = density_for(variant)
        sample = density.sample(30, 5)
        family = small_families()[variant]
        table = build_criterion_table(family, sample)
        risks = family_true_risks(table, sample, density, **quad)
        for k, risk in zip(family, risks):
            analytic = true_risk(k, sample, density, method="analytic", **quad)
            assert risk == pytest.approx(analytic, abs=1e-12)
            assert true_risk(k, sample, density, **quad) == pytest.approx(analytic, abs=1e-8)

    def test_ideal_penalty_examples(self, triangular_sample, quad):
        constant = ProjectionKernel(RegularHistogram(1))
        assert ideal_penalty(constant, triangular_sample, Triangular2x(), **quad) == pytest.approx(0.0, abs=1e-14)
        parzen = ParzenKernel(gaussian(), 1.0)
        assert ideal_penalty(parzen, [0.0], StdGaussian(), **quad) == pytest.approx(0.2336950, abs=1e-7)

    @pytest.mark.parametrize("variant", ["parzen", "histogram", "weighted"])
    @pytest.mark.parametrize("seed", range(25))
    def test_ideal_penalty_expansion(self, variant, seed, quad):
        density = density_for(variant)
        sample = density.sample(2 + seed % 9, 1000 + seed)
        for k in small_families()[variant]:
            assert ideal_penalty_expansion(k, sample, density, **quad) == pytest.approx(
                ideal_penalty(k, sample, density, **quad), abs=1e-8)


class TestUStatDecomposition:

    @pytest.mark.parametrize("variant", ["parzen", "histogram", "weighted"])
    @pytest.mark.parametrize("n", [2, 5, 20, 50])
    @pytest.mark.parametrize("seed", range(3))
    def test_residual_vanishes(self, variant, n, seed, quad):
        density = density_for(variant)
        sample = density.sample(n, 77 + seed)
        for k in small_families()[variant]:
            decomposition = ustat_decomposition(k, sample, density, **quad)
            assert abs(decomposition.residual) <= 1e-6

    @pytest.mark.slow
    @pytest.mark.parametrize("variant", ["parzen", "histogram", "weighted"])
    @pytest.mark.parametrize("n", [2, 5, 20, 50])
    @pytest.mark.parametrize("seed", range(3, 10))
    def test_residual_vanishes_more_seeds(self, variant, n, seed, quad):
        density = density_for(variant)
        sample = density.sample(n, 77 + seed)
        for k in small_families()[variant]:
            assert abs(ustat_decomposition(k, sample, density, **quad).residual) <= 1e-6

    def test_quadrature_method_agrees(self, quad):
        density = Triangular2x()
        sample = density.sample(6, 3)
        for k in (ProjectionKernel(RegularHistogram(3)), WeightedProjectionKernel(FourierPaired(5, 1.0, (1.0, 0.5)))):
            auto = ustat_decomposition(k, sample, density, **quad)
            numeric = ustat_decomposition(k, sample, density, method="quadrature", **quad)
            assert numeric.u_over_n2 == pytest.approx(auto.u_over_n2, abs=1e-8)
            assert abs(numeric.residual) <= 1e-6
        parzen = ParzenKernel(TwoBumpGaussian(1.5), 0.5)
        numeric = ustat_decomposition(parzen, StdGaussian().sample(4, 8), StdGaussian(), method="quadrature",
                                      **quad)
        assert abs(numeric.residual) <= 1e-6

    def test_constant_kernel_has_zero_terms(self, uniform_sample, quad):
        decomposition = ustat_decomposition(ProjectionKernel(RegularHistogram(1)), uniform_sample, Uniform01(),
                                            **quad)
        assert decomposition.lhs == pytest.approx(0.0, abs=1e-12)
        assert decomposition.pn_zeta_over_n == pytest.approx(0.0, abs=1e-12)
        assert decomposition.u_over_n2 == pytest.approx(0.0, abs=1e-12)

    def test_estimation_error_tracks_variance_term(self, quad):
        k = ParzenKernel(gaussian(), 0.5)
        density = StdGaussian()
        errors = [ustat_decomposition(k, density.sample(50, seed), density, **quad).lhs for seed in range(20)]
        theta_over_n = 0.5641896 / 50
        assert theta_over_n / 3 <= float(np.mean(errors)) <= 3 * theta_over_n

    def test_needs_two_observations(self, quad):
        with pytest.raises(DataError):
            ustat_decomposition(ParzenKernel(gaussian(), 1.0), [0.3], StdGaussian(), **quad)
        with pytest.raises(ConfigurationError):
            ustat_decomposition(ParzenKernel(gaussian(), 1.0), [0.3, 0.1], StdGaussian(), method="exact", **quad)


class TestBernstein:

    def test_examples(self):
        assert bernstein_bound(1.0, 1.0, 100, 1.0) == pytest.approx(0.1447547, abs=1e-7)
        assert bernstein_bound(0.0, 0.0, 25, 3.0) == 0.0
        assert bernstein_bound(4.0, 3.0, 100, 2.0) == pytest.approx(0.42, abs=1e-12)

    @pytest.mark.parametrize("args", [(-1.0, 1.0, 10, 1.0), (1.0, -1.0, 10, 1.0), (1.0, 1.0, 0, 1.0),
                                      (1.0, 1.0, 10, 0.0), (1.0, 1.0, 2.5, 1.0)])
    def test_invalid_arguments(self, args):
        with pytest.raises(ConfigurationError):
            bernstein_bound(*args)


class TestDiagnose:

    def test_constant_histogram_on_uniform_data(self, uniform_sample, quad):
        report = diagnose(histogram_family([1]), uniform_sample, Uniform01(), **quad)
        kernel = report["kernels"][0]
        assert kernel.true_risk == pytest.approx(0.0, abs=1e-8)
        assert kernel.bias == pytest.approx(0.0, abs=1e-12)
        assert kernel.tail_certificate == "not certified"
        assert report["n"] == uniform_sample.n
        assert report["gamma"].gamma == 1.0

    def test_report_identities(self, gaussian_sample, quad):
        report = diagnose(parzen_family(0.0, [0.5, 0.2]), gaussian_sample, StdGaussian(), u=2.0, **quad)
        assert report["upsilon"].upsilon_lower == pytest.approx(1.7978845608, abs=1e-9)
        for kernel in report["kernels"]:
            assert abs(kernel.ustat_residual) <= 1e-6
            assert abs(kernel.expansion_defect) <= 1e-8
            assert abs(kernel.ideal_penalty_expansion_defect) <= 1e-8
            assert kernel.bernstein_u == 2.0
            assert kernel.bernstein_zeta > 0 and kernel.bernstein_s_k > 0
            assert kernel.variance_term == pytest.approx(
                variance_functional(ParzenKernel(gaussian(), kernel.kernel["h"]), StdGaussian()) / 100)

    def test_single_observation_skips_ustat(self, quad):
        report = diagnose_kernel(ParzenKernel(gaussian(), 1.0), [0.0], StdGaussian(), **quad)
        assert report.ustat is None
        assert math.isnan(report.ustat_residual)

    def test_domain_mismatch(self, gaussian_sample, quad):
        with pytest.raises(ConfigurationError):
            diagnose(histogram_family([1, 2]), gaussian_sample, StdGaussian(), **quad)
        with pytest.raises(DataError):
            diagnose(histogram_family([1, 2]), [0.5, 1.5], Uniform01(), **quad)
