"""
Tests for the known densities used in oracle mode and sampling.
"""
import math

import numpy as np
import pytest

from kernsel.business.densities import StdGaussian, Triangular2x, Uniform01, get_density
from kernsel.errors import ConfigurationError
from kernsel.utils.quadrature import integrate_real_line

ALL = [StdGaussian(), Uniform01(), Triangular2x()]


@pytest.mark.parametrize("density", ALL, ids=lambda d: d.name)
def test_norms_match_quadrature(density, quad):
    assert density.expectation(lambda x: np.ones_like(x), **quad) == pytest.approx(1.0, abs=1e-10)
    assert density.expectation(density.pdf, **quad) == pytest.approx(density.l2_norm_sq, abs=1e-10)
    grid = np.append(np.linspace(-4.0, 4.0, 8001), [0.0, 1.0])
    assert float(np.max(density.pdf(grid))) == pytest.approx(density.sup_norm, rel=1e-6)


def test_closed_form_norms():
    assert StdGaussian().l2_norm_sq == pytest.approx(1.0 / (2.0 * math.sqrt(math.pi)))
    assert Triangular2x().l2_norm_sq == pytest.approx(4.0 / 3.0)
    assert Triangular2x().sup_norm == 2.0
    assert Uniform01().l2_norm_sq == 1.0


@pytest.mark.parametrize("density", ALL, ids=lambda d: d.name)
def test_quantile_inverts_cdf(density):
    u = np.linspace(0.01, 0.99, 99)
    assert np.allclose(density.cdf(density.quantile(u)), u, atol=1e-12)


@pytest.mark.parametrize("density", ALL, ids=lambda d: d.name)
@pytest.mark.parametrize("mean", [-0.4, 0.2, 0.9, 1.6])
@pytest.mark.parametrize("var", [0.0025, 0.3])
def test_gaussian_smoothing_matches_quadrature(density, mean, var, quad):
    sigma = math.sqrt(var)
    kernel = lambda y: np.exp(-0.5 * (y - mean) ** 2 / var) / math.sqrt(2.0 * math.pi * var)
    numeric = density.expectation(kernel, scale=sigma, anchors=[mean], **quad)
    assert float(density.gaussian_smoothing(mean, var)) == pytest.approx(numeric, abs=1e-9)


def test_sampling_is_seeded_and_in_support():
    first = Triangular2x().sample(500, 42)
    again = Triangular2x().sample(500, 42)
    assert np.array_equal(first.values, again.values)
    assert np.all((first.values > 0) & (first.values < 1))
    # E X = 2/3 under s(x) = 2x
    assert float(np.mean(first.values)) == pytest.approx(2.0 / 3.0, abs=0.05)
    gaussian = StdGaussian().sample(2000, 1)
    assert float(np.mean(gaussian.values)) == pytest.approx(0.0, abs=0.1)
    assert float(np.std(gaussian.values)) == pytest.approx(1.0, abs=0.1)


def test_sample_size_must_be_positive():
    with pytest.raises(ConfigurationError):
        Uniform01().sample(0, 1)


def test_lookup_by_name_and_alias():
    assert isinstance(get_density("std-gaussian"), StdGaussian)
    assert isinstance(get_density(" Normal "), StdGaussian)
    assert isinstance(get_density("2x"), Triangular2x)
    assert isinstance(get_density("unif"), Uniform01)
    with pytest.raises(ConfigurationError):
        get_density("cauchy")


def test_support_flags():
    assert not StdGaussian().within_unit_interval()
    assert Uniform01().within_unit_interval()
    assert Triangular2x().breakpoints() == [0.0, 1.0]
    assert StdGaussian().breakpoints() == []


def test_real_line_expectation_of_second_moment(quad):
    assert StdGaussian().expectation(lambda x: x ** 2, **quad) == pytest.approx(1.0, abs=1e-10)
    value = integrate_real_line(lambda x: x ** 2 * StdGaussian().pdf(x), [0.0], 1.0, **quad)
    assert value == pytest.approx(1.0, abs=1e-10)
