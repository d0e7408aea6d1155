"""
Shared fixtures for the kernsel test suite.
"""
import numpy as np
import pytest

from kernsel.business.densities import StdGaussian, Triangular2x, Uniform01
from kernsel.business.kernels import (FourierPaired, ParzenKernel, ProjectionKernel, RegularHistogram,
                                      TwoBumpGaussian, WeightedProjectionKernel)
from kernsel.dal.models import Sample

# tight enough for the 1e-8 identities, loose enough to stay fast
QUAD = {"tol": 1e-11, "nodes": 64, "max_depth": 40, "tail_ratio": 1e-16}


@pytest.fixture
def quad():
    return dict(QUAD)


@pytest.fixture
def gaussian_sample():
    return StdGaussian().sample(100, 12345)


@pytest.fixture
def triangular_sample():
    return Triangular2x().sample(100, 2024)


@pytest.fixture
def uniform_sample():
    return Uniform01().sample(50, 99)


def small_families():
    """One representative family per variant, sized for exact identities."""
    return {
        "parzen": [ParzenKernel(TwoBumpGaussian(a), h) for a in (0.0, 2.0) for h in (0.25, 1.0)],
        "histogram": [ProjectionKernel(RegularHistogram(d)) for d in (1, 3, 8)],
        "weighted": [
            WeightedProjectionKernel(FourierPaired(5, 1.0, (1.0, 0.5))),
            WeightedProjectionKernel(RegularHistogram(4), (1.0, 0.5, 0.25, 0.0)),
        ],
    }


def density_for(variant: str):
    return StdGaussian() if variant == "parzen" else Triangular2x()


def make_sample(values):
    return Sample(np.asarray(values, dtype=float))
