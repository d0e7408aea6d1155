"""
Known densities for oracle mode and seeded sampling.

Samples are drawn by inverse-CDF transform of a PCG64 uniform stream, so a
seed fixes the sample on every platform. The Gaussian quantile is
``scipy.special.ndtri`` (Cephes rational approximations).
"""
from abc import ABC, abstractmethod
import math
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtri
from scipy.stats import norm

from ..dal.models import Sample
from ..errors import ConfigurationError
from ..utils.quadrature import integrate, integrate_real_line, interval_settings
from ..utils.rng import uniform_stream


class KnownDensity(ABC):
    """A density s with closed-form pdf, cdf, quantile and norms."""

    name = "density"
    aliases: Tuple[str, ...] = ()

    @property
    @abstractmethod
    def support(self) -> Optional[Tuple[float, float]]:
        """(lo, hi) for compactly supported densities, None for the real line."""

    @abstractmethod
    def pdf(self, x) -> np.ndarray:
        """s(x), zero outside the support."""

    @abstractmethod
    def cdf(self, x) -> np.ndarray:
        """Distribution function."""

    @abstractmethod
    def quantile(self, u) -> np.ndarray:
        """Inverse of the distribution function on (0, 1)."""

    @property
    @abstractmethod
    def sup_norm(self) -> float:
        """||s||_inf."""

    @property
    @abstractmethod
    def l2_norm_sq(self) -> float:
        """||s||^2."""

    center = 0.0
    scale = 1.0

    def breakpoints(self) -> Sequence[float]:
        """Points where s is not smooth."""
        return list(self.support) if self.support is not None else []

    def within_unit_interval(self) -> bool:
        support = self.support
        return support is not None and support[0] >= 0.0 and support[1] <= 1.0

    def sample(self, n: int, seed: int) -> Sample:
        """
        Draw n observations with the given 64-bit seed.

        Args:
            n: Sample size
            seed: Seed of the PCG64 stream

        Returns:
            A Sample
        """
        if n < 1:
            raise ConfigurationError("sample size must be positive")
        return Sample(self.quantile(uniform_stream(seed, n)))

    def expectation(self, f: Callable[[np.ndarray], np.ndarray], *, scale: Optional[float] = None,
                    anchors: Iterable[float] = (), breakpoints: Iterable[float] = (), **quad) -> float:
        """
        E f(X) = int f(x) s(x) dx by quadrature.

        Args:
            f: Vectorized function
            scale: Narrowest feature width of f (defaults to the density scale)
            anchors: Extra points where f has mass (real-line densities only)
            breakpoints: Points where f may jump
        """
        integrand = lambda x: f(x) * self.pdf(x)
        scale = self.scale if scale is None else min(scale, self.scale)
        points = sorted(set(float(p) for p in breakpoints) | set(float(p) for p in self.breakpoints()))
        if self.support is not None:
            lo, hi = self.support
            return integrate(integrand, lo, hi, breakpoints=points, max_panel=scale, **interval_settings(quad))
        anchors = [self.center - 8 * self.scale, self.center + 8 * self.scale] + list(anchors)
        return integrate_real_line(integrand, anchors, scale, breakpoints=points or None, **quad)

    def gaussian_smoothing(self, mean, var: float) -> np.ndarray:
        """
        int s(y) N(y; mean, var) dy, vectorized over ``mean``.

        Parzen smoothing of the density by a Gaussian component reduces to this.
        """
        raise NotImplementedError(f"no closed-form Gaussian smoothing for {self.name}")

    def describe(self) -> dict:
        return {"density": self.name, "sup_norm": self.sup_norm, "l2_norm_sq": self.l2_norm_sq}


class StdGaussian(KnownDensity):
    """The standard normal density on the real line."""

    name = "std-gaussian"
    aliases = ("gaussian", "normal", "std-normal")

    @property
    def support(self):
        return None

    def pdf(self, x):
        return norm.pdf(np.asarray(x, dtype=float))

    def cdf(self, x):
        return norm.cdf(np.asarray(x, dtype=float))

    def quantile(self, u):
        return ndtri(np.asarray(u, dtype=float))

    def gaussian_smoothing(self, mean, var):
        return norm.pdf(np.asarray(mean, dtype=float), scale=math.sqrt(1.0 + var))

    @property
    def sup_norm(self):
        return 1.0 / math.sqrt(2.0 * math.pi)

    @property
    def l2_norm_sq(self):
        return 1.0 / (2.0 * math.sqrt(math.pi))


class _LinearOnUnitInterval(KnownDensity):
    """Densities s(y) = c0 + c1 y on [0, 1]."""

    center = 0.5
    scale = 1.0
    linear_coefficients: Tuple[float, float] = (1.0, 0.0)

    @property
    def support(self):
        return (0.0, 1.0)

    def gaussian_smoothing(self, mean, var):
        # truncated zeroth and first moments of N(mean, var) over [0, 1]
        mean = np.asarray(mean, dtype=float)
        sigma = math.sqrt(var)
        alpha = (0.0 - mean) / sigma
        beta = (1.0 - mean) / sigma
        mass = norm.cdf(beta) - norm.cdf(alpha)
        first = mean * mass + sigma * (norm.pdf(alpha) - norm.pdf(beta))
        c0, c1 = self.linear_coefficients
        return c0 * mass + c1 * first


class Uniform01(_LinearOnUnitInterval):
    """The uniform density on [0, 1]."""

    name = "uniform"
    aliases = ("uniform01", "unif")
    linear_coefficients = (1.0, 0.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0.0) & (x <= 1.0), 1.0, 0.0)

    def cdf(self, x):
        return np.clip(np.asarray(x, dtype=float), 0.0, 1.0)

    def quantile(self, u):
        return np.asarray(u, dtype=float).copy()

    @property
    def sup_norm(self):
        return 1.0

    @property
    def l2_norm_sq(self):
        return 1.0


class Triangular2x(_LinearOnUnitInterval):
    """s(x) = 2x on [0, 1]."""

    name = "triangular"
    aliases = ("triangular2x", "2x")
    linear_coefficients = (0.0, 2.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0.0) & (x <= 1.0), 2.0 * x, 0.0)

    def cdf(self, x):
        return np.clip(np.asarray(x, dtype=float), 0.0, 1.0) ** 2

    def quantile(self, u):
        return np.sqrt(np.asarray(u, dtype=float))

    @property
    def sup_norm(self):
        return 2.0

    @property
    def l2_norm_sq(self):
        return 4.0 / 3.0


DENSITIES = (StdGaussian, Uniform01, Triangular2x)


def get_density(name: str) -> KnownDensity:
    """
    Look up a density by name or alias.

    Raises:
        ConfigurationError: If the name is unknown
    """
    key = str(name).strip().lower()
    for cls in DENSITIES:
        if key == cls.name or key in cls.aliases:
            return cls()
    names = ", ".join(cls.name for cls in DENSITIES)
    raise ConfigurationError(f"unknown density {name!r}; expected one of {names}")
