"""
Kernel families and their pointwise and integral functionals.

Three variants are supported: projection kernels on an orthonormal basis of
L2([0, 1]), Parzen kernels built from the two-bump Gaussian family K_a, and
weighted projection kernels. For each kernel k this module evaluates

    k(x, y),  chi_k(x) = k(x, x),  A_k(x, y) = int k(x, z) k(z, y) dz,
    Theta_k(x) = A_k(x, x),

and the family-wide constants Gamma and the smallest admissible Upsilon.

Basis kernels live on [0, 1] and reject points outside it; Parzen kernels
live on the real line.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize
from scipy.stats import norm

from ..dal.models import GammaReport, UpsilonReport
from ..errors import ConfigurationError, InputDomainError, UnsupportedDensityError
from ..utils.logger import get_logger
from ..utils.quadrature import integrate, integrate_real_line, interval_settings

logger = get_logger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

UNIT_INTERVAL = (0.0, 1.0)


def _gauss(x: np.ndarray, mean: float, var: float) -> np.ndarray:
    return norm.pdf(x, loc=mean, scale=math.sqrt(var))


# ---------------------------------------------------------------------------
# Base kernels K
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _two_bump_sup_norm(a: float) -> float:
    kernel = TwoBumpGaussian(a)
    grid = np.linspace(0.0, a + 4.0, 4001)
    values = kernel(grid)
    best = int(np.argmax(values))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid.size - 1)]
    if hi <= lo:
        return float(values[best])
    refined = optimize.minimize_scalar(lambda u: -float(kernel(u)), bounds=(lo, hi),
                                       method='bounded', options={'xatol': 1e-12})
    return float(max(values[best], -refined.fun))


@dataclass(frozen=True)
class TwoBumpGaussian:
    """
    The symmetric two-bump Gaussian K_a(u) = (phi(u - a) + phi(u + a)) / 2.

    K_0 is the standard Gaussian kernel. K_a is a probability density, so
    ||K_a||_1 = 1.
    """
    a: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a >= 0):
            raise ConfigurationError(f"K_a needs a finite a >= 0, got {self.a}")

    def __call__(self, u: ArrayLike) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return 0.5 * (norm.pdf(u - self.a) + norm.pdf(u + self.a))

    def at_zero(self) -> float:
        """K_a(0) = exp(-a^2 / 2) / sqrt(2 pi)."""
        return math.exp(-self.a ** 2 / 2.0) / math.sqrt(2.0 * math.pi)

    def l1_norm(self) -> float:
        return 1.0

    def l2_norm_sq(self) -> float:
        """||K_a||^2 = (1 + exp(-a^2)) / (4 sqrt(pi))."""
        return (1.0 + math.exp(-self.a ** 2)) / (4.0 * math.sqrt(math.pi))

    def sup_norm(self) -> float:
        """||K_a||_inf, located numerically (the maximum moves off 0 once a > 1)."""
        return _two_bump_sup_norm(float(self.a))

    def self_convolution(self, u: ArrayLike) -> np.ndarray:
        """(K_a * K_a)(u) = [N(-2a, 2) + 2 N(0, 2) + N(2a, 2)](u) / 4."""
        u = np.asarray(u, dtype=float)
        # outer pair summed first so the value is exactly even in u
        outer = _gauss(u, -2.0 * self.a, 2.0) + _gauss(u, 2.0 * self.a, 2.0)
        return 0.25 * (outer + 2.0 * _gauss(u, 0.0, 2.0))

    def describe(self) -> Dict[str, Any]:
        return {"base": "K_a", "a": self.a}


def gaussian() -> TwoBumpGaussian:
    """The Gaussian kernel, i.e. K_a with a = 0."""
    return TwoBumpGaussian(0.0)


# ---------------------------------------------------------------------------
# Orthonormal bases of L2([0, 1])
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegularHistogram:
    """
    Regular histogram basis phi_i = sqrt(D) 1_[(i-1)/D, i/D) on [0, 1].

    The last bin is closed so that the bins partition [0, 1].
    """
    dimension: int

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ConfigurationError(f"Histogram dimension must be a positive integer, got {self.dimension}")

    @property
    def size(self) -> int:
        return int(self.dimension)

    def bin_index(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        # bins are half-open on the right, so a point on an edge opens the next bin
        idx = np.searchsorted(self.edges(), x, side="right") - 1
        return np.asarray(np.clip(idx, 0, self.dimension - 1), dtype=np.int64)

    def functions(self, x: ArrayLike) -> np.ndarray:
        """Basis values with shape x.shape + (D,)."""
        idx = self.bin_index(x)
        return math.sqrt(self.dimension) * (idx[..., None] == np.arange(self.dimension)).astype(float)

    def weighted_product(self, x: np.ndarray, y: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """sum_i w_i phi_i(x) phi_i(y)."""
        ix = self.bin_index(x)
        iy = self.bin_index(y)
        return np.where(ix == iy, self.dimension * weights[ix], 0.0)

    def diagonal_is_constant(self, weights: np.ndarray) -> bool:
        return bool(np.all(weights == weights[0]))

    def sup_diagonal(self, weights: Optional[np.ndarray] = None) -> float:
        """sup_x sum_i w_i phi_i(x)^2 (unit weights when omitted)."""
        if weights is None:
            return float(self.dimension)
        return float(self.dimension * np.max(weights))

    def edges(self) -> np.ndarray:
        return np.arange(self.dimension + 1) / self.dimension

    def breakpoints(self) -> Optional[np.ndarray]:
        return self.edges()[1:-1]

    def feature_scale(self) -> float:
        return 1.0 / self.dimension

    def coefficients(self, density, **quad) -> np.ndarray:
        """<phi_i, s> = sqrt(D) P(bin i), exact through the density's CDF."""
        edges = self.edges()
        masses = np.diff(density.cdf(edges))
        return math.sqrt(self.dimension) * masses

    def squared_means(self, density, **quad) -> np.ndarray:
        """P(phi_i^2) = D P(bin i)."""
        return self.dimension * np.diff(density.cdf(self.edges()))

    def describe(self) -> Dict[str, Any]:
        return {"basis": "histogram", "D": int(self.dimension)}


@dataclass(frozen=True)
class FourierPaired:
    """
    Trigonometric basis on [0, 1] with paired weights.

    phi_0 = 1, phi_{2j-1} = sqrt(2) cos(2 pi j x), phi_{2j} = sqrt(2) sin(2 pi j x)
    for j = 1..(p-1)/2. The weights attached to the basis are w0 for phi_0 and
    tau_j for both members of pair j. An empty ``tau`` means all ones.
    """
    p: int
    w0: float = 1.0
    tau: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1 or self.p % 2 == 0:
            raise ConfigurationError(f"Fourier basis size p must be an odd positive integer, got {self.p}")
        tau = tuple(float(t) for t in self.tau)
        if not tau and self.p > 1:
            tau = (1.0,) * (self.p // 2)
        object.__setattr__(self, 'tau', tau)
        if len(tau) != self.p // 2:
            raise ConfigurationError(f"tau must have {self.p // 2} entries for p={self.p}, got {len(tau)}")
        for value in (self.w0,) + tau:
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"Fourier weights must lie in [0, 1], got {value}")

    @property
    def size(self) -> int:
        return int(self.p)

    @property
    def pairs(self) -> int:
        return int(self.p) // 2

    def functions(self, x: ArrayLike) -> np.ndarray:
        """Basis values with shape x.shape + (p,)."""
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape + (self.size,))
        out[..., 0] = 1.0
        for j in range(1, self.pairs + 1):
            angle = 2.0 * math.pi * j * x
            out[..., 2 * j - 1] = math.sqrt(2.0) * np.cos(angle)
            out[..., 2 * j] = math.sqrt(2.0) * np.sin(angle)
        return out

    def paired_weights(self) -> np.ndarray:
        weights = np.empty(self.size)
        weights[0] = self.w0
        weights[1::2] = self.tau
        weights[2::2] = self.tau
        return weights

    def weighted_product(self, x: np.ndarray, y: np.ndarray, weights: np.ndarray) -> np.ndarray:
        return np.sum(weights * (self.functions(x) * self.functions(y)), axis=-1)

    def diagonal_is_constant(self, weights: np.ndarray) -> bool:
        # cos^2 + sin^2 = 1 only when both members of every pair share a weight
        return bool(np.all(weights[1::2] == weights[2::2]))

    def sup_diagonal(self, weights: Optional[np.ndarray] = None) -> float:
        """sup_x sum_i w_i phi_i(x)^2 (unit weights when omitted)."""
        if weights is None:
            return float(self.size)
        if self.diagonal_is_constant(weights):
            return float(np.sum(weights))
        grid = np.linspace(0.0, 1.0, 64 * self.size + 1)
        return float(np.max(np.sum(weights * self.functions(grid) ** 2, axis=-1)))

    def breakpoints(self) -> Optional[np.ndarray]:
        return None

    def feature_scale(self) -> float:
        return 1.0 / max(self.pairs, 1)

    def coefficients(self, density, **quad) -> np.ndarray:
        """<phi_i, s> by quadrature over [0, 1]."""
        return np.array([
            integrate(lambda t, i=i: self.functions(t)[..., i] * density.pdf(t), 0.0, 1.0,
                      max_panel=self.feature_scale(), **interval_settings(quad))
            for i in range(self.size)
        ])

    def squared_means(self, density, **quad) -> np.ndarray:
        """P(phi_i^2) by quadrature over [0, 1]."""
        return np.array([
            integrate(lambda t, i=i: self.functions(t)[..., i] ** 2 * density.pdf(t), 0.0, 1.0,
                      max_panel=self.feature_scale(), **interval_settings(quad))
            for i in range(self.size)
        ])

    def describe(self) -> Dict[str, Any]:
        return {"basis": "fourier", "p": int(self.p), "w0": self.w0, "tau": list(self.tau)}


BasisSpec = Union[RegularHistogram, FourierPaired]


# ---------------------------------------------------------------------------
# Kernel models
# ---------------------------------------------------------------------------

class KernelModel(ABC):
    """
    A symmetric kernel k generating the estimator s_hat_k(x) = mean_i k(X_i, x).

    Subclasses provide vectorized ``evaluate`` and ``a``; ``chi`` and ``theta``
    are their diagonals, so theta(x) == a(x, x) holds bit for bit.
    """

    variant = "kernel"

    @property
    @abstractmethod
    def domain(self) -> Optional[Tuple[float, float]]:
        """(lo, hi) for kernels on an interval, None for the real line."""

    def check_points(self, *points: ArrayLike) -> List[np.ndarray]:
        """
        Convert evaluation points to float arrays and check them against the domain.

        Raises:
            InputDomainError: If a point is not finite or lies outside the domain
        """
        arrays = []
        for point in points:
            arr = np.asarray(point, dtype=float)
            if not np.all(np.isfinite(arr)):
                raise InputDomainError("evaluation points must be finite")
            if self.domain is not None:
                lo, hi = self.domain
                if np.any(arr < lo) or np.any(arr > hi):
                    raise InputDomainError(
                        f"{self.variant} kernels are defined on [{lo:g}, {hi:g}]; got points outside it"
                    )
            arrays.append(arr)
        return arrays

    @abstractmethod
    def evaluate(self, x: ArrayLike, y: ArrayLike) -> np.ndarray:
        """k(x, y), broadcasting x against y."""

    @abstractmethod
    def a(self, x: ArrayLike, y: ArrayLike) -> np.ndarray:
        """A_k(x, y) = int k(x, z) k(z, y) dz, broadcasting x against y."""

    def chi(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.evaluate(x, x)

    def theta(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.a(x, x)

    @abstractmethod
    def constant_chi(self) -> Optional[float]:
        """The value of chi_k when it does not depend on x, else None."""

    @abstractmethod
    def constant_theta(self) -> Optional[float]:
        """The value of Theta_k when it does not depend on x, else None."""

    @abstractmethod
    def sup_kernel(self) -> float:
        """sup_{x,y} |k(x, y)|."""

    @abstractmethod
    def sup_theta(self) -> float:
        """sup_x Theta_k(x)."""

    @abstractmethod
    def parameter(self) -> float:
        """The smoothing parameter reported for a selection (h, D or the weight sum)."""

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """Family parameters as a JSON-friendly dict."""

    def breakpoints(self) -> Optional[np.ndarray]:
        return None

    @abstractmethod
    def feature_scale(self) -> float:
        """Narrowest width of the kernel's features, used to size quadrature panels."""

    def label(self) -> str:
        parts = []
        for key, value in self.describe().items():
            if key in ("variant", "basis", "base"):
                continue
            if isinstance(value, (list, tuple)):
                value = "|".join(f"{v:g}" for v in value)
            elif isinstance(value, float):
                value = f"{value:g}"
            parts.append(f"{key}={value}")
        return ";".join(parts)


class _BasisKernel(KernelModel):
    """Shared code of projection and weighted projection kernels."""

    basis: BasisSpec

    @property
    def domain(self) -> Optional[Tuple[float, float]]:
        return UNIT_INTERVAL

    def weight_vector(self) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, x: ArrayLike, y: ArrayLike) -> np.ndarray:
        x, y = self.check_points(x, y)
        x, y = np.broadcast_arrays(x, y)
        return self.basis.weighted_product(x, y, self.weight_vector())

    def a(self, x: ArrayLike, y: ArrayLike) -> np.ndarray:
        # A_k = sum_i w_i^2 phi_i(x) phi_i(y) by orthonormality
        x, y = self.check_points(x, y)
        x, y = np.broadcast_arrays(x, y)
        return self.basis.weighted_product(x, y, self.weight_vector() ** 2)

    def constant_chi(self) -> Optional[float]:
        weights = self.weight_vector()
        if not self.basis.diagonal_is_constant(weights):
            return None
        return float(np.sum(weights))

    def constant_theta(self) -> Optional[float]:
        weights = self.weight_vector() ** 2
        if not self.basis.diagonal_is_constant(weights):
            return None
        return float(np.sum(weights))

    def sup_kernel(self) -> float:
        # |k(x,y)| <= sqrt(chi(x) chi(y)) for non-negative weights
        return self.basis.sup_diagonal(self.weight_vector())

    def sup_theta(self) -> float:
        return self.basis.sup_diagonal(self.weight_vector() ** 2)

    def breakpoints(self) -> Optional[np.ndarray]:
        return self.basis.breakpoints()

    def feature_scale(self) -> float:
        return self.basis.feature_scale()


@dataclass(frozen=True)
class ProjectionKernel(_BasisKernel):
    """k_S(x, y) = sum_l phi_l(x) phi_l(y) over an orthonormal basis of S."""
    basis: BasisSpec

    variant = "projection"

    def weight_vector(self) -> np.ndarray:
        return np.ones(self.basis.size)

    def parameter(self) -> float:
        return float(self.basis.size)

    def describe(self) -> Dict[str, Any]:
        described = {"variant": self.variant}
        described.update(self.basis.describe())
        if isinstance(self.basis, FourierPaired):
            described = {"variant": self.variant, "basis": "fourier", "p": int(self.basis.p)}
        return described


@dataclass(frozen=True)
class WeightedProjectionKernel(_BasisKernel):
    """
    k_w(x, y) = sum_i w_i phi_i(x) phi_i(y) with weights in [0, 1].

    For a Fourier basis the weights default to its paired weights (w0, tau_j, tau_j, ...).
    """
    basis: BasisSpec
    weights: Optional[Tuple[float, ...]] = None

    variant = "weighted"

    def __post_init__(self):
        weights = self.weights
        if weights is None:
            if not isinstance(self.basis, FourierPaired):
                raise ConfigurationError("weights are required for a weighted histogram kernel")
            weights = tuple(self.basis.paired_weights().tolist())
        weights = tuple(float(w) for w in weights)
        if len(weights) != self.basis.size:
            raise ConfigurationError(
                f"weight vector has {len(weights)} entries but the basis has {self.basis.size} functions"
            )
        if any(not 0.0 <= w <= 1.0 for w in weights):
            raise ConfigurationError("weights must lie in [0, 1]")
        object.__setattr__(self, 'weights', weights)

    def weight_vector(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def parameter(self) -> float:
        return float(np.sum(self.weight_vector()))

    def describe(self) -> Dict[str, Any]:
        described = {"variant": self.variant}
        if isinstance(self.basis, FourierPaired):
            described.update({"basis": "fourier", "p": int(self.basis.p), "w0": self.weights[0],
                              "tau": list(self.weights[1::2])})
        else:
            described.update(self.basis.describe())
            described["weights"] = list(self.weights)
        return described


@dataclass(frozen=True)
class ParzenKernel(KernelModel):
    """k_{K,h}(x, y) = K((x - y) / h) / h on the real line."""
    base: TwoBumpGaussian
    h: float

    variant = "parzen"

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0):
            raise ConfigurationError(f"bandwidth h must be positive, got {self.h}")

    @property
    def domain(self) -> Optional[Tuple[float, float]]:
        return None

    def evaluate(self, x: ArrayLike, y: ArrayLike) -> np.ndarray:
        x, y = self.check_points(x, y)
        return self.base((x - y) / self.h) / self.h

    def a(self, x: ArrayLike, y: ArrayLike) -> np.ndarray:
        x, y = self.check_points(x, y)
        return self.base.self_convolution((x - y) / self.h) / self.h

    def constant_chi(self) -> Optional[float]:
        return self.base.at_zero() / self.h

    def constant_theta(self) -> Optional[float]:
        return self.base.l2_norm_sq() / self.h

    def sup_kernel(self) -> float:
        return self.base.sup_norm() / self.h

    def sup_theta(self) -> float:
        return self.base.l2_norm_sq() / self.h

    def parameter(self) -> float:
        return float(self.h)

    def describe(self) -> Dict[str, Any]:
        return {"variant": self.variant, "a": self.base.a, "h": self.h}

    def feature_scale(self) -> float:
        return float(self.h)


# ---------------------------------------------------------------------------
# Pointwise operations
# ---------------------------------------------------------------------------

def _scalar_or_array(value: np.ndarray, *inputs: ArrayLike):
    if all(np.ndim(i) == 0 for i in inputs):
        return float(value)
    return value


def kernel_eval(k: KernelModel, x: ArrayLike, y: ArrayLike):
    """k(x, y); a float for scalar inputs, an array otherwise."""
    return _scalar_or_array(k.evaluate(x, y), x, y)


def chi_eval(k: KernelModel, x: ArrayLike):
    """chi_k(x) = k(x, x)."""
    return _scalar_or_array(k.chi(x), x)


def a_eval(k: KernelModel, x: ArrayLike, y: ArrayLike):
    """A_k(x, y) in closed form."""
    return _scalar_or_array(k.a(x, y), x, y)


def theta_eval(k: KernelModel, x: ArrayLike):
    """Theta_k(x) = A_k(x, x)."""
    return _scalar_or_array(k.theta(x), x)


def a_by_quadrature(k: KernelModel, x: float, y: float, **quad) -> float:
    """
    A_k(x, y) = int k(x, z) k(z, y) dz by numeric quadrature.

    Cross-check path for the closed forms used by ``a_eval``.
    """
    x, y = (float(v) for v in k.check_points(x, y))
    integrand = lambda z: k.evaluate(x, z) * k.evaluate(z, y)
    if k.domain is not None:
        lo, hi = k.domain
        return integrate(integrand, lo, hi, breakpoints=k.breakpoints(),
                         max_panel=k.feature_scale(), **interval_settings(quad))
    return integrate_real_line(integrand, [x, y], k.feature_scale(), **quad)


def l2_norm_sq_by_quadrature(base: TwoBumpGaussian, **quad) -> float:
    """int K_a(u)^2 du by quadrature over the real line."""
    return integrate_real_line(lambda u: base(u) ** 2, [-base.a, base.a], 1.0, **quad)


def optimal_to_minimal_ratio(k: KernelModel) -> float:
    """
    Ratio of the optimal penalty 2 P chi_k / n to the minimal one (2 P chi_k - P Theta_k) / n.

    Equals 2 for projection kernels and 2 K(0) / (2 K(0) - ||K||^2) for
    Parzen kernels; infinite when the minimal penalty vanishes.
    """
    chi = k.constant_chi()
    theta = k.constant_theta()
    if chi is None or theta is None:
        raise ConfigurationError("the ratio needs constant chi and Theta")
    minimal = 2.0 * chi - theta
    if minimal == 0.0:
        return math.inf
    return 2.0 * chi / minimal


# ---------------------------------------------------------------------------
# Family constants
# ---------------------------------------------------------------------------

def family_variant(family: Sequence[KernelModel]) -> str:
    """
    The common variant of a family.

    Raises:
        ConfigurationError: If the family is empty or mixes variants
    """
    if not family:
        raise ConfigurationError("kernel family is empty")
    variants = {k.variant for k in family}
    if len(variants) != 1:
        raise ConfigurationError(f"kernel family mixes variants: {sorted(variants)}")
    return variants.pop()


def gamma_bound(family: Sequence[KernelModel], n: int) -> GammaReport:
    """
    A constant Gamma >= 1 with sup Theta_k and sup |k| at most Gamma n over the family.

    Projection and weighted projection families use Gamma = 1 v sup_x sum phi_i(x)^2 / n.
    Parzen families use Gamma = 1, which is valid when every h >= ||K||_inf ||K||_1 / n.

    Args:
        family: Homogeneous list of kernels
        n: Sample size

    Returns:
        A GammaReport
    """
    variant = family_variant(family)
    if n < 1:
        raise ConfigurationError("sample size must be positive")

    sup_kernel = max(k.sup_kernel() for k in family)
    sup_theta = max(k.sup_theta() for k in family)
    detail: Dict[str, Any] = {"sup_kernel": sup_kernel, "sup_theta": sup_theta, "n": int(n)}

    if variant == "parzen":
        gamma = 1.0
        # Gamma = 1 needs every bandwidth above its threshold
        thresholds = [k.base.sup_norm() * k.base.l1_norm() / n for k in family]
        condition = all(k.h >= t for k, t in zip(family, thresholds))
        detail["min_bandwidth"] = min(k.h for k in family)
        detail["bandwidth_threshold"] = max(thresholds)
    else:
        # unit-weight diagonal bounds both sup |k| and sup Theta_k
        sup_basis = max(k.basis.sup_diagonal() for k in family)
        gamma = max(1.0, sup_basis / n)
        condition = max(sup_kernel, sup_theta) <= gamma * n
        detail["sup_basis_diagonal"] = sup_basis

    logger.debug(f"Gamma for {len(family)} {variant} kernels at n={n}: {gamma}")
    return GammaReport(gamma=gamma, condition_holds=bool(condition), detail=detail)


def upsilon_bound(family: Sequence[KernelModel], density, n: Optional[int] = None) -> UpsilonReport:
    """
    Lower bound on the Upsilon constant of a family for a known density.

    Projection and weighted projection kernels: Gamma (1 + ||s||_inf).
    Parzen kernels: max over K of K(0) / ||K||^2 v (1 + 2 ||s||_inf ||K||_1^2).

    Args:
        family: Homogeneous list of kernels
        density: A KnownDensity (oracle mode)
        n: Sample size used for Gamma; when omitted Gamma is taken as 1

    Returns:
        An UpsilonReport

    Raises:
        UnsupportedDensityError: If the density is unbounded
    """
    variant = family_variant(family)
    sup_s = density.sup_norm
    if sup_s is None or not math.isfinite(sup_s):
        raise UnsupportedDensityError(f"density {density.name} is not bounded")

    components: Dict[str, float] = {"sup_norm": sup_s}
    if variant == "parzen":
        lower = 0.0
        for base in sorted({k.base for k in family}, key=lambda b: b.a):
            ratio = base.at_zero() / base.l2_norm_sq()
            spread = 1.0 + 2.0 * sup_s * base.l1_norm() ** 2
            components[f"K(0)/||K||^2[a={base.a:g}]"] = ratio
            components[f"1+2||s||_inf||K||_1^2[a={base.a:g}]"] = spread
            lower = max(lower, ratio, spread)
        gamma = 1.0
    else:
        if n is None:
            gamma = 1.0
            components["gamma_assumed"] = 1.0
        else:
            gamma = gamma_bound(family, n).gamma
        # projection-family form Gamma (1 + ||s||_inf)
        lower = gamma * (1.0 + sup_s)
    components["gamma"] = gamma
    return UpsilonReport(upsilon_lower=lower, components=components)


# ---------------------------------------------------------------------------
# Family builders
# ---------------------------------------------------------------------------

def reciprocal_bandwidth_grid(count: int = 50) -> List[float]:
    """The bandwidth grid {1/(2i), i = 1..count}."""
    return [1.0 / (2 * i) for i in range(1, count + 1)]


def parzen_family(a: float, bandwidths: Sequence[float]) -> List[ParzenKernel]:
    base = TwoBumpGaussian(float(a))
    return [ParzenKernel(base, float(h)) for h in bandwidths]


def histogram_family(dimensions: Sequence[int]) -> List[ProjectionKernel]:
    return [ProjectionKernel(RegularHistogram(int(d))) for d in dimensions]


def fourier_cutoff_family(p: int) -> List[WeightedProjectionKernel]:
    """Nested Fourier kernels: w0 = 1 and tau_j = 1 for j <= m, 0 otherwise, m = 0..(p-1)/2."""
    pairs = p // 2
    return [
        WeightedProjectionKernel(FourierPaired(p, 1.0, tuple(1.0 if j < m else 0.0 for j in range(pairs))))
        for m in range(pairs + 1)
    ]


def fourier_weighted_family(p: int, taus: Sequence[Sequence[float]], w0: float = 1.0) -> List[WeightedProjectionKernel]:
    return [WeightedProjectionKernel(FourierPaired(p, w0, tuple(tau))) for tau in taus]
