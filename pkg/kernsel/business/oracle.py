"""
Oracle-mode diagnostics against a known density s.

With s known, every deterministic functional of a kernel k is available:

    s_k(x) = int k(y, x) s(y) dy          smoothed density
    F_k(x) = int A_k(x, y) s(y) dy         = int k(z, x) s_k(z) dz
    bias   = ||s - s_k||^2,  variance term = P Theta_k / n.

Closed forms are used where they exist (Parzen kernels through Gaussian
smoothing of the density, basis kernels through the density's basis
coefficients); quadrature covers the rest and provides the cross-checks.
"""
from dataclasses import dataclass
from functools import lru_cache
import math
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..dal.models import OracleReport, Sample, UStatDecomposition
from ..errors import ConfigurationError, DataError
from ..utils.logger import get_logger
from ..utils.quadrature import integrate, integrate_real_line, interval_settings
from .criterion import CriterionTable, _as_sample, double_sum, estimate_at, pair_sums
from .densities import KnownDensity, StdGaussian, Triangular2x, get_density
from .kernels import (ArrayLike, KernelModel, ParzenKernel, RegularHistogram, gamma_bound,
                      upsilon_bound)

logger = get_logger(__name__)

RISK_METHODS = ("quadrature", "analytic")


def check_compatible(k: KernelModel, density: KnownDensity) -> None:
    """
    Raises:
        ConfigurationError: If a basis kernel on [0, 1] is paired with a density outside [0, 1]
    """
    if k.domain is not None and not density.within_unit_interval():
        raise ConfigurationError(
            f"{k.variant} kernels live on [0, 1] but density {density.name} is not supported there"
        )


# ---------------------------------------------------------------------------
# Deterministic functionals of (k, s)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _basis_coefficients(basis, density_name: str, quad_items: tuple) -> np.ndarray:
    coefficients = basis.coefficients(get_density(density_name), **dict(quad_items))
    coefficients.setflags(write=False)
    return coefficients


def basis_coefficients(k: KernelModel, density: KnownDensity, **quad) -> np.ndarray:
    """<phi_i, s> for the basis of a projection or weighted kernel."""
    return _basis_coefficients(k.basis, density.name, tuple(sorted(quad.items())))


@dataclass(frozen=True)
class SmoothedDensity:
    """
    s_k and F_k as vectorized callables, with ||s_k||^2 = E A_k(X, Y) and P s_k.
    """
    s_k: Callable[[np.ndarray], np.ndarray]
    f_a: Callable[[np.ndarray], np.ndarray]
    norm_sq: float
    p_s_k: float


def _unit_interval_l2(f, k: KernelModel, density: KnownDensity, **quad) -> float:
    points = set(density.breakpoints())
    if k.breakpoints() is not None:
        points.update(float(p) for p in k.breakpoints())
    return integrate(lambda x: f(x) ** 2, 0.0, 1.0, breakpoints=sorted(points),
                     max_panel=k.feature_scale(), **interval_settings(quad))


def _real_line_integral(f, k: KernelModel, density: KnownDensity, anchors: Sequence[float] = (),
                        **quad) -> float:
    scale = min(k.feature_scale(), density.scale)
    points = list(density.breakpoints())
    base = [density.center - 8 * density.scale, density.center + 8 * density.scale]
    if density.support is not None:
        base = list(density.support)
    return integrate_real_line(f, base + list(anchors), scale, breakpoints=points or None, **quad)


def _parzen_components(k: ParzenKernel):
    a, h = k.base.a, k.h
    smoothing = ((0.5, a * h), (0.5, -a * h))
    composition = ((0.25, 2.0 * a * h), (0.5, 0.0), (0.25, -2.0 * a * h))
    return smoothing, composition


def smoothed(k: KernelModel, density: KnownDensity, **quad) -> SmoothedDensity:
    """
    Build s_k, F_k, ||s_k||^2 and P s_k for a (kernel, density) pair.

    Raises:
        ConfigurationError: If the pair is incompatible
    """
    check_compatible(k, density)
    if isinstance(k, ParzenKernel):
        smoothing, composition = _parzen_components(k)
        h2 = k.h ** 2

        def s_k(x):
            x = np.asarray(x, dtype=float)
            return sum(w * density.gaussian_smoothing(x + shift, h2) for w, shift in smoothing)

        def f_a(x):
            x = np.asarray(x, dtype=float)
            return sum(w * density.gaussian_smoothing(x + shift, 2.0 * h2) for w, shift in composition)

        if isinstance(density, StdGaussian):
            v = 2.0 + 2.0 * h2
            norm_sq = 0.5 * (_normal_at(0.0, v) + _normal_at(2.0 * k.base.a * k.h, v))
            p_s_k = _normal_at(k.base.a * k.h, 2.0 + h2)
        else:
            norm_sq = _real_line_integral(lambda x: s_k(x) ** 2, k, density, **quad)
            p_s_k = density.expectation(s_k, scale=k.h, **quad)
        return SmoothedDensity(s_k, f_a, float(norm_sq), float(p_s_k))

    coefficients = basis_coefficients(k, density, **quad)
    weights = k.weight_vector()
    s_weights = weights * coefficients
    f_weights = weights ** 2 * coefficients
    basis = k.basis

    def s_k(x):
        return basis.functions(x) @ s_weights

    def f_a(x):
        return basis.functions(x) @ f_weights

    return SmoothedDensity(s_k, f_a, float(np.sum(f_weights * coefficients)),
                           float(np.sum(s_weights * coefficients)))


def _normal_at(x: float, var: float) -> float:
    return math.exp(-x * x / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)


def smoothed_density(k: KernelModel, density: KnownDensity, x: ArrayLike, **quad):
    """
    s_k(x) = int k(y, x) s(y) dy.

    Returns:
        A float for scalar x, an array otherwise
    """
    (x_arr,) = k.check_points(x)
    value = smoothed(k, density, **quad).s_k(x_arr)
    return float(value) if x_arr.ndim == 0 else np.asarray(value)


def smoothed_density_by_quadrature(k: KernelModel, density: KnownDensity, x: float, **quad) -> float:
    """s_k(x) by direct quadrature of k(y, x) s(y); cross-check path."""
    check_compatible(k, density)
    (x,) = (float(v) for v in k.check_points(x))
    return density.expectation(lambda y: k.evaluate(y, x), scale=k.feature_scale(), anchors=[x],
                               breakpoints=k.breakpoints() if k.breakpoints() is not None else (),
                               **quad)


def bias(k: KernelModel, density: KnownDensity, method: str = "analytic", **quad) -> float:
    """
    ||s - s_k||^2.

    The analytic path is ||s||^2 - 2 P s_k + ||s_k||^2, with the exact value
    1 / (3 D^2) for regular histograms under s(x) = 2x. The quadrature path
    integrates (s - s_k)^2 directly.
    """
    check_compatible(k, density)
    if method == "quadrature":
        sm = smoothed(k, density, **quad)
        diff = lambda x: density.pdf(x) - sm.s_k(x)
        if k.domain is not None:
            return _unit_interval_l2(diff, k, density, **quad)
        return _real_line_integral(lambda x: diff(x) ** 2, k, density, **quad)
    if method != "analytic":
        raise ConfigurationError(f"unknown bias method {method!r}")
    if (k.variant == "projection" and isinstance(k.basis, RegularHistogram)
            and isinstance(density, Triangular2x)):
        return 1.0 / (3.0 * k.basis.dimension ** 2)
    sm = smoothed(k, density, **quad)
    return float(density.l2_norm_sq - 2.0 * sm.p_s_k + sm.norm_sq)


def variance_functional(k: KernelModel, density: KnownDensity, **quad) -> float:
    """
    P Theta_k = int Theta_k s; the variance term is this divided by n.
    """
    check_compatible(k, density)
    theta = k.constant_theta()
    if theta is not None:
        return float(theta)
    return density.expectation(k.theta, scale=k.feature_scale(),
                               breakpoints=k.breakpoints() if k.breakpoints() is not None else (),
                               **quad)


def chi_mean(k: KernelModel, density: KnownDensity, **quad) -> float:
    """P chi_k."""
    chi = k.constant_chi()
    if chi is not None:
        return float(chi)
    return density.expectation(k.chi, scale=k.feature_scale(),
                               breakpoints=k.breakpoints() if k.breakpoints() is not None else (),
                               **quad)


# ---------------------------------------------------------------------------
# Sample-dependent quantities
# ---------------------------------------------------------------------------

def _l2_distance_sq(f, g, k: KernelModel, density: KnownDensity, values: np.ndarray, **quad) -> float:
    diff = lambda x: f(x) - g(x)
    if k.domain is not None:
        return _unit_interval_l2(diff, k, density, **quad)
    return _real_line_integral(lambda x: diff(x) ** 2, k, density, anchors=values, **quad)


def _estimator(k: KernelModel, sample: Sample):
    return lambda x: estimate_at(k, sample, np.asarray(x, dtype=float))


def true_risk(k: KernelModel, sample, density: KnownDensity, method: str = "quadrature",
              **quad) -> float:
    """
    ||s_hat_k - s||^2.

    Args:
        method: "quadrature" integrates the squared error; "analytic" uses
            ||s_hat_k||^2 - 2 (1/n) sum_i s_k(X_i) + ||s||^2 with the exact double sum

    Raises:
        ConfigurationError: On an unknown method or an incompatible pair
    """
    sample = _as_sample(sample)
    check_compatible(k, density)
    if method == "analytic":
        sm = smoothed(k, density, **quad)
        norm_sq = double_sum(k.a, sample.values) / sample.n ** 2
        return float(norm_sq - 2.0 * np.mean(sm.s_k(sample.values)) + density.l2_norm_sq)
    if method != "quadrature":
        raise ConfigurationError(f"unknown risk method {method!r}; expected one of {RISK_METHODS}")
    return _l2_distance_sq(_estimator(k, sample), density.pdf, k, density, sample.values, **quad)


def estimation_error(k: KernelModel, sample, density: KnownDensity, **quad) -> float:
    """||s_hat_k - s_k||^2 by quadrature."""
    sample = _as_sample(sample)
    sm = smoothed(k, density, **quad)
    return _l2_distance_sq(_estimator(k, sample), sm.s_k, k, density, sample.values, **quad)


def cross_term(k: KernelModel, sample, density: KnownDensity, **quad) -> float:
    """2 <s_hat_k - s_k, s_k - s> by quadrature."""
    sample = _as_sample(sample)
    sm = smoothed(k, density, **quad)
    estimator = _estimator(k, sample)
    integrand = lambda x: 2.0 * (estimator(x) - sm.s_k(x)) * (sm.s_k(x) - density.pdf(x))
    if k.domain is not None:
        points = set(density.breakpoints())
        if k.breakpoints() is not None:
            points.update(float(p) for p in k.breakpoints())
        return integrate(integrand, 0.0, 1.0, breakpoints=sorted(points),
                         max_panel=k.feature_scale(), **interval_settings(quad))
    return _real_line_integral(integrand, k, density, anchors=sample.values, **quad)


def family_true_risks(table: CriterionTable, sample, density: KnownDensity, **quad) -> np.ndarray:
    """
    Analytic true risk of every kernel of a criterion table, reusing its double sums.
    """
    sample = _as_sample(sample)
    risks = np.empty(table.size)
    for index, k in enumerate(table.family):
        sm = smoothed(k, density, **quad)
        risks[index] = (table.norm_sq_estimate[index] - 2.0 * np.mean(sm.s_k(sample.values))
                        + density.l2_norm_sq)
    return risks


def ideal_penalty(k: KernelModel, sample, density: KnownDensity, **quad) -> float:
    """
    2 (P_n - P)(s_hat_k) = 2 [P_n s_hat_k - P s_hat_k], with
    P_n s_hat_k = (1/n^2) sum_{i,j} k(X_i, X_j) and P s_hat_k = (1/n) sum_i s_k(X_i).
    """
    sample = _as_sample(sample)
    sm = smoothed(k, density, **quad)
    pn_estimate = double_sum(k.evaluate, sample.values) / sample.n ** 2
    p_estimate = float(np.mean(sm.s_k(sample.values)))
    return 2.0 * (pn_estimate - p_estimate)


def ideal_penalty_expansion(k: KernelModel, sample, density: KnownDensity, **quad) -> float:
    """
    The ideal penalty rebuilt from its centered pieces:

        2 [ (P chi - P s_k)/n + (P_n - P) chi / n + U_k / n^2 + (1 - 2/n)(P_n - P) s_k ]

    with U_k = sum_{i != j} [k(X_i, X_j) - s_k(X_i) - s_k(X_j) + P s_k].
    """
    sample = _as_sample(sample)
    n = sample.n
    values = sample.values
    sm = smoothed(k, density, **quad)
    p_chi = chi_mean(k, density, **quad)
    pn_chi = float(np.mean(k.chi(values)))
    s_k_values = sm.s_k(values)
    _, upper = pair_sums(k.evaluate, values)
    u_k = 2.0 * upper - 2.0 * (n - 1) * float(np.sum(s_k_values)) + n * (n - 1) * sm.p_s_k
    pn_s_k = float(np.mean(s_k_values))
    return 2.0 * ((p_chi - sm.p_s_k) / n + (pn_chi - p_chi) / n + u_k / n ** 2
                  + (1.0 - 2.0 / n) * (pn_s_k - sm.p_s_k))


def ustat_decomposition(k: KernelModel, sample, density: KnownDensity, method: str = "auto",
                        **quad) -> UStatDecomposition:
    """
    ||s_k - s_hat_k||^2 = (1/n) P_n zeta_k + (1/n^2) U_{A,k}.

    zeta_k(x) = Theta_k(x) - 2 F_k(x) + ||s_k||^2 and
    U_{A,k} = sum_{i != j} [A_k(X_i, X_j) - F_k(X_i) - F_k(X_j) + E A_k(X, Y)].

    The left side is always integrated numerically. With method "auto", F_k
    and E A_k = ||s_k||^2 come from closed forms; with "quadrature", F_k at
    the sample points and ||s_k||^2 are integrated numerically too.

    Raises:
        DataError: If n < 2
    """
    sample = _as_sample(sample)
    n = sample.n
    if n < 2:
        raise DataError("the U-statistic decomposition needs at least two observations")
    values = sample.values
    sm = smoothed(k, density, **quad)

    if method == "auto":
        f_values = sm.f_a(values)
        e_a = sm.norm_sq
    elif method == "quadrature":
        breakpoints = k.breakpoints() if k.breakpoints() is not None else ()
        f_values = np.array([
            density.expectation(lambda y, x=x: k.a(x, y), scale=k.feature_scale(), anchors=[x],
                                breakpoints=breakpoints, **quad)
            for x in values
        ])
        if k.domain is not None:
            e_a = _unit_interval_l2(sm.s_k, k, density, **quad)
        else:
            e_a = _real_line_integral(lambda x: sm.s_k(x) ** 2, k, density, **quad)
    else:
        raise ConfigurationError(f"unknown decomposition method {method!r}")

    lhs = estimation_error(k, sample, density, **quad)
    pn_zeta = float(np.mean(k.theta(values)) - 2.0 * np.mean(f_values) + e_a)
    _, upper = pair_sums(k.a, values)
    u_stat = 2.0 * upper - 2.0 * (n - 1) * float(np.sum(f_values)) + n * (n - 1) * e_a
    pn_zeta_over_n = pn_zeta / n
    u_over_n2 = u_stat / n ** 2
    return UStatDecomposition(lhs=float(lhs), pn_zeta_over_n=pn_zeta_over_n, u_over_n2=u_over_n2,
                              residual=float(lhs - (pn_zeta_over_n + u_over_n2)))


def expected_estimation_error(k: KernelModel, density: KnownDensity, n: int, **quad) -> float:
    """E ||s_hat_k - s_k||^2 = P zeta_k / n = (P Theta_k - ||s_k||^2) / n."""
    sm = smoothed(k, density, **quad)
    return (variance_functional(k, density, **quad) - sm.norm_sq) / n


# ---------------------------------------------------------------------------
# Bernstein annotations
# ---------------------------------------------------------------------------

def bernstein_bound(var_Pf2: float, sup_norm: float, n: int, u: float) -> float:
    """
    sqrt(2 P(f^2) u / n) + ||f||_inf u / (3 n), the deviation scale of (P_n - P) f.

    Raises:
        ConfigurationError: On negative moments, n < 1 or u <= 0
    """
    if not (var_Pf2 >= 0 and sup_norm >= 0):
        raise ConfigurationError("Bernstein bound needs non-negative P(f^2) and sup norm")
    if int(n) != n or n < 1:
        raise ConfigurationError("Bernstein bound needs an integer n >= 1")
    if not u > 0:
        raise ConfigurationError("Bernstein bound needs u > 0")
    return math.sqrt(2.0 * var_Pf2 * u / n) + sup_norm * u / (3.0 * n)


def _evaluation_grid(k: KernelModel, density: KnownDensity) -> np.ndarray:
    if k.domain is not None or density.support is not None:
        lo, hi = k.domain if k.domain is not None else density.support
        if k.domain is None:
            lo, hi = lo - 6 * k.feature_scale(), hi + 6 * k.feature_scale()
    else:
        lo, hi = density.center - 8 * density.scale, density.center + 8 * density.scale
    step = min(k.feature_scale(), density.scale) / 8.0
    return np.linspace(lo, hi, int(math.ceil((hi - lo) / step)) + 1)


def bernstein_annotations(k: KernelModel, density: KnownDensity, n: int, u: float = 1.0,
                          **quad) -> Dict[str, float]:
    """
    Bernstein deviation scales for zeta_k and s_k at level u.

    Suprema are taken on a grid finer than the kernel's features.
    """
    sm = smoothed(k, density, **quad)
    zeta = lambda x: k.theta(x) - 2.0 * sm.f_a(x) + sm.norm_sq
    grid = _evaluation_grid(k, density)
    breakpoints = k.breakpoints() if k.breakpoints() is not None else ()
    p_zeta_sq = density.expectation(lambda x: zeta(x) ** 2, scale=k.feature_scale(),
                                    breakpoints=breakpoints, **quad)
    p_s_k_sq = density.expectation(lambda x: sm.s_k(x) ** 2, scale=k.feature_scale(),
                                   breakpoints=breakpoints, **quad)
    return {
        "bernstein_zeta": bernstein_bound(p_zeta_sq, float(np.max(np.abs(zeta(grid)))), n, u),
        "bernstein_s_k": bernstein_bound(p_s_k_sq, float(np.max(np.abs(sm.s_k(grid)))), n, u)
    }


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def diagnose_kernel(k: KernelModel, sample, density: KnownDensity, *, u: float = 1.0,
                    decomposition: str = "auto", **quad) -> OracleReport:
    """
    All oracle diagnostics of one kernel on one sample.
    """
    sample = _as_sample(sample)
    n = sample.n
    risk = true_risk(k, sample, density, **quad)
    bias_value = bias(k, density, **quad)
    error = estimation_error(k, sample, density, **quad)
    cross = cross_term(k, sample, density, **quad)
    penalty = ideal_penalty(k, sample, density, **quad)
    expansion = ideal_penalty_expansion(k, sample, density, **quad)

    ustat: Optional[UStatDecomposition] = None
    if n >= 2:
        ustat = ustat_decomposition(k, sample, density, method=decomposition, **quad)
    else:
        logger.warning("Skipping the U-statistic decomposition for a single observation")

    report = OracleReport(
        kernel=k.describe(),
        true_risk=risk,
        bias=bias_value,
        variance_term=variance_functional(k, density, **quad) / n,
        ideal_penalty=penalty,
        ustat_residual=ustat.residual if ustat is not None else math.nan,
        cross_term=cross,
        estimation_error=error,
        expansion_defect=risk - (error + bias_value + cross),
        ideal_penalty_expansion_defect=penalty - expansion,
        ustat=ustat,
        bernstein_u=float(u),
        **bernstein_annotations(k, density, n, u, **quad)
    )
    logger.debug(f"Diagnosed {k.label()}: risk={risk:.6g}, residual={report.ustat_residual:.3g}")
    return report


def diagnose(family: Sequence[KernelModel], sample, density: KnownDensity, *, u: float = 1.0,
             decomposition: str = "auto", **quad) -> Dict[str, Any]:
    """
    Oracle diagnostics for a whole family: one report per kernel plus Gamma and Upsilon.

    Returns:
        Dict with keys "density", "n", "gamma", "upsilon" and "kernels"
    """
    sample = _as_sample(sample)
    family = list(family)
    for k in family:
        check_compatible(k, density)
    if family and family[0].domain is not None:
        sample.check_unit_interval()
    gamma = gamma_bound(family, sample.n)
    upsilon = upsilon_bound(family, density, sample.n)
    reports: List[OracleReport] = [
        diagnose_kernel(k, sample, density, u=u, decomposition=decomposition, **quad) for k in family
    ]
    logger.info(f"Diagnosed {len(reports)} kernels against {density.name} (n={sample.n})")
    return {
        "density": density.describe(),
        "n": sample.n,
        "gamma": gamma,
        "upsilon": upsilon,
        "kernels": reports
    }
