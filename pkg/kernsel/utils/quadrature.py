"""
Adaptive composite Gauss-Legendre quadrature.

Integrands are vectorized callables ``f(x: ndarray) -> ndarray``. Each panel
is integrated with a fixed Gauss-Legendre rule; a panel is accepted when the
rule on the whole panel agrees with the sum over its two halves within the
panel's share of the absolute tolerance, otherwise it is bisected.

Integrals over the real line are truncated where the integrand falls below
``tail_ratio`` times its peak.
"""
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

from ..errors import QuadratureError
from .logger import get_logger

logger = get_logger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_NODES = 64
DEFAULT_MAX_DEPTH = 40
DEFAULT_TAIL_RATIO = 1e-16

Integrand = Callable[[np.ndarray], np.ndarray]


@lru_cache(maxsize=8)
def legendre_rule(nodes: int = DEFAULT_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = roots_legendre(nodes)
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel(f: Integrand, a: float, b: float, nodes: int) -> float:
    x, w = legendre_rule(nodes)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    values = np.asarray(f(mid + half * x), dtype=float)
    return float(half * np.dot(w, values))


def _initial_panels(a: float, b: float, breakpoints: Optional[Iterable[float]],
                    max_panel: Optional[float]) -> Sequence[Tuple[float, float]]:
    edges = {a, b}
    if breakpoints is not None:
        edges.update(float(p) for p in breakpoints if a < p < b)
    edges = sorted(edges)
    panels = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        pieces = 1
        if max_panel is not None and max_panel > 0:
            pieces = max(1, int(np.ceil((hi - lo) / max_panel)))
        cuts = np.linspace(lo, hi, pieces + 1)
        panels.extend(zip(cuts[:-1].tolist(), cuts[1:].tolist()))
    return panels


def integrate(f: Integrand, a: float, b: float, *, tol: float = DEFAULT_TOL,
              nodes: int = DEFAULT_NODES, max_depth: int = DEFAULT_MAX_DEPTH,
              breakpoints: Optional[Iterable[float]] = None,
              max_panel: Optional[float] = None) -> float:
    """
    Integrate ``f`` over [a, b] to an absolute tolerance.

    Args:
        f: Vectorized integrand
        a: Lower limit
        b: Upper limit
        tol: Absolute tolerance for the whole interval
        nodes: Gauss-Legendre nodes per panel
        max_depth: Maximum number of bisections of an initial panel
        breakpoints: Points where the integrand may be discontinuous; panels never straddle them
        max_panel: Upper bound on the width of the initial panels

    Returns:
        The integral estimate

    Raises:
        QuadratureError: If a panel still fails the tolerance at max_depth
    """
    if b < a:
        return -integrate(f, b, a, tol=tol, nodes=nodes, max_depth=max_depth,
                          breakpoints=breakpoints, max_panel=max_panel)
    span = b - a
    if span == 0:
        return 0.0

    stack = [(lo, hi, 0, _panel(f, lo, hi, nodes))
             for lo, hi in reversed(_initial_panels(a, b, breakpoints, max_panel))]
    total = 0.0
    while stack:
        lo, hi, depth, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid, nodes)
        right = _panel(f, mid, hi, nodes)
        refined = left + right
        if abs(refined - whole) <= tol * (hi - lo) / span:
            total += refined
            continue
        if depth >= max_depth:
            logger.warning(
                f"Quadrature failed on [{lo:.6g}, {hi:.6g}] after {depth} bisections "
                f"(error estimate {abs(refined - whole):.3g})"
            )
            raise QuadratureError(
                f"quadrature did not converge on [{lo:.6g}, {hi:.6g}] "
                f"to tolerance {tol:g} within {max_depth} bisections"
            )
        stack.append((mid, hi, depth + 1, right))
        stack.append((lo, mid, depth + 1, left))
    return total


def truncation_bounds(f: Integrand, anchors: Sequence[float], scale: float, *,
                      tail_ratio: float = DEFAULT_TAIL_RATIO,
                      max_steps: int = 200) -> Optional[Tuple[float, float]]:
    """
    Find [lo, hi] outside of which ``|f|`` is below ``tail_ratio`` times its peak.

    The integrand is assumed to decay monotonically beyond the anchors, which
    holds for the Gaussian-tailed functions used in this package.

    Args:
        f: Vectorized integrand
        anchors: Points where the integrand's mass lives (sample points, density centers)
        scale: Typical width of the integrand around the anchors
        tail_ratio: Relative cut-off
        max_steps: Maximum outward steps on each side

    Returns:
        (lo, hi), or None if the integrand vanishes at every probe point
    """
    anchors = np.asarray(anchors, dtype=float)
    left, right = float(anchors.min()), float(anchors.max())
    probe = np.linspace(left - 3 * scale, right + 3 * scale, 2001)
    peak = float(np.max(np.abs(f(probe))))
    peak = max(peak, float(np.max(np.abs(f(anchors)))))
    if peak == 0.0:
        return None
    threshold = tail_ratio * peak

    def walk(start: float, direction: float) -> float:
        step = scale
        point = start + direction * step
        for _ in range(max_steps):
            if abs(float(f(np.array([point]))[0])) <= threshold:
                return point
            step *= 1.5
            point += direction * step
        raise QuadratureError("integrand tail does not decay; cannot truncate the real line")

    return walk(left, -1.0), walk(right, 1.0)


def integrate_real_line(f: Integrand, anchors: Sequence[float], scale: float, *,
                        tol: float = DEFAULT_TOL, nodes: int = DEFAULT_NODES,
                        max_depth: int = DEFAULT_MAX_DEPTH,
                        tail_ratio: float = DEFAULT_TAIL_RATIO,
                        breakpoints: Optional[Iterable[float]] = None) -> float:
    """
    Integrate a rapidly decaying ``f`` over the real line.

    Initial panels are no wider than four times ``scale`` so that bumps of
    that width are always resolved before the adaptive refinement starts.

    Args:
        f: Vectorized integrand
        anchors: Points where the integrand's mass lives
        scale: Narrowest feature width of the integrand
        tol: Absolute tolerance
        nodes: Gauss-Legendre nodes per panel
        max_depth: Maximum bisection depth
        tail_ratio: Relative truncation level
        breakpoints: Points where the integrand may be discontinuous

    Returns:
        The integral estimate
    """
    bounds = truncation_bounds(f, anchors, scale, tail_ratio=tail_ratio)
    if bounds is None:
        return 0.0
    lo, hi = bounds
    return integrate(f, lo, hi, tol=tol, nodes=nodes, max_depth=max_depth,
                     breakpoints=breakpoints, max_panel=4.0 * scale)


def interval_settings(quad: dict) -> dict:
    """Drop the real-line-only ``tail_ratio`` from a quadrature settings dict."""
    return {key: value for key, value in quad.items() if key != "tail_ratio"}
