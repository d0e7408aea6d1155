"""
Shared argument definitions and parsers for the kernsel subcommands.
"""
import argparse
import math
from typing import List, Optional, Sequence

from ..business.criterion import (ExplicitTable, Minimal, MinimalPlusKappa, OptimalEmpirical,
                                  OptimalTheoretical, PenaltyRule)
from ..business.kernels import (FourierPaired, KernelModel, ProjectionKernel, fourier_cutoff_family,
                                fourier_weighted_family, histogram_family, reciprocal_bandwidth_grid,
                                parzen_family)
from ..errors import ConfigurationError

FAMILIES = ("parzen", "histogram", "fourier", "fourier-projection")
RECIPROCAL_GRID_KEYWORDS = ("reciprocal", "paper")


def parse_float(text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigurationError(f"{what}: {text!r} is not a number") from None
    if not math.isfinite(value):
        raise ConfigurationError(f"{what}: {text!r} is not finite")
    return value


def parse_float_list(text: str, what: str) -> List[float]:
    items = [item.strip() for item in str(text).split(',') if item.strip()]
    if not items:
        raise ConfigurationError(f"{what} is empty")
    return [parse_float(item, what) for item in items]


def parse_penalty(spec: str) -> PenaltyRule:
    """
    Parse a penalty string.

    Accepted forms: ``optimal``, ``optimal-empirical``, ``minimal``,
    ``kappa:<x>``, ``zero`` and ``table:<v1>,<v2>,...``. ``zero`` is
    resolved to an all-zero table once the family size is known.

    Raises:
        ConfigurationError: On an unknown form or a bad number
    """
    text = str(spec).strip()
    key, _, value = text.partition(':')
    key = key.strip().lower()
    if key == "optimal" and not value:
        return OptimalTheoretical()
    if key in ("optimal-empirical", "empirical") and not value:
        return OptimalEmpirical()
    if key == "minimal" and not value:
        return Minimal()
    if key == "kappa" and value:
        return MinimalPlusKappa(parse_float(value, "kappa"))
    if key == "zero" and not value:
        return ExplicitTable(())
    if key == "table" and value:
        return ExplicitTable(tuple(parse_float_list(value, "penalty table")))
    raise ConfigurationError(
        f"unknown penalty {spec!r}; expected optimal, optimal-empirical, minimal, kappa:<x>, zero or table:<values>"
    )


def resolve_penalty(rule: PenaltyRule, family_size: int) -> PenaltyRule:
    """Expand ``zero`` to a table matching the family."""
    if isinstance(rule, ExplicitTable) and not rule.values:
        return ExplicitTable.zeros(family_size)
    return rule


def parse_bandwidths(spec: str) -> List[float]:
    """
    ``reciprocal`` (or ``reciprocal:<count>``) for {1/(2i)}, otherwise a comma list of positive bandwidths.
    """
    text = str(spec).strip().lower()
    keyword, _, count = text.partition(":")
    if keyword in RECIPROCAL_GRID_KEYWORDS:
        count = int(parse_float(count, "bandwidth count")) if count else 50
        if count < 1:
            raise ConfigurationError("bandwidth count must be positive")
        return reciprocal_bandwidth_grid(count)
    bandwidths = parse_float_list(spec, "bandwidth grid")
    if any(h <= 0 for h in bandwidths):
        raise ConfigurationError("bandwidths must be positive")
    return bandwidths


def parse_int_grid(spec: str, what: str, upper: Optional[int] = None) -> List[int]:
    """
    ``lo..hi`` for an integer range (``..n`` means up to ``upper``), otherwise a comma list.
    """
    text = str(spec).strip()
    if '..' in text:
        lo_text, _, hi_text = text.partition('..')
        hi_text = hi_text.strip()
        if hi_text == 'n':
            if upper is None:
                raise ConfigurationError(f"{what}: 'n' is only known once the sample is read")
            hi_text = str(upper)
        lo, hi = (int(parse_float(t, what)) for t in (lo_text, hi_text))
        values = list(range(lo, hi + 1))
    else:
        values = [parse_float(item, what) for item in text.split(',') if item.strip()]
        if any(v != int(v) for v in values):
            raise ConfigurationError(f"{what} must contain integers")
        values = [int(v) for v in values]
    if not values:
        raise ConfigurationError(f"{what} is empty")
    if any(v < 1 for v in values):
        raise ConfigurationError(f"{what} must contain positive integers")
    return values


def parse_taus(spec: str) -> List[List[float]]:
    """Semicolon-separated tau vectors, e.g. ``1,0.5;1,0.25``."""
    vectors = [parse_float_list(part, "tau vector") for part in str(spec).split(';') if part.strip()]
    if not vectors:
        raise ConfigurationError("tau list is empty")
    return vectors


def add_family_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("kernel family")
    group.add_argument("--family", choices=FAMILIES, default="parzen",
                       help="Kernel family (default: parzen)")
    group.add_argument("--a", type=float, default=0.0,
                       help="Two-bump parameter a of the Parzen base kernel K_a (default: 0, Gaussian)")
    group.add_argument("--h-grid", default="reciprocal",
                       help="Bandwidths: 'reciprocal' for 1/(2i), 'reciprocal:<count>' or a comma list "
                            "(default: reciprocal)")
    group.add_argument("--dims", default="1..n",
                       help="Histogram dimensions: 'lo..hi', 'lo..n' or a comma list (default: 1..n)")
    group.add_argument("--p", type=int, default=7,
                       help="Fourier basis size, odd (default: 7)")
    group.add_argument("--w0", type=float, default=1.0, help="Fourier weight of the constant function")
    group.add_argument("--tau", default=None,
                       help="Explicit Fourier tau vectors 'v1,v2;v1,v2'; default is the nested cut-off family")


def build_family(args: argparse.Namespace, n: Optional[int] = None) -> List[KernelModel]:
    """
    Build the kernel family described by the parsed arguments.

    Raises:
        ConfigurationError: On invalid family parameters
    """
    if args.family == "parzen":
        return parzen_family(args.a, parse_bandwidths(args.h_grid))
    if args.family == "histogram":
        return histogram_family(parse_int_grid(args.dims, "dimension grid", upper=n))
    if args.family == "fourier-projection":
        if args.dims == "1..n":
            sizes = list(range(1, args.p + 1, 2))
        else:
            sizes = parse_int_grid(args.dims, "Fourier sizes")
        return [ProjectionKernel(FourierPaired(p)) for p in sizes]
    if args.tau:
        return fourier_weighted_family(args.p, parse_taus(args.tau), args.w0)
    return fourier_cutoff_family(args.p)


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="JSON configuration file; flags override it")
    parser.add_argument("--output-dir", default=None, help="Directory for result files")
    parser.add_argument("--log-level", default=None, help="Logging level (DEBUG, INFO, ...)")


def add_input_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="Sample file: one float per line, or CSV")
    parser.add_argument("--column", default=None,
                        help="CSV column name or zero-based index; reads the input as CSV")


def parse_kappas(spec: Optional[str]) -> Optional[Sequence[float]]:
    if spec is None:
        return None
    return tuple(parse_float_list(spec, "kappa grid"))
