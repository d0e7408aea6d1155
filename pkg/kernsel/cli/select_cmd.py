"""
``kernsel select``: choose a kernel for an observed sample.
"""
import argparse

import numpy as np

from ..business.criterion import estimate_at, select
from ..business.kernels import KernelModel, ParzenKernel
from ..dal.models import Sample
from ..dal.sample_io import read_sample
from .context import CommandContext
from .options import (add_common_arguments, add_family_arguments, add_input_arguments, build_family,
                      parse_penalty, resolve_penalty)

ESTIMATE_POINTS = 201


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("select", help="Select a kernel by penalized least squares")
    add_common_arguments(parser)
    add_input_arguments(parser)
    add_family_arguments(parser)
    parser.add_argument("--penalty", default="optimal",
                        help="optimal, optimal-empirical, minimal, kappa:<x>, zero or table:<values> "
                             "(default: optimal)")
    parser.set_defaults(handler=run)
    return parser


def estimate_grid(k: KernelModel, sample: Sample) -> np.ndarray:
    """Evaluation grid for the selected estimate: the kernel domain, or the sample range plus the kernel reach."""
    if k.domain is not None:
        lo, hi = k.domain
    else:
        reach = 4.0 * k.feature_scale()
        if isinstance(k, ParzenKernel):
            reach += abs(k.base.a) * k.h
        lo, hi = float(np.min(sample.values)) - reach, float(np.max(sample.values)) + reach
    return np.linspace(lo, hi, ESTIMATE_POINTS)


def run(args: argparse.Namespace) -> int:
    context = CommandContext("select", args)
    rule = parse_penalty(args.penalty)
    sample = read_sample(args.input, args.column)
    family = build_family(args, sample.n)
    rule = resolve_penalty(rule, len(family))

    result = select(family, sample, rule)
    chosen = result.selected_row
    k = family[result.selected_index]
    context.writer.write_selection(result)
    grid = estimate_grid(k, sample)
    context.writer.write_estimate(grid, estimate_at(k, sample, grid))

    context.finish(config={"family": args.family, "penalty": rule.label, "input": args.input,
                           "family_size": len(family), "n": sample.n},
                   notes={"tie_broken": result.tie_broken})
    context.logger.info(f"Selected kernel {chosen.index} of {len(family)} with {rule.label}")
    print(f"selected kernel_index={chosen.index} {chosen.label} "
          f"criterion={chosen.criterion:.17g} complexity={chosen.complexity_PTheta:.17g}")
    return 0
