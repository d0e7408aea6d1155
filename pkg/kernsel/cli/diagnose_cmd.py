"""
``kernsel diagnose``: oracle-mode diagnostics against a known density.
"""
import argparse
import math

from ..business.densities import get_density
from ..business.oracle import diagnose
from ..dal.sample_io import read_sample
from ..errors import ConfigurationError
from .context import CommandContext
from .options import add_common_arguments, add_family_arguments, add_input_arguments, build_family


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("diagnose", help="Risk decomposition and ideal penalty against a known density")
    add_common_arguments(parser)
    add_input_arguments(parser)
    add_family_arguments(parser)
    parser.add_argument("--density", default=None,
                        help="True density of the sample: std-gaussian, uniform or triangular (required)")
    parser.add_argument("--u", type=float, default=1.0, help="Deviation level of the Bernstein annotations")
    parser.add_argument("--decomposition", choices=("auto", "quadrature"), default="auto",
                        help="How the U-statistic decomposition integrates (default: auto)")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> int:
    context = CommandContext("diagnose", args)
    if not args.density:
        raise ConfigurationError("oracle diagnostics need the true density (--density)")
    density = get_density(args.density)
    sample = read_sample(args.input, args.column)
    family = build_family(args, sample.n)

    report = diagnose(family, sample, density, u=args.u, decomposition=args.decomposition,
                      **context.quadrature)
    context.writer.write_json(report, "diagnostics.json")

    residuals = [abs(k.ustat_residual) for k in report["kernels"] if math.isfinite(k.ustat_residual)]
    worst = max(residuals) if residuals else math.nan
    best = min(report["kernels"], key=lambda k: k.true_risk)
    context.finish(config={"family": args.family, "density": density.name, "input": args.input,
                           "family_size": len(family), "n": sample.n, "u": args.u,
                           "decomposition": args.decomposition})
    print(f"diagnosed {len(family)} kernels against {density.name}: "
          f"max |ustat residual|={worst:.3g}, best true risk={best.true_risk:.17g}")
    return 0
