"""
``kernsel sample``: draw a seeded sample from a known density.
"""
import argparse

from ..business.densities import get_density
from ..errors import ConfigurationError
from ..utils.rng import derive_seed
from .context import CommandContext
from .options import add_common_arguments


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("sample", help="Generate a seeded sample file")
    add_common_arguments(parser)
    parser.add_argument("--density", required=True, help="std-gaussian, uniform or triangular")
    parser.add_argument("--n", type=int, default=None, help="Number of observations")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (else config, then KERNSEL_SEED)")
    parser.add_argument("--replication", type=int, default=0,
                        help="Replication index; the stream seed is derive_seed(seed, replication)")
    parser.add_argument("--output", default="sample.txt",
                        help="Sample file, relative to the output directory (default: sample.txt)")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> int:
    context = CommandContext("sample", args, {"n": args.n, "master_seed": args.seed})
    density = get_density(args.density)
    if args.replication < 0:
        raise ConfigurationError("replication index must be non-negative")
    n = int(context.experiment_setting("n"))
    seed = derive_seed(context.master_seed, args.replication)

    sample = density.sample(n, seed)
    path = context.writer.write_sample(
        sample, args.output,
        header=f"density={density.name} n={n} master_seed={context.master_seed} "
               f"replication={args.replication} seed={seed}")
    context.finish(config={"density": density.name, "n": n, "replication": args.replication, "seed": seed},
                   master_seed=context.master_seed,
                   notes={"setting_sources": {key: context.setting_source(key) for key in ("n", "master_seed")}})
    print(path)
    return 0
