"""
``kernsel sweep``: seeded Monte-Carlo kappa sweeps.
"""
import argparse
import math

from ..business.experiments import (TWO_BUMP_A_VALUES, ExperimentConfig, Scenario, kappa_grid,
                                    phase_transitions, run_sweep)
from ..errors import ConfigurationError
from .context import CommandContext
from .options import add_common_arguments, parse_bandwidths, parse_float_list, parse_int_grid, parse_kappas

KAPPA_SETTINGS = ("kappa_min", "kappa_max", "kappa_num")
TRACKED_SETTINGS = ("n", "replications", "master_seed", "workers") + KAPPA_SETTINGS


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("sweep", help="Run a replicated kappa sweep")
    add_common_arguments(parser)
    parser.add_argument("--scenario", default=Scenario.PARZEN.value,
                        help="parzen, histogram or bias-dominant (default: parzen)")
    parser.add_argument("--a", default=None,
                        help="Comma list of two-bump parameters a of K_a (parzen; default: 0,1.5,2,3)")
    parser.add_argument("--n", type=int, default=None, help="Sample size per replication")
    parser.add_argument("--reps", type=int, default=None, help="Number of replications")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (else config, then KERNSEL_SEED)")
    parser.add_argument("--density", default=None, help="Data-generating density (default per scenario)")
    parser.add_argument("--kappas", default=None, help="Explicit comma list of kappa values")
    parser.add_argument("--kappa-min", type=float, default=None)
    parser.add_argument("--kappa-max", type=float, default=None)
    parser.add_argument("--kappa-num", type=int, default=None)
    parser.add_argument("--beta", type=float, default=0.3, help="Dimension exponent (bias-dominant)")
    parser.add_argument("--h-grid", default=None, help="Bandwidth grid (parzen; default: 1/(2i), i = 1..50)")
    parser.add_argument("--dims", default=None, help="Dimension grid (histogram; default: 1..n)")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes")
    parser.set_defaults(handler=run)
    return parser


def _kappas(args: argparse.Namespace, context: CommandContext):
    explicit = parse_kappas(args.kappas)
    if explicit is not None:
        return explicit
    if any(context.setting_source(key) != "default" for key in KAPPA_SETTINGS):
        return kappa_grid(float(context.experiment_setting("kappa_min")),
                          float(context.experiment_setting("kappa_max")),
                          int(context.experiment_setting("kappa_num")))
    # scenario default
    return None


def build_config(args: argparse.Namespace, context: CommandContext) -> ExperimentConfig:
    """
    Combine flags and configuration into an ExperimentConfig.

    Raises:
        ConfigurationError: If a grid flag does not apply to the scenario or fails to parse
    """
    scenario = Scenario.parse(args.scenario)
    n = int(context.experiment_setting("n"))
    bandwidths = dimensions = None
    a_values = TWO_BUMP_A_VALUES
    if args.a is not None:
        if scenario is not Scenario.PARZEN:
            raise ConfigurationError("--a only applies to the parzen scenario")
        a_values = tuple(parse_float_list(args.a, "a values"))
    if args.h_grid is not None:
        if scenario is not Scenario.PARZEN:
            raise ConfigurationError("--h-grid only applies to the parzen scenario")
        bandwidths = tuple(parse_bandwidths(args.h_grid))
    if args.dims is not None:
        if scenario is not Scenario.HISTOGRAM:
            raise ConfigurationError("--dims only applies to the histogram scenario")
        dimensions = tuple(parse_int_grid(args.dims, "dimension grid", upper=n))
    config = ExperimentConfig(
        scenario=scenario,
        n=n,
        density=args.density,
        a_values=a_values,
        bandwidths=bandwidths,
        dimensions=dimensions,
        beta=args.beta,
        kappas=_kappas(args, context),
        replications=int(context.experiment_setting("replications")),
        master_seed=context.master_seed,
        workers=int(context.experiment_setting("workers")),
        quadrature=context.quadrature
    )
    config.validate()
    return config


def run(args: argparse.Namespace) -> int:
    context = CommandContext("sweep", args, {
        "n": args.n,
        "replications": args.reps,
        "master_seed": args.seed,
        "workers": args.workers,
        "kappa_min": args.kappa_min,
        "kappa_max": args.kappa_max,
        "kappa_num": args.kappa_num
    })
    config = build_config(args, context)
    result = run_sweep(config)
    context.writer.write_sweep(result)
    transitions = phase_transitions(result)

    sources = {key: context.setting_source(key) for key in TRACKED_SETTINGS}
    context.finish(config=config.to_dict(), master_seed=config.master_seed,
                   notes={"setting_sources": sources, "phase_transitions": transitions})
    print(f"{config.scenario.value} sweep: {len(result.rows)} rows, "
          f"{config.replications} replications, master_seed={config.master_seed}")
    for transition in transitions:
        if transition["detected"]:
            where = "" if math.isnan(transition["a"]) else f"a={transition['a']:g}: "
            print(f"{where}phase transition between kappa={transition['kappa_left']:.17g} "
                  f"and kappa={transition['kappa_right']:.17g}")
    return 0
