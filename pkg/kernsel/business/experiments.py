"""
Seeded Monte-Carlo kappa sweeps.

Each replication draws a sample with ``derive_seed(master_seed, r)``, builds
one criterion table for the family and selects a kernel for every kappa of
the grid with the penalty (2 P chi_k - P Theta_k)/n + kappa P Theta_k / n.
The oracle risk of a replication is the smallest true risk over the family.

Replications are independent; with ``workers > 1`` they run in a process
pool and are merged back in replication order, so results do not depend on
the number of workers.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..dal.models import SweepResult, SweepRow, curve_for
from ..errors import ConfigurationError
from ..utils.logger import get_logger
from ..utils.rng import derive_seed
from .criterion import build_criterion_table, kappa_selections, locate_jump
from .densities import Triangular2x, get_density
from .kernels import KernelModel, histogram_family, reciprocal_bandwidth_grid, parzen_family
from .oracle import family_true_risks

logger = get_logger(__name__)

__all__ = [
    "Scenario", "ExperimentConfig", "TWO_BUMP_A_VALUES", "DEFAULT_KAPPA_GRID", "BIAS_DOMINANT_KAPPAS",
    "derive_seed", "bias_dominant_dimensions", "run_parzen_sweep", "run_histogram_sweep",
    "run_bias_dominant", "run_sweep", "detect_phase_transition", "phase_transitions"
]

TWO_BUMP_A_VALUES = (0.0, 1.5, 2.0, 3.0)
DEFAULT_KAPPA_GRID = tuple(np.round(np.linspace(-1.0, 1.0, 41), 12).tolist())
BIAS_DOMINANT_KAPPAS = (-0.5, 0.0, 1.0)
TRANSITION_SHARE = 0.25


class Scenario(str, Enum):
    """Supported sweep scenarios."""
    PARZEN = "parzen"
    HISTOGRAM = "histogram"
    BIAS_DOMINANT = "bias-dominant"

    @classmethod
    def parse(cls, value) -> 'Scenario':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as e:
            names = ", ".join(s.value for s in cls)
            raise ConfigurationError(f"unknown scenario {value!r}; expected one of {names}") from e


DEFAULT_DENSITIES = {
    Scenario.PARZEN: "std-gaussian",
    Scenario.HISTOGRAM: "triangular",
    Scenario.BIAS_DOMINANT: "triangular",
}


def kappa_grid(kappa_min: float = -1.0, kappa_max: float = 1.0, num: int = 41) -> Tuple[float, ...]:
    """Equispaced kappa values, rounded to 12 decimals so that 0 is exact."""
    if num < 1 or kappa_min > kappa_max:
        raise ConfigurationError("kappa grid needs num >= 1 and kappa_min <= kappa_max")
    return tuple(np.round(np.linspace(kappa_min, kappa_max, int(num)), 12).tolist())


def bias_dominant_dimensions(n: int, beta: float) -> List[int]:
    """
    Dimensions {1, ..., floor(n^beta)} of the bias-dominant histogram family.

    Raises:
        ConfigurationError: If beta is not in (0, 1/3)
    """
    if not 0.0 < beta < 1.0 / 3.0:
        raise ConfigurationError(f"bias-dominant scenario needs 0 < beta < 1/3, got {beta}")
    top = int(math.floor(n ** beta + 1e-12))
    return list(range(1, max(top, 1) + 1))


@dataclass
class ExperimentConfig:
    """
    One sweep: scenario, density, family grid, kappa grid and replication plan.

    Unset grids take the scenario defaults: the bandwidths {1/(2i), i = 1..50}
    for Parzen sweeps, dimensions {1..n} for histogram sweeps and
    {1..floor(n^beta)} for the bias-dominant scenario.
    A Parzen sweep runs the family once per entry of a_values, on the same samples.
    """
    scenario: Scenario = Scenario.PARZEN
    n: int = 100
    density: Optional[str] = None
    a_values: Tuple[float, ...] = TWO_BUMP_A_VALUES
    bandwidths: Optional[Tuple[float, ...]] = None
    dimensions: Optional[Tuple[int, ...]] = None
    beta: float = 0.3
    kappas: Optional[Tuple[float, ...]] = None
    replications: int = 50
    master_seed: int = 0
    workers: int = 1
    quadrature: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.scenario = Scenario.parse(self.scenario)
        if self.density is None:
            self.density = DEFAULT_DENSITIES[self.scenario]
        if self.kappas is None:
            self.kappas = BIAS_DOMINANT_KAPPAS if self.scenario is Scenario.BIAS_DOMINANT else DEFAULT_KAPPA_GRID
        if self.scenario is Scenario.PARZEN and self.bandwidths is None:
            self.bandwidths = tuple(reciprocal_bandwidth_grid(50))
        self.kappas = tuple(float(k) for k in self.kappas)
        self.a_values = tuple(float(a) for a in self.a_values)

    def validate(self) -> None:
        """
        Raises:
            ConfigurationError: On empty grids, bad counts or a density the family cannot use
        """
        if int(self.n) != self.n or self.n < 1:
            raise ConfigurationError("n must be a positive integer")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ConfigurationError("replications must be a positive integer")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")
        if not self.kappas:
            raise ConfigurationError("kappa grid is empty")
        density = get_density(self.density)
        if self.scenario is Scenario.PARZEN:
            if not self.bandwidths:
                raise ConfigurationError("bandwidth grid is empty")
            if not self.a_values:
                raise ConfigurationError("a_values is empty")
            if any(not math.isfinite(a) or a < 0 for a in self.a_values):
                raise ConfigurationError(f"a values must be finite and >= 0, got {list(self.a_values)}")
            if len(set(self.a_values)) != len(self.a_values):
                raise ConfigurationError(f"a_values has duplicates: {list(self.a_values)}")
        else:
            if not density.within_unit_interval():
                raise ConfigurationError(f"histogram sweeps need a density on [0, 1], got {density.name}")
            if self.scenario is Scenario.HISTOGRAM and self.dimensions is not None and not self.dimensions:
                raise ConfigurationError("dimension grid is empty")
            if self.scenario is Scenario.BIAS_DOMINANT:
                bias_dominant_dimensions(self.n, self.beta)
                if not isinstance(density, Triangular2x):
                    raise ConfigurationError("the bias-dominant scenario uses s(x) = 2x")

    def families(self) -> List[Tuple[float, List[KernelModel]]]:
        """(a, family) pairs; histogram scenarios have a single family with a = NaN."""
        if self.scenario is Scenario.PARZEN:
            return [(a, parzen_family(a, self.bandwidths)) for a in self.a_values]
        if self.scenario is Scenario.HISTOGRAM:
            dims = self.dimensions if self.dimensions is not None else range(1, self.n + 1)
            return [(math.nan, histogram_family(dims))]
        return [(math.nan, histogram_family(bias_dominant_dimensions(self.n, self.beta)))]

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["scenario"] = self.scenario.value
        data["kappas"] = list(self.kappas)
        for key in ("a_values", "bandwidths", "dimensions"):
            if data[key] is not None:
                data[key] = list(data[key])
        if self.scenario is not Scenario.PARZEN:
            data.pop("a_values")
            data.pop("bandwidths")
        if self.scenario is not Scenario.BIAS_DOMINANT:
            data.pop("beta")
        return data


def _run_replication(cfg: ExperimentConfig, replication: int) -> List[SweepRow]:
    seed = derive_seed(cfg.master_seed, replication)
    density = get_density(cfg.density)
    sample = density.sample(cfg.n, seed)
    rows = []
    # every a value sees the same sample
    for a, family in cfg.families():
        table = build_criterion_table(family, sample)
        risks = family_true_risks(table, sample, density, **cfg.quadrature)
        oracle_risk = float(np.min(risks))
        selected, criteria = kappa_selections(table, cfg.kappas)
        rows.extend(
            SweepRow(
                a=a,
                kappa=kappa,
                replication=replication,
                seed=seed,
                selected_index=int(index),
                selected_param=table.family[index].parameter(),
                complexity=float(table.complexity[index]),
                criterion=float(value),
                risk=float(risks[index]),
                oracle_risk=oracle_risk
            )
            for kappa, index, value in zip(cfg.kappas, selected, criteria)
        )
        logger.debug(f"Replication {replication} (seed {seed}, a={a:g}): oracle risk {oracle_risk:.6g}")
    return rows


def _run(cfg: ExperimentConfig, expected: Scenario) -> SweepResult:
    if cfg.scenario is not expected:
        raise ConfigurationError(f"expected a {expected.value} configuration, got {cfg.scenario.value}")
    cfg.validate()
    logger.info(
        f"Running {cfg.scenario.value} sweep: n={cfg.n}, {cfg.replications} replications, "
        f"{len(cfg.kappas)} kappa values, master seed {cfg.master_seed}"
    )
    replications = range(cfg.replications)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
            chunks = list(executor.map(_run_replication, [cfg] * cfg.replications, replications))
    else:
        chunks = [_run_replication(cfg, r) for r in replications]
    rows = [row for chunk in chunks for row in chunk]
    return SweepResult(scenario=cfg.scenario.value, config=cfg.to_dict(), rows=rows)


def run_parzen_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Kappa sweep over Parzen kernels K_a with bandwidths cfg.bandwidths."""
    return _run(cfg, Scenario.PARZEN)


def run_histogram_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Kappa sweep over regular histograms; the minimal penalty is D/n."""
    return _run(cfg, Scenario.HISTOGRAM)


def run_bias_dominant(cfg: ExperimentConfig) -> SweepResult:
    """Histograms with dimensions up to floor(n^beta), beta < 1/3, under s(x) = 2x."""
    return _run(cfg, Scenario.BIAS_DOMINANT)


RUNNERS = {
    Scenario.PARZEN: run_parzen_sweep,
    Scenario.HISTOGRAM: run_histogram_sweep,
    Scenario.BIAS_DOMINANT: run_bias_dominant,
}


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Dispatch on cfg.scenario."""
    return RUNNERS[cfg.scenario](cfg)


def detect_phase_transition(result: SweepResult, a: Optional[float] = None) -> Dict[str, Any]:
    """
    Locate the largest jump of the median complexity between adjacent kappa values.

    A transition is detected when that jump exceeds a quarter of the median
    complexity range and its kappa interval contains 0. Parzen sweeps over
    several a values need ``a`` to pick the curve.

    Returns:
        Dict with keys a, detected, kappa_left, kappa_right, jump, range
    """
    curve = curve_for(result.medians, a)
    kappas = curve['kappa'].to_numpy(dtype=float)
    complexity = curve['median_complexity'].to_numpy(dtype=float)
    spread = float(np.max(complexity) - np.min(complexity))
    curve_a = float(curve['a'].iloc[0])
    if kappas.size < 2:
        return {"a": curve_a, "detected": False, "kappa_left": math.nan, "kappa_right": math.nan,
                "jump": 0.0, "range": spread}
    left, right, jump = locate_jump(kappas, complexity)
    detected = spread > 0 and jump > TRANSITION_SHARE * spread and left <= 0.0 <= right
    return {"a": curve_a, "detected": bool(detected), "kappa_left": left, "kappa_right": right,
            "jump": jump, "range": spread}


def phase_transitions(result: SweepResult) -> List[Dict[str, Any]]:
    """detect_phase_transition for every kappa curve of the sweep, ordered by a."""
    return [detect_phase_transition(result, None if math.isnan(a) else a) for a in result.a_values()]
