"""
Penalized least-squares criterion and kernel selection.

For a family of kernels and a sample, the criterion of kernel k is

    C_pen(k) = P_n gamma(s_hat_k) + pen(k),   P_n gamma(t) = ||t||^2 - 2 P_n t,

and the selected kernel is its minimizer. Everything that does not depend
on the penalty is computed once per (family, sample) in a CriterionTable so
that many penalty rules can be compared on the same sample.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..dal.models import Sample, SelectionResult, SelectionRow
from ..errors import ConfigurationError, DataError, RuleUnavailableError
from ..utils.logger import get_logger
from .kernels import ArrayLike, KernelModel, family_variant

logger = get_logger(__name__)


# ---------------------------------------------------------------------------
# Estimator and double sums
# ---------------------------------------------------------------------------

def _as_sample(sample) -> Sample:
    if isinstance(sample, Sample):
        return sample
    return Sample(np.asarray(sample, dtype=float))


def estimate_at(k: KernelModel, sample, x: ArrayLike):
    """
    s_hat_k(x) = (1/n) sum_i k(X_i, x).

    Args:
        k: Kernel
        sample: Sample (or a sequence of floats)
        x: Evaluation point(s)

    Returns:
        A float for scalar x, an array shaped like x otherwise
    """
    sample = _as_sample(sample)
    x_arr = np.asarray(x, dtype=float)
    values = sample.values.reshape((-1,) + (1,) * x_arr.ndim)
    estimate = np.mean(k.evaluate(values, x_arr[None, ...]), axis=0)
    if x_arr.ndim == 0:
        return float(estimate)
    return estimate


def pair_sums(fn, values: np.ndarray) -> Tuple[float, float]:
    """
    Diagonal and strict upper-triangle sums of a symmetric fn over a sample.

    sum_{i,j} fn(X_i, X_j) = diagonal + 2 * upper.
    """
    diagonal = float(np.sum(fn(values, values)))
    if values.size < 2:
        return diagonal, 0.0
    i, j = np.triu_indices(values.size, k=1)
    upper = float(np.sum(fn(values[i], values[j])))
    return diagonal, upper


def double_sum(fn, values: np.ndarray) -> float:
    """sum over all ordered pairs (i, j), diagonal included."""
    diagonal, upper = pair_sums(fn, values)
    return diagonal + 2.0 * upper


def empirical_contrast(k: KernelModel, sample) -> float:
    """
    P_n gamma(s_hat_k) = (1/n^2) sum_{i,j} (A_k - 2k)(X_i, X_j).

    Args:
        k: Kernel
        sample: Sample (or a sequence of floats)

    Returns:
        The empirical least-squares contrast of the estimator
    """
    sample = _as_sample(sample)
    n = sample.n
    norm_sq = double_sum(k.a, sample.values) / n ** 2
    pn_estimate = double_sum(k.evaluate, sample.values) / n ** 2
    return norm_sq - 2.0 * pn_estimate


# ---------------------------------------------------------------------------
# Per-(family, sample) table
# ---------------------------------------------------------------------------

@dataclass
class CriterionTable:
    """
    Penalty-independent quantities of every kernel in a family on one sample.

    ``chi_constant`` and ``theta_constant`` are NaN where chi_k or Theta_k
    depend on x. ``complexity`` is the constant Theta where it exists and
    P_n Theta_k otherwise.
    """
    family: List[KernelModel]
    n: int
    norm_sq_estimate: np.ndarray
    pn_estimate: np.ndarray
    chi_constant: np.ndarray
    theta_constant: np.ndarray
    chi_mean_empirical: np.ndarray
    complexity: np.ndarray

    @property
    def size(self) -> int:
        return len(self.family)

    @property
    def contrast(self) -> np.ndarray:
        return self.norm_sq_estimate - 2.0 * self.pn_estimate


def _domain_check(family: Sequence[KernelModel], sample: Sample) -> None:
    domain = family[0].domain
    if domain is not None:
        lo, hi = domain
        if np.any(sample.values < lo) or np.any(sample.values > hi):
            raise DataError(f"{family[0].variant} kernels need sample values in [{lo:g}, {hi:g}]")


def _constant(value: Optional[float]) -> float:
    return math.nan if value is None else float(value)


def build_criterion_table(family: Sequence[KernelModel], sample, *,
                          with_contrast: bool = True) -> CriterionTable:
    """
    Compute contrasts and complexity terms of a family on a sample.

    Args:
        family: Homogeneous, non-empty list of kernels
        sample: Sample (or a sequence of floats)
        with_contrast: Skip the O(n^2) sums when only penalties are needed

    Returns:
        A CriterionTable

    Raises:
        ConfigurationError: If the family is empty or mixed
        DataError: If the sample lies outside the kernels' domain
    """
    family = list(family)
    family_variant(family)
    sample = _as_sample(sample)
    _domain_check(family, sample)
    n = sample.n
    values = sample.values

    size = len(family)
    norm_sq = np.full(size, math.nan)
    pn_est = np.full(size, math.nan)
    chi_const = np.empty(size)
    theta_const = np.empty(size)
    chi_emp = np.empty(size)
    complexity = np.empty(size)

    for index, k in enumerate(family):
        if with_contrast:
            # all ordered pairs, i = j included
            diag_a, upper_a = pair_sums(k.a, values)
            diag_k, upper_k = pair_sums(k.evaluate, values)
            norm_sq[index] = (diag_a + 2.0 * upper_a) / n ** 2
            pn_est[index] = (diag_k + 2.0 * upper_k) / n ** 2
        chi_const[index] = _constant(k.constant_chi())
        theta_const[index] = _constant(k.constant_theta())
        # P_n chi equals the constant exactly when chi does not depend on x
        chi_emp[index] = chi_const[index] if math.isfinite(chi_const[index]) else float(np.mean(k.chi(values)))
        complexity[index] = (theta_const[index] if math.isfinite(theta_const[index])
                             else float(np.mean(k.theta(values))))

    return CriterionTable(family=family, n=n, norm_sq_estimate=norm_sq, pn_estimate=pn_est,
                          chi_constant=chi_const, theta_constant=theta_const,
                          chi_mean_empirical=chi_emp, complexity=complexity)


# ---------------------------------------------------------------------------
# Penalty rules
# ---------------------------------------------------------------------------

class PenaltyRule(ABC):
    """A rule mapping every kernel of a table to pen(k)."""

    @property
    @abstractmethod
    def label(self) -> str:
        """Short description used in outputs."""

    @abstractmethod
    def penalties(self, table: CriterionTable) -> np.ndarray:
        """pen(k) for every kernel of the table."""

    @staticmethod
    def _require(values: np.ndarray, what: str, table: CriterionTable) -> np.ndarray:
        missing = np.flatnonzero(~np.isfinite(values))
        if missing.size:
            k = table.family[int(missing[0])]
            raise RuleUnavailableError(
                f"{what} is not constant in x for kernel {missing[0]} ({k.label()}); "
                f"the theoretical penalty is unavailable"
            )
        return values


@dataclass(frozen=True)
class OptimalTheoretical(PenaltyRule):
    """pen(k) = 2 P chi_k / n with the constant chi_k."""

    @property
    def label(self) -> str:
        return "optimal"

    def penalties(self, table):
        chi = self._require(table.chi_constant, "chi", table)
        return 2.0 * chi / table.n


@dataclass(frozen=True)
class OptimalEmpirical(PenaltyRule):
    """pen(k) = 2 P_n chi_k / n."""

    @property
    def label(self) -> str:
        return "optimal-empirical"

    def penalties(self, table):
        return 2.0 * table.chi_mean_empirical / table.n


@dataclass(frozen=True)
class Minimal(PenaltyRule):
    """pen(k) = (2 P chi_k - P Theta_k) / n."""

    @property
    def label(self) -> str:
        return "minimal"

    def penalties(self, table):
        chi = self._require(table.chi_constant, "chi", table)
        theta = self._require(table.theta_constant, "Theta", table)
        return (2.0 * chi - theta) / table.n


@dataclass(frozen=True)
class MinimalPlusKappa(PenaltyRule):
    """pen(k) = (2 P chi_k - P Theta_k) / n + kappa P Theta_k / n."""
    kappa: float

    @property
    def label(self) -> str:
        return f"kappa:{self.kappa:.17g}"

    def penalties(self, table):
        chi = self._require(table.chi_constant, "chi", table)
        theta = self._require(table.theta_constant, "Theta", table)
        return (2.0 * chi - theta) / table.n + self.kappa * theta / table.n


@dataclass(frozen=True)
class ExplicitTable(PenaltyRule):
    """pen(k) given explicitly for every kernel, in family order."""
    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not all(math.isfinite(v) for v in values):
            raise ConfigurationError("explicit penalties must be finite")
        object.__setattr__(self, 'values', values)

    @property
    def label(self) -> str:
        return "table"

    def penalties(self, table):
        if len(self.values) != table.size:
            raise ConfigurationError(
                f"explicit penalty table has {len(self.values)} values for {table.size} kernels"
            )
        return np.asarray(self.values, dtype=float)

    @classmethod
    def zeros(cls, size: int) -> 'ExplicitTable':
        return cls((0.0,) * int(size))


def penalties_for(table: CriterionTable, rule: PenaltyRule) -> np.ndarray:
    return np.asarray(rule.penalties(table), dtype=float)


def penalty_value(rule: PenaltyRule, k: KernelModel, sample, index: Optional[int] = None) -> float:
    """
    pen(k) for a single kernel.

    Args:
        rule: Penalty rule
        k: Kernel
        sample: Sample (needed for the empirical rule and for n)
        index: Position of k in its family; required by ExplicitTable

    Returns:
        The penalty value
    """
    table = build_criterion_table([k], sample, with_contrast=False)
    if isinstance(rule, ExplicitTable):
        if index is None:
            raise ConfigurationError("an explicit penalty table needs the kernel index")
        if not 0 <= index < len(rule.values):
            raise ConfigurationError(f"kernel index {index} is outside the penalty table")
        return float(rule.values[index])
    return float(penalties_for(table, rule)[0])


# ---------------------------------------------------------------------------
# Selection
# ---------------------------------------------------------------------------

def _argmin_with_ties(criterion: np.ndarray, complexity: np.ndarray) -> Tuple[int, bool]:
    best = np.min(criterion)
    candidates = np.flatnonzero(criterion == best)
    if candidates.size == 1:
        return int(candidates[0]), False
    # smallest complexity first, then smallest index
    order = np.lexsort((candidates, complexity[candidates]))
    chosen = int(candidates[order[0]])
    logger.debug(f"Criterion tie between kernels {candidates.tolist()}; kept {chosen}")
    return chosen, True


def select_from_table(table: CriterionTable, rule: PenaltyRule) -> SelectionResult:
    """
    Minimize the penalized criterion over a prepared table.

    Raises:
        RuleUnavailableError: If the rule cannot be evaluated for some kernel
    """
    contrast = table.contrast
    if not np.all(np.isfinite(contrast)):
        raise ConfigurationError("criterion table was built without contrasts")
    penalty = penalties_for(table, rule)
    criterion = contrast + penalty
    selected, tie_broken = _argmin_with_ties(criterion, table.complexity)

    rows = [
        SelectionRow(
            index=index,
            kernel=k.describe(),
            label=k.label(),
            parameter=k.parameter(),
            contrast=float(contrast[index]),
            penalty=float(penalty[index]),
            criterion=float(criterion[index]),
            complexity_PTheta=float(table.complexity[index]),
            chi_mean_empirical=float(table.chi_mean_empirical[index])
        )
        for index, k in enumerate(table.family)
    ]
    return SelectionResult(selected_index=selected, rows=rows, tie_broken=tie_broken, rule=rule.label)


def select(family: Sequence[KernelModel], sample, rule: PenaltyRule) -> SelectionResult:
    """
    Select k_hat = argmin_k C_pen(k) over a family.

    Ties on the criterion are broken by the smallest complexity P Theta_k,
    then by the smallest index.

    Args:
        family: Homogeneous, non-empty list of kernels
        sample: Sample (or a sequence of floats)
        rule: Penalty rule

    Returns:
        A SelectionResult
    """
    return select_from_table(build_criterion_table(family, sample), rule)


def kappa_selections(table: CriterionTable, kappas: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Selected index and its criterion value for each MinimalPlusKappa(kappa), reusing one table.
    """
    contrast = table.contrast
    chi = PenaltyRule._require(table.chi_constant, "chi", table)
    theta = PenaltyRule._require(table.theta_constant, "Theta", table)
    # contrast + minimal leaves only the off-diagonal pairs
    minimal = (2.0 * chi - theta) / table.n
    selected = np.empty(len(kappas), dtype=np.int64)
    values = np.empty(len(kappas))
    for position, kappa in enumerate(kappas):
        criterion = contrast + (minimal + kappa * theta / table.n)
        selected[position], _ = _argmin_with_ties(criterion, table.complexity)
        values[position] = criterion[selected[position]]
    return selected, values


def kappa_path(family: Sequence[KernelModel], sample, kappas: Sequence[float]) -> pd.DataFrame:
    """
    Selected kernel as a function of kappa for one sample.

    Returns:
        DataFrame with columns kappa, selected_index, selected_param, complexity
    """
    table = build_criterion_table(family, sample)
    kappas = [float(kappa) for kappa in kappas]
    selected, _ = kappa_selections(table, kappas)
    return pd.DataFrame({
        'kappa': kappas,
        'selected_index': selected,
        'selected_param': [table.family[i].parameter() for i in selected],
        'complexity': table.complexity[selected]
    })


def locate_jump(kappas: Sequence[float], complexities: Sequence[float]) -> Tuple[float, float, float]:
    """
    The adjacent kappa pair with the largest drop in complexity.

    Returns:
        (kappa_left, kappa_right, drop); drop is 0 when complexity never decreases

    Raises:
        ConfigurationError: With fewer than two kappa values
    """
    kappas = np.asarray(kappas, dtype=float)
    complexities = np.asarray(complexities, dtype=float)
    if kappas.size < 2 or kappas.size != complexities.size:
        raise ConfigurationError("locating a jump needs at least two matching kappa/complexity values")
    order = np.argsort(kappas, kind='stable')
    kappas, complexities = kappas[order], complexities[order]
    drops = complexities[:-1] - complexities[1:]
    position = int(np.argmax(drops))
    return float(kappas[position]), float(kappas[position + 1]), float(max(drops[position], 0.0))
