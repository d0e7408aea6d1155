"""
Data models for kernsel.
Defines the records passed between the computation modules and the writers.
"""
import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..errors import ConfigurationError, DataError


@dataclass(eq=False)
class Sample:
    """
    The i.i.d. observations X_1..X_n.

    Values are stored as a read-only float array; construction rejects empty
    and non-finite input.
    """
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size == 0:
            raise DataError("sample is empty")
        if not np.all(np.isfinite(values)):
            raise DataError("sample contains non-finite values")
        values.setflags(write=False)
        self.values = values

    @property
    def n(self) -> int:
        return int(self.values.size)

    def check_unit_interval(self) -> None:
        """
        Raises:
            DataError: If some value lies outside [0, 1]
        """
        if np.any(self.values < 0.0) or np.any(self.values > 1.0):
            raise DataError("basis kernels need sample values in [0, 1]")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Sample':
        return cls(values=np.asarray(data.get('values', []), dtype=float))

    def to_dict(self) -> Dict[str, Any]:
        return {'n': self.n, 'values': self.values.tolist()}


def _optional_float(value: Any) -> float:
    """JSON null stands for a missing (NaN) value."""
    return math.nan if value is None else float(value)


@dataclass
class SelectionRow:
    """One kernel's line in a selection table."""
    index: int = 0
    kernel: Dict[str, Any] = field(default_factory=dict)
    label: str = ""
    parameter: float = math.nan
    contrast: float = math.nan
    penalty: float = math.nan
    criterion: float = math.nan
    complexity_PTheta: float = math.nan
    chi_mean_empirical: float = math.nan

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SelectionRow':
        return cls(
            index=int(data.get('index', 0)),
            kernel=dict(data.get('kernel', {})),
            label=data.get('label', ''),
            parameter=_optional_float(data.get('parameter')),
            contrast=_optional_float(data.get('contrast')),
            penalty=_optional_float(data.get('penalty')),
            criterion=_optional_float(data.get('criterion')),
            complexity_PTheta=_optional_float(data.get('complexity_PTheta')),
            chi_mean_empirical=_optional_float(data.get('chi_mean_empirical'))
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'index': self.index,
            'kernel': self.kernel,
            'label': self.label,
            'parameter': self.parameter,
            'contrast': self.contrast,
            'penalty': self.penalty,
            'criterion': self.criterion,
            'complexity_PTheta': self.complexity_PTheta,
            'chi_mean_empirical': self.chi_mean_empirical
        }


@dataclass
class SelectionResult:
    """
    The penalized criterion over a family and its minimizer.

    ``rule`` is a short label of the penalty rule that produced the rows.
    """
    selected_index: int = 0
    rows: List[SelectionRow] = field(default_factory=list)
    tie_broken: bool = False
    rule: str = ""

    @property
    def selected_row(self) -> SelectionRow:
        return self.rows[self.selected_index]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SelectionResult':
        return cls(
            selected_index=int(data.get('selected_index', 0)),
            rows=[SelectionRow.from_dict(row) for row in data.get('rows', [])],
            tie_broken=bool(data.get('tie_broken', False)),
            rule=data.get('rule', '')
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'selected_index': self.selected_index,
            'rows': [row.to_dict() for row in self.rows],
            'tie_broken': self.tie_broken,
            'rule': self.rule
        }


@dataclass
class GammaReport:
    """Family constant Gamma with the suprema it was checked against."""
    gamma: float = 1.0
    condition_holds: bool = False
    detail: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'GammaReport':
        return cls(
            gamma=float(data.get('gamma', 1.0)),
            condition_holds=bool(data.get('condition_holds', False)),
            detail=dict(data.get('detail', {}))
        )

    def to_dict(self) -> Dict[str, Any]:
        return {'gamma': self.gamma, 'condition_holds': self.condition_holds, 'detail': self.detail}


@dataclass
class UpsilonReport:
    """Smallest admissible Upsilon and the sub-bounds it is the maximum of."""
    upsilon_lower: float = 0.0
    components: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'UpsilonReport':
        return cls(
            upsilon_lower=float(data.get('upsilon_lower', 0.0)),
            components=dict(data.get('components', {}))
        )

    def to_dict(self) -> Dict[str, Any]:
        return {'upsilon_lower': self.upsilon_lower, 'components': self.components}


@dataclass
class UStatDecomposition:
    """||s_k - s_hat_k||^2 against P_n zeta_k / n + U_{A,k} / n^2."""
    lhs: float = 0.0
    pn_zeta_over_n: float = 0.0
    u_over_n2: float = 0.0
    residual: float = 0.0

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'UStatDecomposition':
        return cls(**{key: float(data.get(key, 0.0))
                      for key in ('lhs', 'pn_zeta_over_n', 'u_over_n2', 'residual')})

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lhs': self.lhs,
            'pn_zeta_over_n': self.pn_zeta_over_n,
            'u_over_n2': self.u_over_n2,
            'residual': self.residual
        }


@dataclass
class OracleReport:
    """
    Oracle-mode diagnostics of one kernel on one sample.

    ``expansion_defect`` is true_risk - (estimation_error + bias + cross_term);
    the Bernstein fields are deviation scales at level ``bernstein_u``.
    """
    kernel: Dict[str, Any] = field(default_factory=dict)
    true_risk: float = math.nan
    bias: float = math.nan
    variance_term: float = math.nan
    ideal_penalty: float = math.nan
    ustat_residual: float = math.nan
    cross_term: float = math.nan
    estimation_error: float = math.nan
    expansion_defect: float = math.nan
    ideal_penalty_expansion_defect: float = math.nan
    ustat: Optional[UStatDecomposition] = None
    bernstein_u: float = 1.0
    bernstein_zeta: float = math.nan
    bernstein_s_k: float = math.nan
    tail_certificate: str = "not certified"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'OracleReport':
        floats = ('true_risk', 'bias', 'variance_term', 'ideal_penalty', 'ustat_residual',
                  'cross_term', 'estimation_error', 'expansion_defect',
                  'ideal_penalty_expansion_defect', 'bernstein_zeta', 'bernstein_s_k')
        ustat = data.get('ustat')
        return cls(
            kernel=dict(data.get('kernel', {})),
            ustat=UStatDecomposition.from_dict(ustat) if ustat else None,
            bernstein_u=float(data.get('bernstein_u', 1.0)),
            tail_certificate=data.get('tail_certificate', 'not certified'),
            **{key: _optional_float(data.get(key)) for key in floats}
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kernel': self.kernel,
            'true_risk': self.true_risk,
            'bias': self.bias,
            'variance_term': self.variance_term,
            'ideal_penalty': self.ideal_penalty,
            'ustat_residual': self.ustat_residual,
            'cross_term': self.cross_term,
            'estimation_error': self.estimation_error,
            'expansion_defect': self.expansion_defect,
            'ideal_penalty_expansion_defect': self.ideal_penalty_expansion_defect,
            'ustat': self.ustat.to_dict() if self.ustat else None,
            'bernstein_u': self.bernstein_u,
            'bernstein_zeta': self.bernstein_zeta,
            'bernstein_s_k': self.bernstein_s_k,
            'tail_certificate': self.tail_certificate
        }


@dataclass
class SweepRow:
    """One (a, kappa, replication) cell of a sweep; a is NaN outside Parzen sweeps."""
    a: float = math.nan
    kappa: float = 0.0
    replication: int = 0
    seed: int = 0
    selected_index: int = 0
    selected_param: float = math.nan
    complexity: float = math.nan
    criterion: float = math.nan
    risk: float = math.nan
    oracle_risk: float = math.nan

    @property
    def risk_ratio(self) -> float:
        if self.oracle_risk > 0:
            return self.risk / self.oracle_risk
        return 1.0 if self.risk == self.oracle_risk else math.inf

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SweepRow':
        return cls(
            a=_optional_float(data.get('a')),
            kappa=float(data.get('kappa', 0.0)),
            replication=int(data.get('replication', 0)),
            seed=int(data.get('seed', 0)),
            selected_index=int(data.get('selected_index', 0)),
            selected_param=_optional_float(data.get('selected_param')),
            complexity=_optional_float(data.get('complexity')),
            criterion=_optional_float(data.get('criterion')),
            risk=_optional_float(data.get('risk')),
            oracle_risk=_optional_float(data.get('oracle_risk'))
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'a': self.a,
            'kappa': self.kappa,
            'replication': self.replication,
            'seed': self.seed,
            'selected_index': self.selected_index,
            'selected_param': self.selected_param,
            'complexity': self.complexity,
            'criterion': self.criterion,
            'risk': self.risk,
            'oracle_risk': self.oracle_risk,
            'risk_ratio': self.risk_ratio
        }


SWEEP_COLUMNS = ['a', 'kappa', 'replication', 'seed', 'selected_index', 'selected_param',
                 'complexity', 'criterion', 'risk', 'oracle_risk', 'risk_ratio']
SUMMARY_FIELDS = ['a', 'kappa', 'median_complexity', 'median_param', 'median_risk', 'median_risk_ratio']


def sweep_medians(frame: pd.DataFrame) -> pd.DataFrame:
    """Per-(a, kappa) medians of a sweep frame, ordered by a then kappa."""
    # histogram sweeps have a = NaN throughout; keep that group
    grouped = frame.groupby(['a', 'kappa'], sort=True, dropna=False)
    medians = grouped[['complexity', 'selected_param', 'risk', 'risk_ratio']].median().reset_index()
    medians = medians.rename(columns={
        'complexity': 'median_complexity',
        'selected_param': 'median_param',
        'risk': 'median_risk',
        'risk_ratio': 'median_risk_ratio'
    })
    return medians[SUMMARY_FIELDS].astype(float)


def curve_for(medians: pd.DataFrame, a: Optional[float] = None) -> pd.DataFrame:
    """
    The medians of one kappa curve.

    Raises:
        ConfigurationError: If a has no curve, or a is None and the medians hold curves for several a values
    """
    if a is not None:
        curve = medians[medians['a'] == a]
        if curve.empty:
            raise ConfigurationError(f"sweep has no kappa curve for a={a:g}")
        return curve
    if medians['a'].nunique(dropna=False) > 1:
        raise ConfigurationError("sweep holds curves for several a values; pick one")
    return medians


@dataclass
class SweepResult:
    """
    All rows of a kappa sweep plus per-(a, kappa) medians.

    Rows are ordered by replication, then a, then kappa; ``medians`` is recomputed
    from the rows on construction when not supplied.
    """
    scenario: str = ""
    config: Dict[str, Any] = field(default_factory=dict)
    rows: List[SweepRow] = field(default_factory=list)
    medians: Optional[pd.DataFrame] = None

    def __post_init__(self):
        if self.medians is None and self.rows:
            self.medians = sweep_medians(self.to_frame())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.to_dict() for row in self.rows], columns=SWEEP_COLUMNS)

    def a_values(self) -> List[float]:
        """Distinct a values, sorted (a single NaN for histogram sweeps)."""
        return [float(a) for a in pd.unique(self.medians['a'])]

    def median_complexity(self, a: Optional[float] = None) -> Dict[float, float]:
        curve = curve_for(self.medians, a)
        return dict(zip(curve['kappa'].tolist(), curve['median_complexity'].tolist()))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SweepResult':
        medians = data.get('medians')
        return cls(
            scenario=data.get('scenario', ''),
            config=dict(data.get('config', {})),
            rows=[SweepRow.from_dict(row) for row in data.get('rows', [])],
            medians=pd.DataFrame(medians).astype(float) if medians else None
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'scenario': self.scenario,
            'config': self.config,
            'rows': [row.to_dict() for row in self.rows],
            'medians': self.medians.to_dict(orient='list') if self.medians is not None else None
        }


@dataclass
class RunManifest:
    """
    Provenance record written next to every result file.
    """
    command: str = ""
    config: Dict[str, Any] = field(default_factory=dict)
    master_seed: Optional[int] = None
    version: str = ""
    timestamp: datetime = field(default_factory=datetime.now)
    outputs: List[str] = field(default_factory=list)
    notes: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunManifest':
        timestamp = data.get('timestamp')
        if isinstance(timestamp, str):
            timestamp = datetime.fromisoformat(timestamp)
        elif timestamp is None:
            timestamp = datetime.now()
        seed = data.get('master_seed')
        return cls(
            command=data.get('command', ''),
            config=dict(data.get('config', {})),
            master_seed=int(seed) if seed is not None else None,
            version=data.get('version', ''),
            timestamp=timestamp,
            outputs=list(data.get('outputs', [])),
            notes=dict(data.get('notes', {}))
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'config': self.config,
            'master_seed': self.master_seed,
            'version': self.version,
            'timestamp': self.timestamp.isoformat(),
            'outputs': list(self.outputs),
            'notes': self.notes
        }
