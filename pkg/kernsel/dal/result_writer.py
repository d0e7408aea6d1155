"""
Result emission: CSV tables, JSON diagnostics and run manifests.

Floats are written with 17 significant digits so that every value
round-trips exactly. Each output file is listed in exactly one manifest,
``<command>_manifest.json``, written next to it.
"""
import json
import logging
import math
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .models import RunManifest, Sample, SelectionResult, SweepResult
from .sample_io import FLOAT_FORMAT, write_sample

logger = logging.getLogger(__name__)

SELECTION_COLUMNS = ['kernel_index', 'family_params', 'contrast', 'penalty', 'criterion',
                     'complexity', 'selected_flag']
ESTIMATE_COLUMNS = ['x', 'estimate']
SWEEP_CSV_COLUMNS = ['a', 'kappa', 'replication', 'selected_param', 'complexity', 'risk', 'oracle_risk']
SUMMARY_COLUMNS = ['a', 'kappa', 'median_complexity', 'median_risk_ratio']


class ResultWriter:
    """
    Writes the files of one command run into a results directory and keeps
    track of them for the manifest.
    """

    def __init__(self, results_dir: str, command: str):
        """
        Initialize the ResultWriter.

        Args:
            results_dir: Output directory, created if missing
            command: Name of the command; used for the manifest file name
        """
        self.logger = logging.getLogger(__name__)
        self.results_dir = results_dir
        self.command = command
        self.outputs: List[str] = []
        os.makedirs(results_dir, exist_ok=True)

    def _path(self, name: str) -> str:
        return os.path.join(self.results_dir, name)

    def write_frame(self, frame: pd.DataFrame, name: str) -> str:
        """Write a DataFrame as CSV with round-trip float formatting."""
        path = self._path(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        self.outputs.append(name)
        self.logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_json(self, payload: Dict[str, Any], name: str) -> str:
        path = self._path(name)
        with open(path, 'w', encoding='utf-8', newline='\n') as json_file:
            json.dump(to_jsonable(payload), json_file, indent=2, allow_nan=False)
            json_file.write("\n")
        self.outputs.append(name)
        self.logger.info(f"Wrote {path}")
        return path

    def write_selection(self, result: SelectionResult) -> str:
        """selection.csv: one row per kernel, the selected one flagged."""
        frame = pd.DataFrame({
            'kernel_index': [row.index for row in result.rows],
            'family_params': [row.label for row in result.rows],
            'contrast': [row.contrast for row in result.rows],
            'penalty': [row.penalty for row in result.rows],
            'criterion': [row.criterion for row in result.rows],
            'complexity': [row.complexity_PTheta for row in result.rows],
            'selected_flag': [int(row.index == result.selected_index) for row in result.rows]
        }, columns=SELECTION_COLUMNS)
        return self.write_frame(frame, 'selection.csv')

    def write_estimate(self, x: Sequence[float], estimate: Sequence[float]) -> str:
        """estimate.csv: the selected estimator on a grid."""
        frame = pd.DataFrame({'x': np.asarray(x, dtype=float), 'estimate': np.asarray(estimate, dtype=float)},
                             columns=ESTIMATE_COLUMNS)
        return self.write_frame(frame, 'estimate.csv')

    def write_sweep(self, result: SweepResult) -> List[str]:
        """sweep.csv (one row per a, kappa and replication) and sweep_summary.csv (per-(a, kappa) medians)."""
        rows = result.to_frame()[SWEEP_CSV_COLUMNS]
        summary = result.medians[SUMMARY_COLUMNS]
        return [self.write_frame(rows, 'sweep.csv'), self.write_frame(summary, 'sweep_summary.csv')]

    def write_sample(self, sample: Sample, name: str, header: Optional[str] = None) -> str:
        """A sample file, one float per line; absolute names are kept as given."""
        path = write_sample(self._path(name), sample, header=header)
        self.outputs.append(os.path.relpath(path, self.results_dir))
        return path

    def write_manifest(self, manifest: RunManifest) -> str:
        """Write ``<command>_manifest.json`` listing every file written so far."""
        manifest.outputs = list(self.outputs)
        path = self._path(f"{self.command}_manifest.json")
        with open(path, 'w', encoding='utf-8', newline='\n') as manifest_file:
            json.dump(to_jsonable(manifest.to_dict()), manifest_file, indent=2, allow_nan=False)
            manifest_file.write("\n")
        self.logger.info(f"Wrote manifest {path}")
        return path


def to_jsonable(value: Any) -> Any:
    """
    Convert models, numpy scalars and arrays to JSON types.

    Non-finite floats become None.
    """
    if hasattr(value, 'to_dict') and not isinstance(value, (pd.DataFrame, pd.Series)):
        return to_jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (pd.DataFrame,)):
        return to_jsonable(value.to_dict(orient='list'))
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value
