"""
Report writers: sweep CSV, JSON summaries and two-column plot data.

Writers go through a temporary file in the target directory followed by
os.replace, so a failed write never leaves a truncated report behind. They
return (success, message) and log failures instead of raising.
"""

import json
import logging
import os
import tempfile
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from config import CSV_FLOAT_FORMAT
from features.scaling import SweepRow

logger = logging.getLogger(__name__)

SWEEP_CSV = 'sweep.csv'
VERDICT_JSON = 'verdict.json'
ERRATA_JSON = 'errata.json'
POTENTIAL_JSON = 'potential.json'
NORMS_JSON = 'norms.json'

PLOT_QUANTITIES = {
    'f_R': 'f_R_norm',
    'W_R': 'W_R_norm',
    'F_R': 'F_R_norm',
    'rest': 'rest_norm',
    'Ftilde': 'Ftilde_norm',
    'ratio': 'ratio',
    'ratio_wf': 'ratio_wf',
}


def _json_default(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _atomic_write(path: str, writer: Callable[[str], None]) -> Tuple[bool, str]:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        with tempfile.NamedTemporaryFile(delete=False, dir=directory, suffix='.tmp') as tmp_file:
            tmp_path = tmp_file.name
    except OSError:
        logger.exception("Cannot prepare %s", path)
        return False, f"Could not write {path}"
    try:
        writer(tmp_path)
        os.replace(tmp_path, path)
        return True, f"Wrote {path}"
    except Exception:
        logger.exception("Error writing %s", path)
        return False, f"An unexpected error occurred while writing {path}"
    finally:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)


def sweep_frame(rows: Sequence[SweepRow]) -> pd.DataFrame:
    return pd.DataFrame([row.as_record() for row in sorted(rows, key=lambda r: r.R)])


def write_sweep_csv(rows: Sequence[SweepRow], path: str) -> Tuple[bool, str]:
    frame = sweep_frame(rows)
    return _atomic_write(path, lambda tmp: frame.to_csv(tmp, index=False,
                                                         float_format=CSV_FLOAT_FORMAT))


def write_json(data: Dict, path: str) -> Tuple[bool, str]:
    text = json.dumps(data, indent=2, default=_json_default, allow_nan=True) + '\n'

    def writer(tmp: str):
        with open(tmp, 'w', encoding='utf-8') as handle:
            handle.write(text)
    return _atomic_write(path, writer)


def write_plot_data(r_values: Sequence[float], values: Sequence[float],
                    path: str) -> Tuple[bool, str]:
    """Two columns: log10 R and log10 value."""
    data = np.column_stack([np.log10(np.asarray(r_values, dtype=float)),
                            np.log10(np.asarray(values, dtype=float))])
    return _atomic_write(path, lambda tmp: np.savetxt(tmp, data, fmt='%.16e',
                                                      header='log10_R log10_value'))


def write_sweep_reports(rows: Sequence[SweepRow], verdict: Dict, out_dir: str,
                        formats: Sequence[str]) -> List[Tuple[bool, str]]:
    results = []
    if 'csv' in formats:
        results.append(write_sweep_csv(rows, os.path.join(out_dir, SWEEP_CSV)))
    if 'json' in formats:
        results.append(write_json(verdict, os.path.join(out_dir, VERDICT_JSON)))
    if 'plot' in formats:
        frame = sweep_frame(rows)
        for quantity, column in PLOT_QUANTITIES.items():
            results.append(write_plot_data(frame['R'], frame[column],
                                           os.path.join(out_dir, f'plot_{quantity}.dat')))
    return results


def load_sweep_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path)


def load_json(path: str) -> Dict:
    with open(path, encoding='utf-8') as handle:
        return json.load(handle)
