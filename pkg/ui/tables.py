"""Console table rendering for MagStrich reports."""

from typing import Dict, List, Sequence

import pandas as pd

_FLOAT = '{:.6g}'.format


def _render(frame: pd.DataFrame) -> str:
    if frame.empty:
        return '(no rows)'
    return frame.to_string(index=False, float_format=_FLOAT)


def eigen_table(rows: List[Dict]) -> str:
    """
    Closed-form vs numerical eigenvalues.

    Args:
        rows: dicts with keys level, closed_form, numeric, difference

    Returns:
        Rendered table text
    """
    return _render(pd.DataFrame(rows, columns=['level', 'closed_form', 'numeric', 'difference']))


def checks_table(report: Dict) -> str:
    """One line per identity check of a verify-potential report."""
    rows = []
    for check in report.get('checks', []):
        rows.append({
            'check': check['name'],
            'max_error': check.get('max_error'),
            'tolerance': check.get('tolerance'),
            'status': check.get('status', 'PASS' if check.get('passed') else 'FAIL'),
        })
    return _render(pd.DataFrame(rows, columns=['check', 'max_error', 'tolerance', 'status']))


def errata_table_text(rows: List[Dict], only_errata: bool = False) -> str:
    frame = pd.DataFrame(rows, columns=['term', 'group', 'printed', 'recovered', 'difference', 'erratum'])
    if only_errata:
        frame = frame[frame['erratum']]
    return _render(frame)


def sweep_table(frame: pd.DataFrame) -> str:
    columns = [c for c in ('R', 'f_R_norm', 'W_R_norm', 'F_R_norm', 'rest_norm',
                           'Ftilde_norm', 'ratio', 'converged') if c in frame.columns]
    return _render(frame[columns])


def verdict_table(verdict: Dict) -> str:
    """Fitted vs predicted slopes plus the criterion outcomes."""
    predicted = verdict['predicted']
    criteria = verdict['criteria']
    components = criteria['c_components']['components']
    rows = [
        {'quantity': 'W_R / f_R', 'fitted': criteria['a_ratio_wf']['fitted'],
         'predicted': criteria['a_ratio_wf']['predicted'],
         'status': 'PASS' if criteria['a_ratio_wf']['passed'] else 'FAIL'},
        {'quantity': 'ratio (>= delta - margin)',
         'fitted': verdict['fits'].get('ratio', {}).get('slope'), 'predicted': predicted['delta'],
         'status': criteria['b_ratio_growth']['status']},
    ]
    for name, check in components.items():
        rows.append({'quantity': name, 'fitted': check['fitted'],
                     'predicted': check.get('predicted', check.get('limit')),
                     'status': 'PASS' if check['passed'] else 'FAIL'})
    table = _render(pd.DataFrame(rows, columns=['quantity', 'fitted', 'predicted', 'status']))
    if 'reason' in verdict:
        return f"{table}\nVerdict: {verdict['status']} ({verdict['reason']})"
    return f"{table}\nVerdict: {verdict['status']}"


def norms_table(results: Dict) -> str:
    rows = [{'quantity': name, 'value': r['value'], 'rel_error': r['rel_error_estimate'],
             'converged': r['converged']} for name, r in results.items()]
    return _render(pd.DataFrame(rows, columns=['quantity', 'value', 'rel_error', 'converged']))


def window_table(rows: Sequence[Dict]) -> str:
    return _render(pd.DataFrame(list(rows)))
