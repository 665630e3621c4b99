"""
R-sweep execution.

Each R value is independent: the field, all six norms and the ratio are
computed in a worker of a shared thread pool and the rows are joined and
sorted by R before any fit runs. numpy releases the GIL inside the heavy
array kernels, so threads overlap well.
"""

import concurrent.futures
import logging
from typing import Dict, List, Optional, Sequence

from config import WORKER_COUNT
from core.validation import validate_r_grid
from features.mixednorm import QuadratureSpec, default_quadrature, strichartz_ratio
from features.quasimode import ProblemConfig, make_field
from features.scaling import AdmissiblePair, SweepRow

logger = logging.getLogger(__name__)


_sweep_executor = concurrent.futures.ThreadPoolExecutor(
    max_workers=WORKER_COUNT,
    thread_name_prefix="r_sweep",
)


def compute_row(config: ProblemConfig, pair: AdmissiblePair, R: float,
                quad: QuadratureSpec, mode: str = 'smooth') -> SweepRow:
    """All norms at one R."""
    qm = make_field(config, R, mode)
    result = strichartz_ratio(R, pair, qm, quad)
    errors = {
        'f_R': result.initial.rel_error_estimate,
        'W_R': result.numerator.rel_error_estimate,
        'F_R': result.forcing.rel_error_estimate,
        'rest': result.rest.rel_error_estimate,
        'Ftilde': result.forcing_total.rel_error_estimate,
        'F_R_pq': result.forcing_pq.rel_error_estimate,
    }
    row = SweepRow(
        R=R,
        horizon=result.horizon,
        f_r_norm=result.initial.value,
        w_r_norm=result.numerator.value,
        forcing_norm=result.forcing.value,
        rest_norm=result.rest.value,
        ftilde_norm=result.forcing_total.value,
        forcing_pq_norm=result.forcing_pq.value,
        ratio=result.ratio,
        errors=errors,
        converged=result.converged,
    )
    logger.info("R=%g done (ratio=%.6e%s)", R, row.ratio, '' if row.converged else ', unconverged')
    return row


def run_sweep(config: ProblemConfig, pair: AdmissiblePair, r_grid: Sequence[float],
              quad: Optional[QuadratureSpec] = None, mode: str = 'smooth') -> List[SweepRow]:
    """Rows for every R, ordered by R."""
    pair.require_non_endpoint()
    r_values = sorted(float(r) for r in r_grid)
    if list(r_grid) != r_values:
        raise ValueError("r_grid must be ascending")
    ok, message = validate_r_grid(r_values[0], r_values[-1], len(r_values))
    if not ok:
        raise ValueError(message)
    quad = quad or default_quadrature(config.parity)
    logger.info("Sweep n=%d pair=(%s) over %d R values, %d workers",
                config.n, pair.label, len(r_values), WORKER_COUNT)

    futures: Dict[concurrent.futures.Future, float] = {
        _sweep_executor.submit(compute_row, config, pair, R, quad, mode): R for R in r_values
    }
    rows = []
    for future in concurrent.futures.as_completed(futures):
        R = futures[future]
        try:
            rows.append(future.result())
        except Exception:
            logger.exception("Sweep point R=%g failed", R)
            raise
    return sorted(rows, key=lambda row: row.R)
