"""
Residual oracle: checks the printed forcing against direct differentiation.

Three independent evaluations of F_R = L W_R are compared:
  * the exact chain-rule assembly (QuasiModeField.eval_f_direct),
  * Richardson-extrapolated central differences of W_R,
  * the printed term tables, combined as Phi * F + G_R.
Printed coefficients that disagree are isolated by a least-squares fit of the
term basis against the direct values.
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from config import (
    DEFAULT_SEED,
    ERRATA_TOLERANCE,
    FD_CHECK_R,
    FD_STEPS,
    RESIDUAL_R,
    RESIDUAL_SAMPLES,
    RESIDUAL_TOLERANCE,
)
from features.printed import (
    F_TERMS,
    TERMS,
    TERM_NAMES,
    combine,
    corrected_coefficients,
    cutoff_factor,
    printed_coefficients,
    term_basis,
)
from features.quasimode import ProblemConfig, QuasiModeField, make_field

logger = logging.getLogger(__name__)


def sample_support_points(qm: QuasiModeField, count: int, rng: np.random.Generator,
                          plateau: bool = False, fill: float = 1.0):
    """Random (t, y, z) inside the cutoff support.

    ``plateau=True`` restricts to the region where every cutoff equals 1.
    ``fill`` < 1 shrinks the sampled region towards the support centre.
    """
    d_y, d_z = qm.config.d_y, qm.config.d_z
    width = qm.R ** qm.config.gamma * (0.5 if plateau else 1.0) * fill
    t = rng.uniform(0.0, qm.horizon, size=count)
    offsets = rng.uniform(-width, width, size=(count, d_z))
    z = qm.R + offsets
    z = z[:, 0] if d_z == 1 else z
    s = qm.z_norm(z)
    m = rng.uniform(0.0, (0.5 if plateau else 1.0) * fill, size=count)
    direction = rng.normal(size=(count, d_y))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    y = direction * (s * np.sqrt(m))[:, None]
    return t, y, z


# ---------------------------------------------------------------------------
# Finite-difference oracle
# ---------------------------------------------------------------------------

def _shift_z(z: np.ndarray, axis: int, h: float) -> np.ndarray:
    if z.ndim == 1:
        return z + h
    shifted = z.copy()
    shifted[:, axis] += h
    return shifted


def _central_operator(qm: QuasiModeField, t, y, z, h: float) -> np.ndarray:
    """L W_R with second-order central differences of step h."""
    w = qm.eval_w_r
    centre = w(t, y, z)
    d_t = (w(t + h, y, z) - w(t - h, y, z)) / (2.0 * h)
    laplacian = np.zeros_like(centre)
    transport = np.zeros_like(centre)
    omega_y = y @ qm.config.potential.matrix.omega.T
    for i in range(qm.config.d_y):
        step = np.zeros(qm.config.d_y)
        step[i] = h
        plus, minus = w(t, y + step, z), w(t, y - step, z)
        laplacian += (plus - 2.0 * centre + minus) / h ** 2
        transport += omega_y[:, i] * (plus - minus) / (2.0 * h)
    for j in range(qm.config.d_z):
        plus, minus = w(t, y, _shift_z(z, j, h)), w(t, y, _shift_z(z, j, -h))
        laplacian += (plus - 2.0 * centre + minus) / h ** 2
    s = qm.z_norm(z)
    alpha = qm.config.alpha
    q = np.sum(y * y, axis=-1)
    return (1j * d_t - laplacian + 2j * s ** (-alpha) * transport
            + qm.config.c * q * s ** (-2.0 * alpha) * centre)


def eval_f_fd(qm: QuasiModeField, t, y, z, step: float,
              tolerance: Optional[float] = None) -> np.ndarray:
    """Richardson-extrapolated finite-difference F_R.

    With a tolerance, the difference between the step and half-step estimates
    must stay below tolerance * max|F_R|.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    z = np.asarray(z, dtype=float)
    t = np.broadcast_to(np.asarray(t, dtype=float), (y.shape[0],))
    coarse = _central_operator(qm, t, y, z, step)
    fine = _central_operator(qm, t, y, z, step / 2.0)
    if tolerance is not None:
        scale = max(float(np.max(np.abs(fine))), np.finfo(float).tiny)
        estimate = float(np.max(np.abs(fine - coarse))) / scale
        if estimate > tolerance:
            raise ValueError(
                f"step={step:g} too large: estimated relative error {estimate:.2e} > {tolerance:.2e}"
            )
    return (4.0 * fine - coarse) / 3.0


def fd_convergence_order(qm: QuasiModeField, count: int = 50, seed: int = DEFAULT_SEED,
                         steps: Sequence[float] = FD_STEPS) -> Dict:
    """Observed order of eval_f_fd against the exact assembly under step halving."""
    rng = np.random.default_rng(seed)
    t, y, z = sample_support_points(qm, count, rng, fill=0.9)
    exact = qm.eval_f_direct(t, y, z)
    scale = float(np.max(np.abs(exact)))
    errors = [float(np.max(np.abs(eval_f_fd(qm, t, y, z, h) - exact))) / scale for h in steps]
    orders = [float(np.log2(errors[i] / errors[i + 1])) for i in range(len(errors) - 1)]
    logger.debug("FD errors %s, orders %s", errors, orders)
    return {'steps': list(steps), 'errors': errors, 'orders': orders, 'seed': seed}


# ---------------------------------------------------------------------------
# Printed decomposition and errata
# ---------------------------------------------------------------------------

def _design_matrix(qm: QuasiModeField, t, rho, z) -> np.ndarray:
    basis = term_basis(qm, t, rho, z)
    phi = cutoff_factor(qm, rho, z)
    columns = [basis[name] * (phi if name in F_TERMS else 1.0) for name in TERM_NAMES]
    return np.stack(columns, axis=1)


def fit_printed_coefficients(qm: QuasiModeField, t, y, z) -> Dict:
    """Real coefficients c_j minimising |sum_j c_j basis_j - F_R| over the points."""
    direct = qm.eval_f_direct(t, y, z)
    rho = np.linalg.norm(y, axis=-1)
    matrix = _design_matrix(qm, t, rho, z)
    scales = np.linalg.norm(matrix, axis=0)
    usable = scales > 0
    stacked = np.vstack([matrix.real, matrix.imag])[:, usable] / scales[usable]
    target = np.concatenate([direct.real, direct.imag])
    solution, _, rank, _ = np.linalg.lstsq(stacked, target, rcond=None)
    coefficients = np.full(len(TERM_NAMES), np.nan)
    coefficients[usable] = solution / scales[usable]
    fitted = stacked @ solution
    residual = float(np.linalg.norm(fitted - target) / np.linalg.norm(target))
    if rank < int(np.sum(usable)):
        logger.warning("Term basis is rank deficient (%d of %d columns)", rank, int(np.sum(usable)))
    return {
        'coefficients': dict(zip(TERM_NAMES, coefficients.tolist())),
        'relative_residual': residual,
        'rank': int(rank),
        'unsampled_terms': [name for name, ok in zip(TERM_NAMES, usable) if not ok],
    }


def errata_table(reference: Dict[str, float], recovered: Dict[str, float],
                 tolerance: float = ERRATA_TOLERANCE) -> List[Dict]:
    """Per-term comparison of reference (printed) and recovered coefficients."""
    rows = []
    for term in TERMS:
        printed = reference[term.name]
        found = recovered[term.name]
        difference = found - printed if np.isfinite(found) else np.nan
        rows.append({
            'term': term.name,
            'group': term.group,
            'basis': term.description,
            'printed': printed,
            'recovered': found,
            'difference': difference,
            'erratum': bool(np.isfinite(difference)
                            and abs(difference) > tolerance * max(1.0, abs(printed))),
        })
    return rows


def _relative_discrepancy(direct: np.ndarray, other: np.ndarray) -> float:
    scale = float(np.max(np.abs(direct)))
    if scale == 0.0:
        return float(np.max(np.abs(other)))
    return float(np.max(np.abs(direct - other))) / scale


def residual_report(config: ProblemConfig, R: float = RESIDUAL_R, count: int = RESIDUAL_SAMPLES,
                    seed: int = DEFAULT_SEED, tolerance: float = RESIDUAL_TOLERANCE,
                    perturb: Optional[Dict] = None, plateau: bool = False,
                    fd_check: bool = True) -> Dict:
    """Compare the printed decomposition with the exact forcing.

    ``perturb={'term': name, 'factor': f}`` multiplies one printed coefficient
    by f before the comparison (fault injection for the errata machinery).
    Passes when the printed decomposition, with every isolated erratum
    replaced by its recovered value, matches the exact forcing to tolerance.
    """
    qm = make_field(config, R)
    rng = np.random.default_rng(seed)
    logger.info("Residual check: n=%d, R=%g, %d points, seed=%d", config.n, R, count, seed)
    t, y, z = sample_support_points(qm, count, rng, plateau=plateau)
    rho = np.linalg.norm(y, axis=-1)
    direct = qm.eval_f_direct(t, y, z)

    printed = printed_coefficients(config.n, config.alpha)
    if perturb:
        name = perturb['term']
        if name not in printed:
            raise ValueError(f"Unknown term {name!r}")
        printed[name] *= float(perturb.get('factor', 1.001))
    basis = term_basis(qm, t, rho, z)
    printed_values = combine(qm, basis, printed, rho, z)
    printed_error = _relative_discrepancy(direct, printed_values)

    fit = fit_printed_coefficients(qm, t, y, z)
    rows = errata_table(printed, fit['coefficients'])
    corrected = dict(printed)
    for row in rows:
        if row['erratum']:
            corrected[row['term']] = row['recovered']
    corrected_error = _relative_discrepancy(direct, combine(qm, basis, corrected, rho, z))
    exact_error = _relative_discrepancy(
        direct, combine(qm, basis, corrected_coefficients(config.n, config.alpha), rho, z))
    g_part = combine(qm, basis, {**{k: 0.0 for k in F_TERMS},
                                 **{k: v for k, v in printed.items() if k not in F_TERMS}}, rho, z)

    report = {
        'config': config.as_dict(),
        'R': R,
        'samples': count,
        'seed': seed,
        'plateau_only': plateau,
        'perturbation': perturb,
        'max_rel_error_printed': printed_error,
        'max_rel_error_corrected': corrected_error,
        'max_rel_error_derived_table': exact_error,
        'max_abs_g_r': float(np.max(np.abs(g_part))),
        'fit_relative_residual': fit['relative_residual'],
        'errata': rows,
        'errata_terms': [row['term'] for row in rows if row['erratum']],
        'tolerance': tolerance,
    }
    if fd_check:
        report['fd'] = fd_convergence_order(make_field(config, max(R, FD_CHECK_R)), seed=seed)
    report['passed'] = corrected_error <= tolerance
    if report['errata_terms']:
        logger.warning("Printed coefficients differ from direct differentiation: %s",
                       ', '.join(report['errata_terms']))
    return report
