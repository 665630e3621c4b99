"""
Scaling exponents, admissible pairs, power-law fits and the sweep verdict.

Exponent formulas run in exact rational arithmetic: real inputs are converted
with Fraction(str(x)) so that 1.5 and 0.8 stay 3/2 and 4/5. Norms and fits
are floating point.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from config import (
    C_INDEPENDENCE_TOLERANCE,
    DELTA_MARGIN,
    MIN_FIT_DECADES,
    MIN_FIT_POINTS,
    SLOPE_STABILITY_TOLERANCE,
    SLOPE_TOLERANCE,
)
from core.errors import EndpointPairError, InvalidDimensionError
from core.validation import parse_exponent
from features.quasimode import ProblemConfig

logger = logging.getLogger(__name__)


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(str(x))


def _inverse(p: Optional[Fraction]) -> Fraction:
    return Fraction(0) if p is None else 1 / p


def _fmt(x: Optional[Fraction]) -> str:
    return 'inf' if x is None else str(x)


# ---------------------------------------------------------------------------
# Admissible pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissiblePair:
    p: Optional[Fraction]  # None is infinity
    q: Fraction
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise InvalidDimensionError(f"n={self.n}: admissible pairs need n >= 3")
        if self.p is not None and self.p < 2:
            raise ValueError(f"p={self.p} < 2 is not admissible")
        if 2 * _inverse(self.p) != Fraction(self.n, 2) - Fraction(self.n) / self.q:
            raise ValueError(f"({_fmt(self.p)},{self.q}) violates 2/p = n/2 - n/q for n={self.n}")

    @classmethod
    def from_text(cls, p_text: str, q_text: str, n: int) -> 'AdmissiblePair':
        q = parse_exponent(q_text)
        if q is None:
            raise ValueError("q = inf is not admissible")
        return cls(parse_exponent(p_text), q, n)

    @property
    def is_mass_conservation(self) -> bool:
        return self.p is None and self.q == 2

    @property
    def label(self) -> str:
        return f"{_fmt(self.p)},{self.q}"

    def require_non_endpoint(self) -> 'AdmissiblePair':
        if self.is_mass_conservation:
            raise EndpointPairError("Pair (inf,2) is mass conservation and holds trivially")
        return self


def admissible_pairs(n: int, count: int) -> List[AdmissiblePair]:
    """``count`` pairs with q evenly spaced from 2 to 2n/(n-2), in exact arithmetic."""
    if n < 3:
        raise InvalidDimensionError(f"n={n}: admissible pairs need n >= 3")
    if count < 2:
        raise ValueError("count must be at least 2 (both ends of the admissible line)")
    q_end = Fraction(2 * n, n - 2)
    pairs = []
    for i in range(count):
        q = 2 + (q_end - 2) * Fraction(i, count - 1)
        gap = Fraction(n, 2) - Fraction(n) / q
        pairs.append(AdmissiblePair(None if gap == 0 else 2 / gap, q, n))
    return pairs


# ---------------------------------------------------------------------------
# Predicted exponents
# ---------------------------------------------------------------------------

def _dims(n: int) -> Tuple[int, int]:
    return (n - 1, 1) if n % 2 else (n - 2, 2)


def exponent_sum(n: int, alpha, gamma) -> Fraction:
    d_y, d_z = _dims(n)
    return frac(alpha) * d_y + 2 * d_z * frac(gamma)


def threshold_for(n: int, alpha, gamma) -> Fraction:
    return exponent_sum(n, alpha, gamma) / n


def beta_threshold(config: ProblemConfig) -> Fraction:
    """beta above which ||W_R|| / ||f_R||_2 grows."""
    return threshold_for(config.n, config.alpha, config.gamma)


def gamma_window(n: int, alpha) -> Tuple[Fraction, Fraction]:
    """Open gamma interval on which delta > 0 at threshold beta, clipped to (1/2, 1)."""
    a = frac(alpha)
    width = (2 - a) * n / (6 if n % 2 else 12)
    lo = max(a / 2, Fraction(1, 2))
    hi = min(a / 2 + width, Fraction(1))
    if lo >= hi:
        raise ValueError(f"empty gamma window for n={n}, alpha={alpha}")
    return lo, hi


DELTA_TERM_NAMES = ('2g-b', '2a+2-3b', 'a/2+1-b', '3-a/2-b', 'g+1-b', 'a+2-2b')


def delta_terms(n: int, alpha, gamma, beta) -> Dict[str, Fraction]:
    """The six affine terms inside the delta minimum."""
    a, g, b = frac(alpha), frac(gamma), frac(beta)
    values = (2 * g - b, 2 * a + 2 - 3 * b, a / 2 + 1 - b, 3 - a / 2 - b, g + 1 - b, a + 2 - 2 * b)
    return dict(zip(DELTA_TERM_NAMES, values))


def printed_threshold_delta_terms(n: int, alpha, gamma) -> Dict[str, Fraction]:
    """The same six terms in the closed forms printed for beta at threshold."""
    a, g = frac(alpha), frac(gamma)
    if n % 2:
        values = ((n - 1) * (2 * g - a) / n,
                  ((2 - a) * n + 3 * a - 6 * g) / n,
                  ((2 - a) * n + 2 * a - 4 * g) / (2 * n),
                  (3 * (2 - a) * n + 2 * a - 4 * g) / (2 * n),
                  (n * (g + 1) - (n - 1) * a - 2 * g) / n,
                  ((2 - a) * n + 2 * a - 4 * g) / n)
    else:
        values = ((n - 2) * (2 * g - a) / n,
                  ((2 - a) * n + 6 * a - 12 * g) / n,
                  ((2 - a) * n + 4 * a - 8 * g) / (2 * n),
                  (3 * (2 - a) * n + 4 * a - 8 * g) / (2 * n),
                  (n * (g + 1) - (n - 2) * a - 4 * g) / n,
                  ((2 - a) * n + 4 * a - 8 * g) / n)
    return dict(zip(DELTA_TERM_NAMES, values))


def delta_value(n: int, alpha, gamma, beta, p: Optional[Fraction]) -> Tuple[Fraction, List[str]]:
    """delta and every term attaining the minimum."""
    base = 2 * (frac(beta) * n - exponent_sum(n, alpha, gamma)) * _inverse(p) / n
    terms = delta_terms(n, alpha, gamma, beta)
    smallest = min(terms.values())
    return base + smallest, [name for name, value in terms.items() if value == smallest]


def delta_lipschitz_bound(n: int, gamma) -> Fraction:
    """Largest |d/d alpha| among the threshold terms (each is affine in alpha)."""
    at_one = printed_threshold_delta_terms(n, 1, gamma)
    at_two = printed_threshold_delta_terms(n, 2, gamma)
    return max(abs(at_two[name] - at_one[name]) for name in DELTA_TERM_NAMES)


def window_positivity_table(dimensions: Sequence[int] = (3, 4, 5, 6),
                            alphas: Sequence = (Fraction(11, 10), Fraction(3, 2), Fraction(19, 10)),
                            p: Optional[Fraction] = Fraction(2)) -> List[Dict]:
    """delta at the window midpoint and threshold beta for every (n, alpha), exactly."""
    rows = []
    for n in dimensions:
        for alpha in alphas:
            lo, hi = gamma_window(n, alpha)
            gamma = (lo + hi) / 2
            beta = threshold_for(n, alpha, gamma)
            delta, attained = delta_value(n, alpha, gamma, beta, p)
            rows.append({'n': n, 'alpha': frac(alpha), 'gamma_lo': lo, 'gamma_hi': hi,
                         'gamma_mid': gamma, 'beta_threshold': beta, 'delta': delta,
                         'attained_by': ','.join(attained), 'positive': delta > 0})
    return rows


def forcing_bound_exponent(config: ProblemConfig, pair: AdmissiblePair) -> Dict[str, Fraction]:
    """Exponents of the ||F_R||_{L^p L^q} bound with T = R^beta.

    ``shape`` is T^(1/p) R^(D/2q) max{R^-2g, T^2 R^-(2a+2)}; ``full`` adds the
    cutoff-term bounds R^-(6-2a), T R^-(a+1+g), T R^-4 inside the maximum.
    """
    n, a, g, b = config.n, frac(config.alpha), frac(config.gamma), frac(config.beta)
    prefactor = b * _inverse(pair.p) + exponent_sum(n, a, g) / (2 * pair.q)
    shape_terms = [-2 * g, 2 * b - 2 * a - 2]
    full_terms = shape_terms + [-(6 - 2 * a), b - (a + 1 + g), b - 4]
    return {'shape': prefactor + max(shape_terms), 'full': prefactor + max(full_terms)}


@dataclass(frozen=True)
class ExponentSet:
    f_r_slope: Fraction
    w_r_spatial_slope: Fraction
    w_r_slope: Fraction
    f_r_forcing_bound_exponents: Dict[str, Fraction]
    ratio_wf_slope: Fraction
    kappa: Fraction
    delta: Fraction
    delta_attained_by: List[str]
    gamma_window: Tuple[Fraction, Fraction]
    beta_threshold: Fraction

    def as_dict(self) -> Dict:
        return {
            'f_r_slope': float(self.f_r_slope),
            'w_r_spatial_slope': float(self.w_r_spatial_slope),
            'w_r_slope': float(self.w_r_slope),
            'f_r_forcing_bound_exponents': {k: float(v) for k, v in
                                            self.f_r_forcing_bound_exponents.items()},
            'ratio_wf_slope': float(self.ratio_wf_slope),
            'kappa': float(self.kappa),
            'delta': float(self.delta),
            'delta_exact': str(self.delta),
            'delta_attained_by': list(self.delta_attained_by),
            'gamma_window': [float(self.gamma_window[0]), float(self.gamma_window[1])],
            'beta_threshold': float(self.beta_threshold),
            'beta_threshold_exact': str(self.beta_threshold),
        }


def predicted_exponents(config: ProblemConfig, pair: AdmissiblePair) -> ExponentSet:
    n, a, g, b = config.n, frac(config.alpha), frac(config.gamma), frac(config.beta)
    total = exponent_sum(n, a, g)
    inv_p = _inverse(pair.p)
    ratio_wf = (b * n - total) * inv_p / n
    kappa = 2 * ratio_wf + min(2 * g - b, 2 * a + 2 - 3 * b)
    delta, attained = delta_value(n, a, g, b, pair.p)
    return ExponentSet(
        f_r_slope=total / 4,
        w_r_spatial_slope=total / (2 * pair.q),
        w_r_slope=b * inv_p + total / (2 * pair.q),
        f_r_forcing_bound_exponents=forcing_bound_exponent(config, pair),
        ratio_wf_slope=ratio_wf,
        kappa=kappa,
        delta=delta,
        delta_attained_by=attained,
        gamma_window=gamma_window(n, a),
        beta_threshold=total / n,
    )


# ---------------------------------------------------------------------------
# Fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    max_abs_residual: float
    r_values: List[float] = field(default_factory=list)
    sample_count: int = 0
    stderr: float = 0.0

    def as_dict(self) -> Dict:
        return {'slope': self.slope, 'intercept': self.intercept,
                'max_abs_residual': self.max_abs_residual, 'sample_count': self.sample_count,
                'stderr': self.stderr}


def fit_power_law(r_values: Sequence[float], values: Sequence[float],
                  min_points: int = MIN_FIT_POINTS,
                  min_decades: float = MIN_FIT_DECADES) -> ScalingFit:
    """Least-squares slope of log(value) against log(R)."""
    r = np.asarray(r_values, dtype=float)
    v = np.asarray(values, dtype=float)
    if r.size < min_points:
        raise ValueError(f"fit needs at least {min_points} points, got {r.size}")
    if np.any(r <= 0) or np.any(v <= 0):
        raise ValueError("power-law fits need positive R and positive values")
    if np.log10(r.max() / r.min()) < min_decades - 1e-12:
        raise ValueError(f"fit range spans fewer than {min_decades:g} decades")
    x, y = np.log(r), np.log(v)
    result = linregress(x, y)
    residual = y - (result.intercept + result.slope * x)
    return ScalingFit(slope=float(result.slope), intercept=float(result.intercept),
                      max_abs_residual=float(np.max(np.abs(residual))),
                      r_values=r.tolist(), sample_count=int(r.size),
                      stderr=float(result.stderr))


def fit_exponent(rows: Sequence, column: str) -> ScalingFit:
    """Fit one sweep column; every row must be converged."""
    usable = [row for row in rows if row.converged]
    if len(usable) < len(rows):
        logger.warning("%d unconverged rows excluded from the %s fit", len(rows) - len(usable), column)
    return fit_power_law([row.R for row in usable], [getattr(row, column) for row in usable])


def slope_stability(r_values: Sequence[float], values: Sequence[float]) -> Dict:
    """Slope change when the lowest R point is dropped."""
    order = np.argsort(r_values)
    r = np.asarray(r_values, dtype=float)[order]
    v = np.asarray(values, dtype=float)[order]
    full = fit_power_law(r, v)
    reduced = fit_power_law(r[1:], v[1:], min_points=MIN_FIT_POINTS - 1, min_decades=0.0)
    change = abs(full.slope - reduced.slope)
    return {'slope': full.slope, 'slope_without_lowest': reduced.slope, 'change': change,
            'stable': change <= SLOPE_STABILITY_TOLERANCE}


def c_independence(slopes_a: Dict[str, float], slopes_b: Dict[str, float],
                   tolerance: float = C_INDEPENDENCE_TOLERANCE) -> Dict:
    """Compare slopes fitted under the two model coefficients."""
    shared = sorted(set(slopes_a) & set(slopes_b))
    differences = {name: abs(slopes_a[name] - slopes_b[name]) for name in shared}
    return {'differences': differences,
            'passed': all(d <= tolerance for d in differences.values()),
            'tolerance': tolerance}


def empirical_constants(r_values: Sequence[float], values: Sequence[float],
                        exponent: float) -> Tuple[float, float]:
    """min and max of value / R^exponent over the sweep."""
    r = np.asarray(r_values, dtype=float)
    ratio = np.asarray(values, dtype=float) / r ** exponent
    return float(ratio.min()), float(ratio.max())


# ---------------------------------------------------------------------------
# Sweep rows and verdict
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    R: float
    horizon: float
    f_r_norm: float
    w_r_norm: float
    forcing_norm: float
    rest_norm: float
    ftilde_norm: float
    forcing_pq_norm: float
    ratio: float
    errors: Dict[str, float] = field(default_factory=dict)
    converged: bool = True

    @property
    def ratio_wf(self) -> float:
        return self.w_r_norm / self.f_r_norm

    def as_record(self) -> Dict:
        record = {
            'R': self.R,
            'T': self.horizon,
            'f_R_norm': self.f_r_norm,
            'W_R_norm': self.w_r_norm,
            'F_R_norm': self.forcing_norm,
            'rest_norm': self.rest_norm,
            'Ftilde_norm': self.ftilde_norm,
            'F_R_pq_norm': self.forcing_pq_norm,
            'ratio': self.ratio,
            'ratio_wf': self.ratio_wf,
        }
        record.update({f'err_{name}': value for name, value in self.errors.items()})
        record['converged'] = self.converged
        return record


def _slope_check(fit: ScalingFit, predicted: float, tolerance: float = SLOPE_TOLERANCE) -> Dict:
    return {'fitted': fit.slope, 'predicted': predicted,
            'difference': fit.slope - predicted,
            'passed': abs(fit.slope - predicted) <= tolerance}


def _insufficient_verdict(config: ProblemConfig, pair: AdmissiblePair, exps: ExponentSet,
                          rows: Sequence[SweepRow], reason: str) -> Dict:
    """FAIL on every criterion when the sweep cannot be fitted."""
    def failed(predicted: float) -> Dict:
        return {'fitted': None, 'predicted': predicted, 'passed': False, 'reason': reason}

    if exps.delta <= 0:
        criterion_b = {'status': 'N/A', 'delta': float(exps.delta), 'passed': True,
                       'reason': 'delta <= 0: gamma outside the positivity window'}
    else:
        criterion_b = {'status': 'FAIL', 'delta': float(exps.delta), 'passed': False,
                       'reason': reason}
    components = {
        'f_R': failed(float(exps.f_r_slope)),
        'W_R': failed(float(exps.w_r_slope)),
        'W_R_spatial': failed(float(exps.w_r_spatial_slope)),
        'F_R_bound': {'fitted': None, 'limit': SLOPE_TOLERANCE, 'passed': False, 'reason': reason},
    }
    result = {
        'status': 'FAIL',
        'reason': reason,
        'config': config.as_dict(),
        'pair': pair.label,
        'predicted': exps.as_dict(),
        'fits': {},
        'criteria': {'a_ratio_wf': failed(float(exps.ratio_wf_slope)),
                     'b_ratio_growth': criterion_b,
                     'c_components': {'components': components, 'passed': False}},
        'unconverged_rows': [row.R for row in rows if not row.converged],
        'q': float(pair.q),
    }
    logger.warning("Verdict FAIL: %s", reason)
    return result


def verdict(config: ProblemConfig, pair: AdmissiblePair, rows: Sequence[SweepRow]) -> Dict:
    """PASS when the W/f growth, ratio growth and component slopes all match."""
    pair.require_non_endpoint()
    exps = predicted_exponents(config, pair)
    rows = sorted(rows, key=lambda row: row.R)
    r = [row.R for row in rows]
    unconverged = [row.R for row in rows if not row.converged]

    bound = float(exps.f_r_forcing_bound_exponents['shape'])
    try:
        fits = {
            'f_R': fit_exponent(rows, 'f_r_norm'),
            'W_R': fit_exponent(rows, 'w_r_norm'),
            'ratio_wf': fit_exponent(rows, 'ratio_wf'),
            'ratio': fit_exponent(rows, 'ratio'),
            'F_R': fit_exponent(rows, 'forcing_norm'),
            'rest': fit_exponent(rows, 'rest_norm'),
            'Ftilde': fit_exponent(rows, 'ftilde_norm'),
            'F_R_pq': fit_exponent(rows, 'forcing_pq_norm'),
        }
        bound_fit = fit_power_law(r, [row.forcing_pq_norm / row.R ** bound for row in rows])
    except ValueError as exc:
        converged = len(rows) - len(unconverged)
        return _insufficient_verdict(config, pair, exps, rows,
                                     f"{converged}/{len(rows)} converged rows: {exc}")

    criterion_a = {
        'fitted': fits['ratio_wf'].slope,
        'predicted': float(exps.ratio_wf_slope),
        'passed': fits['ratio_wf'].slope >= float(exps.ratio_wf_slope) - SLOPE_TOLERANCE,
    }

    ratios = [row.ratio for row in rows]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    if exps.delta <= 0:
        criterion_b = {'status': 'N/A', 'delta': float(exps.delta), 'passed': True,
                       'reason': 'delta <= 0: gamma outside the positivity window'}
    else:
        slope = fits['ratio'].slope
        ok = increasing and slope > 0 and slope >= float(exps.delta) - DELTA_MARGIN
        criterion_b = {'status': 'PASS' if ok else 'FAIL', 'fitted': slope,
                       'delta': float(exps.delta), 'strictly_increasing': increasing,
                       'passed': ok}

    q = float(pair.q)
    w_spatial = fits['W_R'].slope - float(config.beta) * float(_inverse(pair.p))
    components = {
        'f_R': _slope_check(fits['f_R'], float(exps.f_r_slope)),
        'W_R': _slope_check(fits['W_R'], float(exps.w_r_slope)),
        'W_R_spatial': {'fitted': w_spatial, 'predicted': float(exps.w_r_spatial_slope),
                        'passed': abs(w_spatial - float(exps.w_r_spatial_slope)) <= SLOPE_TOLERANCE},
        'F_R_bound': {'fitted': bound_fit.slope, 'limit': SLOPE_TOLERANCE,
                      'passed': bound_fit.slope <= SLOPE_TOLERANCE},
    }
    criterion_c = {'components': components, 'passed': all(c['passed'] for c in components.values())}

    passed = (criterion_a['passed'] and criterion_b['passed'] and criterion_c['passed']
              and not unconverged)
    result = {
        'status': 'PASS' if passed else 'FAIL',
        'config': config.as_dict(),
        'pair': pair.label,
        'predicted': exps.as_dict(),
        'fits': {name: fit.as_dict() for name, fit in fits.items()},
        'criteria': {'a_ratio_wf': criterion_a, 'b_ratio_growth': criterion_b,
                     'c_components': criterion_c},
        'stability': {
            'f_R': slope_stability(r, [row.f_r_norm for row in rows]),
            'W_R': slope_stability(r, [row.w_r_norm for row in rows]),
        },
        'empirical_constants': {
            'f_R': empirical_constants(r, [row.f_r_norm for row in rows], float(exps.f_r_slope)),
            'ratio': empirical_constants(r, ratios, float(exps.delta)),
            'F_R_bound': empirical_constants(r, [row.forcing_pq_norm for row in rows], bound),
        },
        'unconverged_rows': unconverged,
        'q': q,
    }
    logger.info("Verdict %s (ratio slope %.4f, delta %.4f)", result['status'],
                fits['ratio'].slope, float(exps.delta))
    return result
