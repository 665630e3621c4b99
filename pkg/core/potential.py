"""
Magnetic potential A(x) = |x|^(-alpha) M x and its identities.

M is block antisymmetric: diag(Omega_{n-1}, 0) for odd n and
diag(Omega_{n-2}, 0_2) for even n, where Omega_{2k} stacks k copies of
sigma = [[0, 1], [-1, 0]]. All evaluators accept batched points with the
coordinate axis last.

Coordinates follow the construction: x = (y, z) with y in R^{2k} the
"magnetic" block and z the remaining 1 (odd) or 2 (even) coordinates.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import block_diag
from scipy.stats import linregress

from core.errors import InvalidDimensionError, OutsideSupportError, SingularityError

logger = logging.getLogger(__name__)

SIGMA = np.array([[0.0, 1.0], [-1.0, 0.0]])


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

def build_omega(k: int) -> np.ndarray:
    """Block-diagonal 2k x 2k matrix with k copies of sigma."""
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidDimensionError(f"Block count must be a positive integer, got {k!r}")
    return block_diag(*([SIGMA] * int(k)))


@dataclass(frozen=True)
class MatrixSpec:
    k: int
    omega: np.ndarray
    m: np.ndarray
    n: int
    parity: str

    @property
    def d_y(self) -> int:
        return 2 * self.k

    @property
    def d_z(self) -> int:
        return 1 if self.parity == 'odd' else 2


def build_m(n: int) -> MatrixSpec:
    """Build M for dimension n (odd: one free axis, even: two)."""
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise InvalidDimensionError(f"Dimension n={n!r} not supported: need n >= 3")
    parity = 'odd' if n % 2 else 'even'
    k = (n - 1) // 2 if parity == 'odd' else (n - 2) // 2
    omega = build_omega(k)
    m = np.zeros((n, n))
    m[:2 * k, :2 * k] = omega
    return MatrixSpec(k=k, omega=omega, m=m, n=int(n), parity=parity)


@dataclass(frozen=True)
class PotentialSpec:
    matrix: MatrixSpec
    alpha: float
    regularized: bool = False

    def __post_init__(self):
        if not (1.0 < self.alpha < 2.0):
            raise ValueError(f"alpha={self.alpha} outside (1, 2)")

    @property
    def n(self) -> int:
        return self.matrix.n


def make_potential(n: int, alpha: float, regularized: bool = False) -> PotentialSpec:
    return PotentialSpec(matrix=build_m(n), alpha=float(alpha), regularized=regularized)


# ---------------------------------------------------------------------------
# Pointwise evaluation
# ---------------------------------------------------------------------------

def _points(x, spec: PotentialSpec) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != spec.n:
        raise ValueError(f"Expected points with {spec.n} coordinates, got shape {arr.shape}")
    return arr


def _weight(arr: np.ndarray, spec: PotentialSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Return (w, g) with w the radial weight and grad w = g * x."""
    r2 = np.sum(arr * arr, axis=-1)
    if spec.regularized:
        w = (1.0 + r2) ** (-spec.alpha / 2.0)
        return w, -spec.alpha * w / (1.0 + r2)
    if np.any(r2 == 0.0):
        raise SingularityError("A is singular at x = 0 (use the regularized potential)")
    w = r2 ** (-spec.alpha / 2.0)
    return w, -spec.alpha * w / r2


def eval_a(x, spec: PotentialSpec) -> np.ndarray:
    """A(x) = |x|^(-alpha) M x, or <x>^(-alpha) M x when regularized."""
    arr = _points(x, spec)
    w, _ = _weight(arr, spec)
    return w[..., None] * (arr @ spec.matrix.m.T)


def jacobian_a(x, spec: PotentialSpec) -> np.ndarray:
    """Closed-form DA with (DA)_ij = d_j A_i."""
    arr = _points(x, spec)
    w, g = _weight(arr, spec)
    mx = arr @ spec.matrix.m.T
    grad_w = g[..., None] * arr
    return w[..., None, None] * spec.matrix.m + mx[..., :, None] * grad_w[..., None, :]


def eval_b(x, spec: PotentialSpec) -> np.ndarray:
    """Magnetic field B = DA - (DA)^T."""
    jac = jacobian_a(x, spec)
    return jac - np.swapaxes(jac, -1, -2)


def tangential_b(x, spec: PotentialSpec) -> np.ndarray:
    """Tangential component (x/|x|) . B(x)."""
    arr = _points(x, spec)
    if np.any(np.sum(arr * arr, axis=-1) == 0.0):
        raise SingularityError("B_tau is undefined at x = 0")
    b = eval_b(arr, spec)
    r = np.linalg.norm(arr, axis=-1)
    return np.einsum('...i,...ij->...j', arr, b) / r[..., None]


def tangential_b_expected(x, spec: PotentialSpec) -> np.ndarray:
    """Closed form -(2w + r w'(r)) M x / r for A = w(|x|) M x.

    For the homogeneous weight this is (alpha - 2) A(x) / |x|, which vanishes
    only where M x = 0.
    """
    arr = _points(x, spec)
    w, g = _weight(arr, spec)
    r2 = np.sum(arr * arr, axis=-1)
    r = np.sqrt(r2)
    mx = arr @ spec.matrix.m.T
    return -((2.0 * w + g * r2) / r)[..., None] * mx


def divergence_a(x, spec: PotentialSpec) -> np.ndarray:
    """div A = w tr M + (grad w) . M x, zero for antisymmetric M."""
    arr = _points(x, spec)
    w, g = _weight(arr, spec)
    mx = arr @ spec.matrix.m.T
    return w * np.trace(spec.matrix.m) + g * np.sum(arr * mx, axis=-1)


# ---------------------------------------------------------------------------
# Finite-difference oracles
# ---------------------------------------------------------------------------

def _central_jacobian(x: np.ndarray, spec: PotentialSpec, step: float) -> np.ndarray:
    n = spec.n
    jac = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        jac[:, j] = (eval_a(x + e, spec) - eval_a(x - e, spec)) / (2.0 * step)
    return jac


def fd_jacobian_a(x, spec: PotentialSpec, step: float = 1e-3) -> np.ndarray:
    """Richardson-extrapolated central-difference Jacobian (fourth order)."""
    arr = _points(x, spec)
    coarse = _central_jacobian(arr, spec, step)
    fine = _central_jacobian(arr, spec, step / 2.0)
    return (4.0 * fine - coarse) / 3.0


def fd_divergence_a(x, spec: PotentialSpec, step: float = 1e-3) -> float:
    return float(np.trace(fd_jacobian_a(x, spec, step)))


# ---------------------------------------------------------------------------
# Taylor remainders about the z-axis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RemainderSample:
    y: np.ndarray
    z: Union[float, np.ndarray]
    r1: np.ndarray
    r2: float
    bound_ratio_r1: float
    bound_ratio_r2: float


def remainder_r1_factor(w2, alpha: float):
    """R1(w) = factor * (Omega w, 0) with factor = (1+|w|^2)^(-alpha/2) - 1."""
    return (1.0 + w2) ** (-alpha / 2.0) - 1.0


def remainder_r2(w2, alpha: float, c: float):
    """R2(w) = |w|^2 (1+|w|^2)^(-alpha) - c |w|^2 (homogeneous potential)."""
    return w2 * ((1.0 + w2) ** (-alpha) - c)


def _split_z(z, spec: PotentialSpec) -> Tuple[np.ndarray, float]:
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if z_arr.shape != (spec.matrix.d_z,):
        raise ValueError(f"z must have {spec.matrix.d_z} component(s) for {spec.matrix.parity} n")
    if spec.matrix.parity == 'odd' and z_arr[0] <= 0:
        raise OutsideSupportError(f"z={z_arr[0]} must be positive (construction lives on z > 0)")
    s = float(np.linalg.norm(z_arr))
    if s == 0.0:
        raise OutsideSupportError("z = 0 lies outside the construction")
    return z_arr, s


def taylor_remainders(y, z, spec: PotentialSpec, c: float) -> RemainderSample:
    """First- and second-order remainders of A and |A|^2 about the z-axis."""
    y_arr = np.asarray(y, dtype=float)
    if y_arr.shape != (spec.matrix.d_y,):
        raise ValueError(f"y must have {spec.matrix.d_y} components")
    z_arr, s = _split_z(z, spec)
    y_norm = float(np.linalg.norm(y_arr))
    if y_norm >= s:
        raise OutsideSupportError(f"|y|={y_norm:g} >= |z|={s:g}: outside the cutoff support")

    alpha = spec.alpha
    x = np.concatenate([y_arr, z_arr])
    a = eval_a(x, spec)
    model = np.concatenate([spec.matrix.omega @ y_arr, np.zeros(spec.matrix.d_z)]) * s ** (-alpha)
    r1 = s ** (alpha - 1.0) * (a - model)
    r2 = s ** (2.0 * alpha - 2.0) * (float(a @ a) - c * y_norm ** 2 / s ** (2.0 * alpha))

    if y_norm == 0.0:
        ratio1 = ratio2 = 0.0
    else:
        ratio1 = float(np.linalg.norm(r1)) * s ** 2 / y_norm ** 2
        ratio2 = abs(r2) * s ** 3 / y_norm ** 3
    return RemainderSample(
        y=y_arr, z=z_arr[0] if spec.matrix.d_z == 1 else z_arr,
        r1=r1, r2=float(r2), bound_ratio_r1=ratio1, bound_ratio_r2=ratio2,
    )


def _unit_z(spec: PotentialSpec) -> np.ndarray:
    if spec.matrix.d_z == 1:
        return np.array([1.0])
    return np.array([1.0, 1.0]) / np.sqrt(2.0)


def remainder_exponent(spec: PotentialSpec, c: float,
                       w_values: Optional[Sequence[float]] = None) -> Dict[str, float]:
    """Fit the small-|w| power laws of |R1(w)| and |R2(w)| at |z| = 1."""
    if w_values is None:
        w_values = np.logspace(-3, -1, 12)
    z = _unit_z(spec)
    r1_abs, r2_abs = [], []
    for w in w_values:
        y = np.zeros(spec.matrix.d_y)
        y[0] = w
        sample = taylor_remainders(y, z, spec, c)
        r1_abs.append(np.linalg.norm(sample.r1))
        r2_abs.append(abs(sample.r2))
    log_w = np.log(np.asarray(w_values))
    fit1 = linregress(log_w, np.log(r1_abs))
    fit2 = linregress(log_w, np.log(r2_abs))
    logger.debug("remainder exponents c=%s: R1 %.4f, R2 %.4f", c, fit1.slope, fit2.slope)
    return {
        'c': c,
        'r1_exponent': float(fit1.slope),
        'r2_exponent': float(fit2.slope),
        'r2_cubic_bound_holds': bool(fit2.slope >= 3.0 - 1e-6),
    }


def remainder_bound_constants(spec: PotentialSpec, c: float,
                              points: int = 16) -> Dict[str, float]:
    """Sup of |R1| |z|^2/|y|^2 and |R2| |z|^3/|y|^3 over |y| <= |z|/2."""
    z_scales = np.linspace(1.0, 4.0, points)
    fractions = np.linspace(0.0, 0.5, points + 1)[1:]
    sup1 = sup2 = 0.0
    for scale in z_scales:
        z = _unit_z(spec) * scale
        for frac in fractions:
            y = np.zeros(spec.matrix.d_y)
            y[0] = frac * scale
            sample = taylor_remainders(y, z, spec, c)
            sup1 = max(sup1, sample.bound_ratio_r1)
            sup2 = max(sup2, sample.bound_ratio_r2)
    return {'c': c, 'points': points, 'sup_r1_ratio': sup1, 'sup_r2_ratio': sup2}


# ---------------------------------------------------------------------------
# Sampled identity report
# ---------------------------------------------------------------------------

def _sample_points(spec: PotentialSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    directions = rng.normal(size=(count, spec.n))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=count))
    return directions * radii[:, None]


def _check(name: str, error: float, tolerance: float, **extra) -> Dict:
    entry = {'name': name, 'max_error': float(error), 'tolerance': tolerance,
             'passed': bool(error <= tolerance)}
    entry.update(extra)
    return entry


def verify_identities(spec: PotentialSpec, count: int, seed: int,
                      tolerance: float = 1e-10) -> Dict:
    """Sample the algebraic and differential identities of A at random points.

    Returns a report dict with one entry per check and an overall ``passed``.
    """
    rng = np.random.default_rng(seed)
    x = _sample_points(spec, count, rng)
    a = eval_a(x, spec)
    a_scale = np.maximum(np.linalg.norm(a, axis=1), 1e-300)
    checks = []

    div = divergence_a(x, spec)
    checks.append(_check('divergence', np.max(np.abs(div)), tolerance))

    b = eval_b(x, spec)
    checks.append(_check('antisymmetry', np.max(np.abs(b + np.swapaxes(b, 1, 2))), tolerance))

    tail = a[:, spec.matrix.d_y:]
    checks.append(_check('free_axis_components', np.max(np.abs(tail)), tolerance))

    axis_points = np.zeros((count, spec.n))
    axis_points[:, -1] = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=count))
    checks.append(_check('axis_zero', np.max(np.abs(eval_a(axis_points, spec))), tolerance))

    if spec.regularized:
        checks.append({'name': 'homogeneity', 'status': 'not-applicable', 'passed': True})
    else:
        s = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=count))
        scaled = eval_a(x * s[:, None], spec)
        expected = (s ** (1.0 - spec.alpha))[:, None] * a
        rel = np.linalg.norm(scaled - expected, axis=1) / np.linalg.norm(expected, axis=1).clip(1e-300)
        checks.append(_check('homogeneity', np.max(rel), tolerance))

    b_tau = tangential_b(x, spec)
    b_tau_expected = tangential_b_expected(x, spec)
    scale = np.maximum(np.linalg.norm(b_tau_expected, axis=1), 1.0)
    tangential_error = np.max(np.linalg.norm(b_tau - b_tau_expected, axis=1) / scale)
    checks.append(_check(
        'tangential_identity', tangential_error, tolerance,
        max_tangential_magnitude=float(np.max(np.linalg.norm(b_tau, axis=1))),
    ))

    if spec.n == 3:
        jac = jacobian_a(x, spec)
        curl = np.stack([jac[:, 2, 1] - jac[:, 1, 2],
                         jac[:, 0, 2] - jac[:, 2, 0],
                         jac[:, 1, 0] - jac[:, 0, 1]], axis=1)
        v = rng.normal(size=(count, 3))
        lhs = np.einsum('kij,kj->ki', b, v)
        rhs = np.cross(curl, v)
        rel = np.linalg.norm(lhs - rhs, axis=1) / np.maximum(np.linalg.norm(rhs, axis=1), 1.0)
        checks.append(_check('curl_cross_product', np.max(rel), tolerance))

    fd_errors = []
    for point in x[:20]:
        exact = jacobian_a(point, spec)
        step = 1e-3 * np.linalg.norm(point)
        approx = fd_jacobian_a(point, spec, step)
        fd_errors.append(np.max(np.abs(exact - approx)) / max(np.max(np.abs(exact)), 1e-300))
    checks.append(_check('jacobian_fd', max(fd_errors), 1e-6))

    report = {
        'n': spec.n,
        'alpha': spec.alpha,
        'regularized': spec.regularized,
        'samples': count,
        'seed': seed,
        'checks': checks,
        'passed': all(entry['passed'] for entry in checks),
    }
    logger.info("potential identities n=%s alpha=%s: %s", spec.n, spec.alpha,
                "all passed" if report['passed'] else "FAILURES")
    return report
