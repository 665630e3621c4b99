"""
Twisted harmonic oscillator T = -Delta + 2i Omega y . grad + c |y|^2 on R^{2k}.

T is a direct sum over 2D sigma-blocks, so all numerics live on a single
block and higher k is assembled by additivity. The closed-form ground state is
a Gaussian exp(-c0 |u|^2) with c0 = sqrt(c)/2 and eigenvalue 2 sqrt(c) k.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.interpolate import CubicSpline, RectBivariateSpline
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from config import EIG_MAXITER, EIG_MIN_GRID_POINTS, EIG_STENCIL_ORDER, MODEL_COEFFICIENTS
from core.errors import ConvergenceError, GridTooCoarseError, InvalidDimensionError
from core.quadrature import gauss_legendre, sphere_area

logger = logging.getLogger(__name__)

# Central-difference stencils (offsets -m..m) for the second and first derivative.
_SECOND_DERIVATIVE = {
    2: [1.0, -2.0, 1.0],
    4: [-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12],
    6: [1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90],
}
_FIRST_DERIVATIVE = {
    2: [-0.5, 0.0, 0.5],
    4: [1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12],
    6: [-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60],
}

# |v|^p below this fraction of its peak counts as outside the support
_NEGLIGIBLE = 1e-40


@dataclass(frozen=True)
class TwistedOscillator:
    k: int
    c: int

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise InvalidDimensionError(f"Block count must be >= 1, got {self.k!r}")
        if self.c not in MODEL_COEFFICIENTS:
            raise ValueError(f"Model coefficient c={self.c} not in {MODEL_COEFFICIENTS}")


# ---------------------------------------------------------------------------
# Radial profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Real radial function v(r), r = |u|, on R^dimension.

    Derivatives are served in the variable Q = r^2, where radial profiles are
    smooth up to r = 0; v'(r), v''(r) and the contractions G = u . grad v and
    H = u . D^2 v . u are assembled from them.
    """

    kind: str
    dimension: int = 2
    scale: Optional[float] = None
    samples: Optional[Tuple[np.ndarray, np.ndarray]] = None
    amplitude: float = 1.0
    _spline: Optional[CubicSpline] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.kind == 'gaussian':
            if self.scale is None or self.scale <= 0:
                raise ValueError("gaussian profile needs a positive scale")
        elif self.kind == 'grid':
            if self.samples is None:
                raise ValueError("grid profile needs radial samples")
            r, v = (np.asarray(a, dtype=float) for a in self.samples)
            object.__setattr__(self, '_spline', CubicSpline(r * r, v))
        else:
            raise ValueError(f"Unknown profile kind {self.kind!r}")

    @property
    def c0(self) -> float:
        """Gaussian rate in exp(-c0 r^2)."""
        return 1.0 / (2.0 * self.scale)

    @property
    def r_max(self) -> float:
        return float(self.samples[0][-1]) if self.kind == 'grid' else np.inf

    def scaled(self, factor: float) -> 'RadialProfile':
        """Same profile multiplied by a constant."""
        if self.kind == 'gaussian':
            return RadialProfile('gaussian', self.dimension, self.scale,
                                 amplitude=self.amplitude * factor)
        r, v = self.samples
        return RadialProfile('grid', self.dimension, samples=(r, v),
                             amplitude=self.amplitude * factor)

    def q_derivatives(self, q) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return V(Q), V'(Q), V''(Q) for V(Q) = v(sqrt(Q))."""
        q = np.asarray(q, dtype=float)
        if self.kind == 'gaussian':
            c0 = self.c0
            value = self.amplitude * np.exp(-c0 * q)
            return value, -c0 * value, c0 * c0 * value
        inside = q <= self.samples[0][-1] ** 2
        qc = np.where(inside, q, 0.0)
        spline = self._spline
        values = [np.where(inside, self.amplitude * spline(qc, nu), 0.0) for nu in (0, 1, 2)]
        return values[0], values[1], values[2]

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self.q_derivatives(r * r)[0]

    def d1(self, r):
        r = np.asarray(r, dtype=float)
        _, dv, _ = self.q_derivatives(r * r)
        return 2.0 * r * dv

    def d2(self, r):
        r = np.asarray(r, dtype=float)
        q = r * r
        _, dv, ddv = self.q_derivatives(q)
        return 2.0 * dv + 4.0 * q * ddv

    def grad_dot_u(self, r):
        """G = u . grad v(u) = r v'(r)."""
        r = np.asarray(r, dtype=float)
        q = r * r
        _, dv, _ = self.q_derivatives(q)
        return 2.0 * q * dv

    def hessian_form(self, r):
        """H = u . D^2 v(u) . u = r^2 v''(r)."""
        r = np.asarray(r, dtype=float)
        q = r * r
        _, dv, ddv = self.q_derivatives(q)
        return 2.0 * q * dv + 4.0 * q * q * ddv

    def laplacian(self, r):
        r = np.asarray(r, dtype=float)
        q = r * r
        _, dv, ddv = self.q_derivatives(q)
        return 2.0 * self.dimension * dv + 4.0 * q * ddv

    def effective_radius(self, power: float) -> float:
        """Radius beyond which |v|^power is negligible against its peak."""
        if self.kind == 'gaussian':
            return float(np.sqrt(-np.log(_NEGLIGIBLE) / (power * self.c0)))
        return self.r_max


def gaussian_profile(c: float, dimension: int = 2) -> RadialProfile:
    """exp(-c0 r^2) with c0 = sqrt(c)/2, i.e. scale s = 1/sqrt(c)."""
    return RadialProfile('gaussian', dimension=dimension, scale=1.0 / np.sqrt(c))


@dataclass(frozen=True, eq=False)
class Eigenpair:
    eigenvalue: float
    profile: Optional[RadialProfile]
    closed_form: bool
    k: int = 1
    c: int = 1


def ground_state(k: int, c: int) -> Eigenpair:
    """Closed-form Gaussian ground state of T on R^{2k}."""
    osc = TwistedOscillator(k=k, c=c)
    return Eigenpair(
        eigenvalue=2.0 * np.sqrt(osc.c) * osc.k,
        profile=gaussian_profile(osc.c, dimension=2 * osc.k),
        closed_form=True,
        k=osc.k,
        c=osc.c,
    )


# ---------------------------------------------------------------------------
# Discretization on a 2D block
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BlockGrid:
    """Uniform interior grid on [-L, L]^2 with zero boundary values."""

    half_width: float
    points: int

    def __post_init__(self):
        if self.points < EIG_MIN_GRID_POINTS:
            raise GridTooCoarseError(
                f"{self.points} points per direction; need at least {EIG_MIN_GRID_POINTS}"
            )
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.points + 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.points + 2)[1:-1]

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis, self.axis, indexing='ij')


def _stencil_matrix(coefficients: Sequence[float], size: int, scale: float) -> sparse.spmatrix:
    half = len(coefficients) // 2
    offsets = list(range(-half, half + 1))
    return sparse.diags(coefficients, offsets, shape=(size, size), format='csr') * scale


def build_operator(osc: TwistedOscillator, grid: BlockGrid,
                   order: int = EIG_STENCIL_ORDER) -> sparse.csr_matrix:
    """Sparse complex Hermitian matrix of T on one sigma-block."""
    if order not in _SECOND_DERIVATIVE:
        raise ValueError(f"Stencil order {order} not available (use 2, 4 or 6)")
    size, h = grid.points, grid.spacing
    eye = sparse.identity(size, format='csr')
    d2 = _stencil_matrix(_SECOND_DERIVATIVE[order], size, 1.0 / h ** 2)
    d1 = _stencil_matrix(_FIRST_DERIVATIVE[order], size, 1.0 / h)

    y1, y2 = grid.mesh()
    y1, y2 = y1.ravel(), y2.ravel()
    laplacian = sparse.kron(d2, eye) + sparse.kron(eye, d2)
    # Omega y = (y2, -y1): 2i (y2 d/dy1 - y1 d/dy2)
    magnetic = 2j * (sparse.diags(y2) @ sparse.kron(d1, eye) - sparse.diags(y1) @ sparse.kron(eye, d1))
    potential = sparse.diags(osc.c * (y1 ** 2 + y2 ** 2))
    return (-laplacian + magnetic + potential).tocsr()


def apply_t(osc: TwistedOscillator, u: np.ndarray, grid: BlockGrid,
            order: int = EIG_STENCIL_ORDER) -> np.ndarray:
    """Apply the discretized block operator to a field sampled on ``grid``."""
    u = np.asarray(u)
    if u.shape != (grid.points, grid.points):
        raise ValueError(f"Field shape {u.shape} does not match grid {grid.points}x{grid.points}")
    operator = build_operator(osc, grid, order)
    return (operator @ u.astype(complex).ravel()).reshape(u.shape)


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    peak = vector[np.argmax(np.abs(vector))]
    return vector * (np.conj(peak) / abs(peak))


def radial_variance(grid: BlockGrid, vector: np.ndarray, radii: int = 24, angles: int = 32) -> float:
    """Largest variance of |v|/max|v| over circles inside 0.6 L."""
    modulus = np.abs(vector).reshape(grid.points, grid.points)
    modulus = modulus / modulus.max()
    spline = RectBivariateSpline(grid.axis, grid.axis, modulus)
    r = np.linspace(0.0, 0.6 * grid.half_width, radii)
    theta = np.linspace(0.0, 2.0 * np.pi, angles, endpoint=False)
    rr, tt = np.meshgrid(r, theta, indexing='ij')
    values = spline.ev(rr * np.cos(tt), rr * np.sin(tt))
    return float(np.max(np.var(values, axis=1)))


def profile_from_grid(grid: BlockGrid, vector: np.ndarray, samples: int = 200,
                      angles: int = 16) -> RadialProfile:
    """Angle-averaged radial profile of a block eigenvector, normalized to v(0) = 1."""
    real = _fix_phase(np.asarray(vector)).real.reshape(grid.points, grid.points)
    spline = RectBivariateSpline(grid.axis, grid.axis, real)
    r = np.linspace(0.0, 0.9 * grid.half_width, samples)
    theta = np.linspace(0.0, 2.0 * np.pi, angles, endpoint=False)
    rr, tt = np.meshgrid(r, theta, indexing='ij')
    radial = spline.ev(rr * np.cos(tt), rr * np.sin(tt)).mean(axis=1)
    return RadialProfile('grid', dimension=2, samples=(r, radial / radial[0]))


def solve_eigen_numeric(osc: TwistedOscillator, grid: BlockGrid, count: int,
                        order: int = EIG_STENCIL_ORDER) -> List[Eigenpair]:
    """Smallest ``count`` eigenvalues of the discretized T, sorted ascending.

    The block problem is solved by shift-invert Lanczos; for k > 1 the
    spectrum is assembled from sums of block eigenvalues.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    operator = build_operator(TwistedOscillator(k=1, c=osc.c), grid, order)
    block_count = count + 2
    try:
        values, vectors = eigsh(operator, k=block_count, sigma=0.0, which='LM',
                                maxiter=EIG_MAXITER)
    except ArpackNoConvergence as exc:
        raise ConvergenceError(
            f"eigsh did not converge for k=1, c={osc.c}, grid={grid.points}",
            diagnostics={
                'maxiter': EIG_MAXITER,
                'converged_eigenvalues': [float(v) for v in np.real(exc.eigenvalues)],
            },
        ) from exc

    order_idx = np.argsort(values.real)
    values = values.real[order_idx]
    vectors = vectors[:, order_idx]
    logger.info("block eigenvalues (c=%s, N=%s): %s", osc.c, grid.points,
                ", ".join(f"{v:.8f}" for v in values[:count]))

    if osc.k == 1:
        pairs = []
        for value, vector in zip(values[:count], vectors.T):
            profile = None
            if radial_variance(grid, vector) <= 1e-6:
                profile = profile_from_grid(grid, vector)
            pairs.append(Eigenpair(float(value), profile, closed_form=False, k=1, c=osc.c))
        return pairs

    sums = sorted(sum(combo) for combo in itertools.product(values, repeat=osc.k))
    return [Eigenpair(float(v), None, closed_form=False, k=osc.k, c=osc.c) for v in sums[:count]]


def spectral_gap(pairs: Sequence[Eigenpair]) -> float:
    if len(pairs) < 2:
        raise ValueError("need at least two eigenpairs")
    return pairs[1].eigenvalue - pairs[0].eigenvalue


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

def profile_norms(pair: Eigenpair, exponents: Sequence[float], nodes: int = 200) -> List[float]:
    """L^p(R^{2k}) norms of the radial profile by radial Gauss-Legendre quadrature."""
    profile = pair.profile
    if profile is None:
        raise ValueError("Eigenpair carries no radial profile")
    dim = 2 * pair.k
    norms = []
    for p in exponents:
        if p == np.inf:
            r = np.linspace(0.0, min(profile.effective_radius(1.0), 50.0), 2001)
            norms.append(float(np.max(np.abs(profile.value(r)))))
            continue
        if p < 1:
            raise ValueError(f"L^p norm needs p >= 1, got {p}")
        r, w = gauss_legendre(0.0, profile.effective_radius(p), nodes)
        integrand = np.abs(profile.value(r)) ** p * r ** (dim - 1)
        norms.append(float((sphere_area(dim) * np.sum(w * integrand)) ** (1.0 / p)))
    return norms
