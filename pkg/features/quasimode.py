"""
Quasi-modes of the model operator and their truncations.

The model operator is

    L u = i d_t u - Delta u + 2i |z|^(-alpha) (Omega y, 0) . grad u + c |y|^2 |z|^(-2 alpha) u

with c the total |y|^2 coefficient (c = 2 reproduces the printed T). With the
eigenpair (lambda, v) of the twisted oscillator,

    omega(y, z) = v(y / |z|^(alpha/2)),   W = exp(i lambda t / |z|^alpha) omega,
    W_R = W * Z(z) * psi(|y|^2 / |z|^2),

where Z is psi_R(z) (odd) or psi_R(z1) psi_R(z2) (even). All fields are
radial in y, so every evaluator has a radial form taking rho = |y| (used by
the quadrature) and a vector form taking y itself. The forcing F_R = L W_R is
computed by exact chain-rule differentiation in the variables (t, q = |y|^2,
s = |z|), which keeps everything smooth at y = 0.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from config import BETA_MARGIN
from core.landau import Eigenpair, RadialProfile, ground_state
from core.potential import PotentialSpec, build_m, remainder_r1_factor, remainder_r2
from core.validation import (
    validate_alpha,
    validate_beta,
    validate_dimension,
    validate_gamma,
    validate_model_c,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Problem configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProblemConfig:
    n: int
    alpha: float
    gamma: float
    beta: float
    c: int
    eigen: Eigenpair

    @property
    def parity(self) -> str:
        return 'odd' if self.n % 2 else 'even'

    @property
    def d_y(self) -> int:
        return self.n - 1 if self.parity == 'odd' else self.n - 2

    @property
    def d_z(self) -> int:
        return 1 if self.parity == 'odd' else 2

    @property
    def k(self) -> int:
        return self.d_y // 2

    @property
    def exponent_sum(self) -> float:
        """alpha d_y + 2 d_z gamma, the numerator of every scaling exponent."""
        return self.alpha * self.d_y + 2.0 * self.d_z * self.gamma

    @property
    def potential(self) -> PotentialSpec:
        return PotentialSpec(matrix=build_m(self.n), alpha=self.alpha)

    def as_dict(self) -> dict:
        return {
            'n': self.n, 'parity': self.parity, 'alpha': self.alpha, 'gamma': self.gamma,
            'beta': self.beta, 'c': self.c, 'd_y': self.d_y, 'd_z': self.d_z,
            'eigenvalue': self.eigen.eigenvalue,
            'profile': self.eigen.profile.kind if self.eigen.profile else None,
        }


def make_problem(n: int, alpha: float, gamma: float, beta: Optional[float] = None,
                 c: int = 1, eigen: Optional[Eigenpair] = None) -> ProblemConfig:
    """Validate inputs and build a ProblemConfig.

    beta defaults to the parity threshold times BETA_MARGIN. An explicit beta
    at or below the threshold is accepted with a warning.
    """
    for ok, message in (validate_dimension(n), validate_alpha(alpha), validate_gamma(gamma),
                        validate_model_c(c), validate_beta(beta)):
        if not ok:
            raise ValueError(message)
    parity = 'odd' if n % 2 else 'even'
    d_y = n - 1 if parity == 'odd' else n - 2
    d_z = 1 if parity == 'odd' else 2
    threshold = (alpha * d_y + 2 * d_z * gamma) / n
    if beta is None:
        beta = threshold * BETA_MARGIN
    elif beta <= threshold:
        logger.warning("beta=%s is not above the threshold %.6f; ratio growth is not expected",
                       beta, threshold)
    if eigen is None:
        eigen = ground_state(d_y // 2, c)
    if eigen.profile is None:
        raise ValueError("Norm computations need a radial eigenprofile")
    if eigen.k != d_y // 2:
        raise ValueError(f"Eigenpair is for k={eigen.k}, problem needs k={d_y // 2}")
    return ProblemConfig(n=n, alpha=float(alpha), gamma=float(gamma), beta=float(beta),
                         c=c, eigen=eigen)


# ---------------------------------------------------------------------------
# Cutoffs
# ---------------------------------------------------------------------------

def _g(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def bump_derivatives(s) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """psi, psi', psi'' for psi(s) = g(2-2|s|) / (g(2-2|s|) + g(2|s|-1))."""
    s = np.asarray(s, dtype=float)
    u = np.abs(s)
    value = np.where(u <= 0.5, 1.0, 0.0)
    d1 = np.zeros_like(u)
    d2 = np.zeros_like(u)
    mid = (u > 0.5) & (u < 1.0)
    if np.any(mid):
        a = 2.0 - 2.0 * u[mid]
        b = 2.0 * u[mid] - 1.0
        ga, gb = _g(a), _g(b)
        # g' = g/t^2, g'' = g (1/t^4 - 2/t^3)
        big_a, big_b = ga, gb
        da = -2.0 * ga / a ** 2
        db = 2.0 * gb / b ** 2
        dda = 4.0 * ga * (1.0 / a ** 4 - 2.0 / a ** 3)
        ddb = 4.0 * gb * (1.0 / b ** 4 - 2.0 / b ** 3)
        total = big_a + big_b
        cross = da * big_b - big_a * db
        value[mid] = big_a / total
        d1[mid] = np.sign(s[mid]) * cross / total ** 2
        d2[mid] = (dda * big_b - big_a * ddb) / total ** 2 - 2.0 * cross * (da + db) / total ** 3
    return value, d1, d2


def bump(s):
    return bump_derivatives(s)[0]


@dataclass(frozen=True)
class CutoffSpec:
    """psi_R in z and the angular cutoff psi(|y|^2/|z|^2).

    ``mode='rectangle'`` replaces psi_R by the indicator of |z - R| < R^gamma
    and drops the angular cutoff (closed-form sanity mode, no derivatives).
    """

    gamma: float
    mode: str = 'smooth'

    def __post_init__(self):
        if self.mode not in ('smooth', 'rectangle'):
            raise ValueError(f"Unknown cutoff mode {self.mode!r}")

    def radial(self, x, R: float):
        """psi_R(x) = psi((x - R)/R^gamma) with its first two derivatives."""
        width = R ** self.gamma
        x = np.asarray(x, dtype=float)
        if self.mode == 'rectangle':
            value = (np.abs(x - R) < width).astype(float)
            return value, np.zeros_like(value), np.zeros_like(value)
        value, d1, d2 = bump_derivatives((x - R) / width)
        return value, d1 / width, d2 / width ** 2

    def angular(self, m):
        m = np.asarray(m, dtype=float)
        if self.mode == 'rectangle':
            return np.ones_like(m), np.zeros_like(m), np.zeros_like(m)
        return bump_derivatives(m)


# ---------------------------------------------------------------------------
# Scaled profiles along the cone variable u = y / |z|^(alpha/2)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScaledProfile:
    """(|y|/|z|^(alpha/2))^m * L(|y|/|z|^(alpha/2)) for a radial function L."""

    base: Callable[[np.ndarray], np.ndarray]
    weight_power: int = 0
    name: str = ''

    def evaluate(self, rho, s, alpha: float) -> np.ndarray:
        r = np.asarray(rho, dtype=float) / np.asarray(s, dtype=float) ** (alpha / 2.0)
        if self.weight_power == 0:
            return self.base(r)
        return r ** self.weight_power * self.base(r)


# ---------------------------------------------------------------------------
# Quasi-mode field
# ---------------------------------------------------------------------------

@dataclass
class _Jets:
    """Intermediate quantities shared by the evaluators at one batch of points."""

    t: np.ndarray
    q: np.ndarray
    s: np.ndarray
    phase: np.ndarray
    big_q: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    ddv: np.ndarray
    m: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    ddpsi: np.ndarray
    zc: np.ndarray
    dzc: np.ndarray
    lap_zc: np.ndarray
    grad_zc: np.ndarray = field(default=None)


@dataclass(frozen=True, eq=False)
class QuasiModeField:
    config: ProblemConfig
    R: float
    cutoff: CutoffSpec = None

    def __post_init__(self):
        if not self.R > 2:
            raise ValueError(f"R={self.R} must exceed 2")
        if self.cutoff is None:
            object.__setattr__(self, 'cutoff', CutoffSpec(gamma=self.config.gamma))

    # -- basic data -----------------------------------------------------------

    @property
    def profile(self) -> RadialProfile:
        return self.config.eigen.profile

    @property
    def lam(self) -> float:
        return self.config.eigen.eigenvalue

    @property
    def horizon(self) -> float:
        """Time horizon T = R^beta."""
        return self.R ** self.config.beta

    @property
    def z_interval(self) -> Tuple[float, float]:
        width = self.R ** self.config.gamma
        return self.R - width, self.R + width

    def omega_profile(self) -> ScaledProfile:
        return ScaledProfile(self.profile.value, 0, 'omega')

    def theta_profile(self) -> ScaledProfile:
        return ScaledProfile(self.profile.value, 2, 'theta')

    def g_profile(self) -> ScaledProfile:
        return ScaledProfile(self.profile.grad_dot_u, 0, 'G')

    def h_profile(self) -> ScaledProfile:
        return ScaledProfile(self.profile.hessian_form, 0, 'H')

    def m_tilde_profile(self) -> ScaledProfile:
        return ScaledProfile(lambda r: np.abs(self.profile.d1(r)), 1, 'M~')

    # -- geometry -------------------------------------------------------------

    def z_norm(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.config.d_z == 1:
            return np.abs(z)
        return np.linalg.norm(z, axis=-1)

    def _z_cutoff(self, z):
        """Z, directional derivative sum_j z_j dZ/dz_j / |z|, Laplacian, gradient."""
        z = np.asarray(z, dtype=float)
        if self.config.d_z == 1:
            val, d1, d2 = self.cutoff.radial(z, self.R)
            sign = np.where(z >= 0, 1.0, -1.0)
            return val, sign * d1, d2, d1[..., None]
        p1, d1a, d2a = self.cutoff.radial(z[..., 0], self.R)
        p2, d1b, d2b = self.cutoff.radial(z[..., 1], self.R)
        s = np.linalg.norm(z, axis=-1)
        grad = np.stack([d1a * p2, p1 * d1b], axis=-1)
        directional = (z[..., 0] * grad[..., 0] + z[..., 1] * grad[..., 1]) / s
        return p1 * p2, directional, d2a * p2 + p1 * d2b, grad

    def phase(self, t, z) -> np.ndarray:
        s = self.z_norm(z)
        return np.exp(1j * self.lam * np.asarray(t, dtype=float) / s ** self.config.alpha)

    def _jets(self, t, rho, z) -> _Jets:
        alpha = self.config.alpha
        t = np.asarray(t, dtype=float)
        rho = np.asarray(rho, dtype=float)
        s = self.z_norm(z)
        q = rho * rho
        big_q = q * s ** (-alpha)
        v, dv, ddv = self.profile.q_derivatives(big_q)
        m = q / (s * s)
        psi, dpsi, ddpsi = self.cutoff.angular(m)
        zc, dzc, lap_zc, grad_zc = self._z_cutoff(z)
        phase = np.exp(1j * self.lam * t / s ** alpha)
        return _Jets(t=t, q=q, s=s, phase=phase, big_q=big_q, v=v, dv=dv, ddv=ddv,
                     m=m, psi=psi, dpsi=dpsi, ddpsi=ddpsi,
                     zc=zc, dzc=dzc, lap_zc=lap_zc, grad_zc=grad_zc)

    # -- radial evaluators (rho = |y|) ----------------------------------------

    def omega_radial(self, rho, z) -> np.ndarray:
        return self.omega_profile().evaluate(rho, self.z_norm(z), self.config.alpha)

    def w_radial(self, t, rho, z) -> np.ndarray:
        return self.phase(t, z) * self.omega_radial(rho, z)

    def w_r_radial(self, t, rho, z) -> np.ndarray:
        j = self._jets(t, rho, z)
        return j.phase * j.v * j.zc * j.psi

    def f_r_radial(self, rho, z) -> np.ndarray:
        j = self._jets(0.0, rho, z)
        return j.v * j.zc * j.psi

    def _forcing_from_jets(self, j: _Jets) -> np.ndarray:
        alpha, lam = self.config.alpha, self.lam
        d_y, d_z = self.config.d_y, self.config.d_z
        s, q, t = j.s, j.q, j.t
        e = j.phase

        # E = e^{i phi} V(Q), Q = q s^-alpha, phi = lam t s^-alpha
        phi_s = -alpha * lam * t * s ** (-alpha - 1.0)
        phi_ss = alpha * (alpha + 1.0) * lam * t * s ** (-alpha - 2.0)
        phi_t = lam * s ** (-alpha)
        q_s = -alpha * j.big_q / s
        q_ss = alpha * (alpha + 1.0) * j.big_q / s ** 2
        big_e = e * j.v
        e_q = e * j.dv * s ** (-alpha)
        e_qq = e * j.ddv * s ** (-2.0 * alpha)
        e_s = e * (1j * phi_s * j.v + j.dv * q_s)
        e_ss = e * ((1j * phi_ss - phi_s ** 2) * j.v + 2j * phi_s * j.dv * q_s
                    + j.ddv * q_s ** 2 + j.dv * q_ss)
        e_t = e * 1j * phi_t * j.v

        # C = psi(m), m = q / s^2
        m_q = 1.0 / s ** 2
        m_s = -2.0 * q / s ** 3
        m_ss = 6.0 * q / s ** 4
        c_q = j.dpsi * m_q
        c_qq = j.ddpsi * m_q ** 2
        c_s = j.dpsi * m_s
        c_ss = j.ddpsi * m_s ** 2 + j.dpsi * m_ss

        p = big_e * j.psi
        p_q = e_q * j.psi + big_e * c_q
        p_qq = e_qq * j.psi + 2.0 * e_q * c_q + big_e * c_qq
        p_s = e_s * j.psi + big_e * c_s
        p_ss = e_ss * j.psi + 2.0 * e_s * c_s + big_e * c_ss
        p_t = e_t * j.psi

        lap_y = j.zc * (2.0 * d_y * p_q + 4.0 * q * p_qq)
        lap_z = p_ss * j.zc + p_s * (d_z - 1.0) / s * j.zc + 2.0 * p_s * j.dzc + p * j.lap_zc
        # (Omega y) . grad_y vanishes for fields radial in y
        potential = self.config.c * q * s ** (-2.0 * alpha) * p * j.zc
        return 1j * p_t * j.zc - lap_y - lap_z + potential

    def forcing_radial(self, t, rho, z) -> np.ndarray:
        """F_R = L W_R by exact differentiation."""
        return self._forcing_from_jets(self._jets(t, rho, z))

    def rest_radial(self, t, rho, z) -> np.ndarray:
        """Rest forcing of the full potential against the model operator.

        The first-order part 2i|z|^(1-alpha) R1(y/|z|) . grad W_R is a multiple
        of (Omega y) . y and vanishes for y-radial fields; only R2 remains.
        """
        j = self._jets(t, rho, z)
        alpha = self.config.alpha
        w2 = j.q / j.s ** 2
        r2 = remainder_r2(w2, alpha, self.config.c)
        return j.s ** (2.0 - 2.0 * alpha) * r2 * j.phase * j.v * j.zc * j.psi

    def forcing_components_radial(self, t, rho, z) -> Tuple[np.ndarray, np.ndarray]:
        j = self._jets(t, rho, z)
        alpha = self.config.alpha
        forcing = self._forcing_from_jets(j)
        w2 = j.q / j.s ** 2
        rest = (j.s ** (2.0 - 2.0 * alpha) * remainder_r2(w2, alpha, self.config.c)
                * j.phase * j.v * j.zc * j.psi)
        return forcing, rest

    # -- vector evaluators (y in R^{d_y}) -------------------------------------

    def _check_vector_input(self, y, z):
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.config.d_y:
            raise ValueError(f"y needs {self.config.d_y} components, got shape {y.shape}")
        z = np.asarray(z, dtype=float)
        if self.config.d_z == 2 and z.shape[-1] != 2:
            raise ValueError("even parity expects z with 2 components")
        if np.any(self.z_norm(z) == 0):
            raise ValueError("|z| must be positive")
        return y, z

    def eval_omega(self, y, z):
        y, z = self._check_vector_input(y, z)
        return self.omega_radial(np.linalg.norm(y, axis=-1), z)

    def eval_w(self, t, y, z):
        y, z = self._check_vector_input(y, z)
        return self.w_radial(t, np.linalg.norm(y, axis=-1), z)

    def eval_w_r(self, t, y, z):
        y, z = self._check_vector_input(y, z)
        return self.w_r_radial(t, np.linalg.norm(y, axis=-1), z)

    def eval_f_r(self, y, z):
        y, z = self._check_vector_input(y, z)
        return self.f_r_radial(np.linalg.norm(y, axis=-1), z)

    def eval_grad_w_r(self, t, y, z) -> np.ndarray:
        """Full gradient (grad_y, grad_z) of W_R by the product rule."""
        y, z = self._check_vector_input(y, z)
        j = self._jets(t, np.linalg.norm(y, axis=-1), z)
        alpha = self.config.alpha
        s = j.s
        base = j.phase * j.v
        grad_y_factor = 2.0 * (j.phase * j.dv * s ** (-alpha) * j.psi + base * j.dpsi / s ** 2) * j.zc
        grad_y = grad_y_factor[..., None] * y
        phi_s = -alpha * self.lam * j.t * s ** (-alpha - 1.0)
        dp_ds = (j.phase * (1j * phi_s * j.v + j.dv * (-alpha * j.big_q / s)) * j.psi
                 + base * j.dpsi * (-2.0 * j.q / s ** 3))
        z_arr = np.asarray(z, dtype=float)
        z_unit = (z_arr / s)[..., None] if self.config.d_z == 1 else z_arr / s[..., None]
        grad_z = (dp_ds * j.zc)[..., None] * z_unit + (base * j.psi)[..., None] * j.grad_zc
        return np.concatenate([grad_y, grad_z], axis=-1)

    def eval_f_direct(self, t, y, z):
        """F_R at vector points, including the (vanishing) magnetic transport term."""
        y, z = self._check_vector_input(y, z)
        forcing = self.forcing_radial(t, np.linalg.norm(y, axis=-1), z)
        s = self.z_norm(z)
        omega_y = y @ self.config.potential.matrix.omega.T
        grad = self.eval_grad_w_r(t, y, z)[..., :self.config.d_y]
        transport = 2j * s ** (-self.config.alpha) * np.sum(omega_y * grad, axis=-1)
        return forcing + transport

    def eval_rest_forcing(self, t, y, z):
        """2i |z|^(1-alpha) R1(y/|z|) . grad W_R + |z|^(2-2alpha) R2(y/|z|) W_R.

        Zero outside the cutoff support (where |y| >= |z| in particular).
        """
        y, z = self._check_vector_input(y, z)
        alpha = self.config.alpha
        s = self.z_norm(z)
        w = y / s[..., None]
        w2 = np.sum(w * w, axis=-1)
        inside = w2 < 1.0
        w2c = np.where(inside, w2, 0.0)
        r1_y = remainder_r1_factor(w2c, alpha)[..., None] * (w @ self.config.potential.matrix.omega.T)
        grad_y = self.eval_grad_w_r(t, y, z)[..., :self.config.d_y]
        first = 2j * s ** (1.0 - alpha) * np.sum(r1_y * grad_y, axis=-1)
        second = s ** (2.0 - 2.0 * alpha) * remainder_r2(w2c, alpha, self.config.c) * self.eval_w_r(t, y, z)
        return np.where(inside, first + second, 0.0)


def make_field(config: ProblemConfig, R: float, mode: str = 'smooth') -> QuasiModeField:
    return QuasiModeField(config=config, R=float(R), cutoff=CutoffSpec(config.gamma, mode))
