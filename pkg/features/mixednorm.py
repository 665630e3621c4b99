"""
Spatial L^q and mixed L^p_t L^q_x norms of quasi-mode fields, on
Gauss-Legendre rules in the cone variable u = y / |z|^(alpha/2).
"""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, Iterator, Optional, Tuple, Union

import numpy as np

from config import (
    FORCING_TOLERANCE,
    NORM_TOLERANCE,
    QUAD_RADIAL_NODES,
    QUAD_REFINEMENT,
    QUAD_T_NODES,
    QUAD_Z_CHUNK,
    QUAD_Z_NODES,
    QUAD_Z_NODES_EVEN,
)
from core.errors import EndpointPairError
from core.quadrature import composite_rule, gauss_legendre, sphere_area, unit_rule
from core.landau import profile_norms
from core.validation import validate_node_count
from features.quasimode import QuasiModeField

logger = logging.getLogger(__name__)

Exponent = Optional[Union[Fraction, float, int]]  # None means infinity


@dataclass(frozen=True)
class QuadratureSpec:
    radial_nodes: int = QUAD_RADIAL_NODES
    z_nodes: int = QUAD_Z_NODES
    t_nodes: int = QUAD_T_NODES
    refinement_factor: int = QUAD_REFINEMENT

    def __post_init__(self):
        for name in ('radial_nodes', 'z_nodes', 't_nodes'):
            ok, message = validate_node_count(name, getattr(self, name))
            if not ok:
                raise ValueError(message)
        if self.refinement_factor < 2:
            raise ValueError("refinement_factor must be at least 2")

    def refined(self) -> 'QuadratureSpec':
        f = self.refinement_factor
        return replace(self, radial_nodes=self.radial_nodes * f, z_nodes=self.z_nodes * f,
                       t_nodes=self.t_nodes * f)

    def as_dict(self) -> Dict:
        return {'radial_nodes': self.radial_nodes, 'z_nodes': self.z_nodes,
                't_nodes': self.t_nodes, 'refinement_factor': self.refinement_factor}


def default_quadrature(parity: str) -> QuadratureSpec:
    """Even parity integrates over a square, so fewer z nodes per direction."""
    return QuadratureSpec(z_nodes=QUAD_Z_NODES if parity == 'odd' else QUAD_Z_NODES_EVEN)


@dataclass(frozen=True)
class NormResult:
    value: float
    rel_error_estimate: float
    nodes_used: Dict = field(default_factory=dict)
    converged: bool = True


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """f(t, rho, z); time_degree 2 means f / phase is quadratic in t."""

    name: str
    evaluate: Callable[[object, np.ndarray, np.ndarray], np.ndarray]
    time_degree: Optional[int] = 0
    phase: Optional[Callable[[object, np.ndarray], np.ndarray]] = None


def w_r_field(qm: QuasiModeField) -> SpaceTimeField:
    return SpaceTimeField('W_R', qm.w_r_radial, 0)


def f_r_field(qm: QuasiModeField) -> SpaceTimeField:
    return SpaceTimeField('f_R', lambda t, rho, z: qm.f_r_radial(rho, z), 0)


def forcing_field(qm: QuasiModeField) -> SpaceTimeField:
    return SpaceTimeField('F_R', qm.forcing_radial, 2, qm.phase)


def rest_field(qm: QuasiModeField) -> SpaceTimeField:
    return SpaceTimeField('rest', qm.rest_radial, 2, qm.phase)


def forcing_total_field(qm: QuasiModeField) -> SpaceTimeField:
    def evaluate(t, rho, z):
        forcing, rest = qm.forcing_components_radial(t, rho, z)
        return forcing + rest
    return SpaceTimeField('Ftilde_R', evaluate, 2, qm.phase)


def _as_float(exponent: Exponent) -> float:
    return np.inf if exponent is None else float(exponent)


# ---------------------------------------------------------------------------
# Spatial rule
# ---------------------------------------------------------------------------

def _z_rule(qm: QuasiModeField, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    lo, hi = qm.z_interval
    half = 0.5 * qm.R ** qm.config.gamma
    x, w = composite_rule([lo, qm.R - half, qm.R + half, hi], nodes)
    if qm.config.d_z == 1:
        return x, w
    z = np.stack(np.meshgrid(x, x, indexing='ij'), axis=-1).reshape(-1, 2)
    return z, np.outer(w, w).ravel()


def spatial_chunks(qm: QuasiModeField, quad: QuadratureSpec, power: float = 2.0,
                   chunk: int = QUAD_Z_CHUNK) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Quadrature nodes and weights in blocks of at most ``chunk`` z nodes."""
    if chunk < 1:
        raise ValueError(f"chunk={chunk} must be positive")
    alpha, d_y = qm.config.alpha, qm.config.d_y
    z_all, wz_all = _z_rule(qm, quad.z_nodes)
    radius = qm.profile.effective_radius(power if np.isfinite(power) else 1.0)
    x, wx = unit_rule(quad.radial_nodes)
    for start in range(0, len(wz_all), chunk):
        z, wz = z_all[start:start + chunk], wz_all[start:start + chunk]
        s = qm.z_norm(z)
        if qm.cutoff.mode == 'rectangle':
            inner = np.full_like(s, radius / 2.0)
            outer = np.full_like(s, radius)
        else:
            # |y| < |z| is u < |z|^(1-alpha/2); psi(m) leaves its plateau at m = 1/2
            u_max = s ** (1.0 - alpha / 2.0)
            inner = np.minimum(u_max / np.sqrt(2.0), radius)
            outer = np.minimum(u_max, radius)
        u = np.hstack([inner[:, None] * x, inner[:, None] + (outer - inner)[:, None] * x])
        wu = np.hstack([inner[:, None] * wx, (outer - inner)[:, None] * wx])
        rho = s[:, None] ** (alpha / 2.0) * u
        weight = (wz[:, None] * wu * sphere_area(d_y)
                  * s[:, None] ** (d_y * alpha / 2.0) * u ** (d_y - 1))
        z_eval = z[:, None] if qm.config.d_z == 1 else z[:, None, :]
        yield rho, z_eval, weight


def _accumulate(total: float, values: np.ndarray, weight: np.ndarray, q: float) -> float:
    magnitude = np.abs(values)
    if np.isinf(q):
        return max(total, float(np.max(magnitude)))
    return total + float(np.sum(weight * magnitude ** q))


def _root(total, q: float):
    return total if np.isinf(q) else total ** (1.0 / q)


def _compare(coarse: float, fine: float, tolerance: float, nodes: Dict) -> NormResult:
    if fine == 0.0:
        error = 0.0 if coarse == 0.0 else np.inf
    else:
        error = abs(fine - coarse) / abs(fine)
    return NormResult(value=fine, rel_error_estimate=float(error), nodes_used=nodes,
                      converged=bool(error <= tolerance))


def _spatial_once(sf: SpaceTimeField, t: float, q: float, qm: QuasiModeField,
                  quad: QuadratureSpec) -> float:
    total = 0.0
    for rho, z, weight in spatial_chunks(qm, quad, q):
        total = _accumulate(total, sf.evaluate(t, rho, z), weight, q)
    return float(_root(total, q))


def spatial_norm(sf: SpaceTimeField, t: float, q_exp: Exponent, qm: QuasiModeField,
                 quad: QuadratureSpec, tolerance: float = NORM_TOLERANCE) -> NormResult:
    """||sf(t)||_{L^q} over R^{d_y} x R^{d_z}."""
    q = _as_float(q_exp)
    if q < 1:
        raise ValueError(f"q={q_exp} must be at least 1")
    fine_quad = quad.refined()
    coarse = _spatial_once(sf, t, q, qm, quad)
    fine = _spatial_once(sf, t, q, qm, fine_quad)
    result = _compare(coarse, fine, tolerance, fine_quad.as_dict())
    if not result.converged:
        logger.warning("%s: L^%s norm at R=%g not converged (rel err %.2e)",
                       sf.name, q_exp, qm.R, result.rel_error_estimate)
    return result


def _time_profile(sf: SpaceTimeField, T: float, q: float, qm: QuasiModeField,
                  quad: QuadratureSpec, t_nodes: np.ndarray) -> np.ndarray:
    """||sf(t)||_{L^q} at every t node."""
    totals = [0.0] * len(t_nodes)
    for rho, z, weight in spatial_chunks(qm, quad, q):
        if sf.time_degree == 2:
            g0, g1, g2 = (sf.evaluate(tk, rho, z) / sf.phase(tk, z) for tk in (0.0, T / 2.0, T))
            c2 = 2.0 * (g0 - 2.0 * g1 + g2) / T ** 2
            c1 = (g2 - g0) / T - c2 * T
            values = (g0 + t * (c1 + c2 * t) for t in t_nodes)
        else:
            values = (sf.evaluate(t, rho, z) for t in t_nodes)
        totals = [_accumulate(total, v, weight, q) for total, v in zip(totals, values)]
    return _root(np.array(totals), q)


def _mixed_once(sf: SpaceTimeField, p: float, q: float, T: float, qm: QuasiModeField,
                quad: QuadratureSpec) -> float:
    if sf.time_degree == 0:
        spatial = _spatial_once(sf, 0.0, q, qm, quad)
        return spatial if np.isinf(p) else T ** (1.0 / p) * spatial
    t_nodes, t_weights = gauss_legendre(0.0, T, quad.t_nodes)
    norms = _time_profile(sf, T, q, qm, quad, t_nodes)
    if np.isinf(p):
        return float(np.max(norms))
    return float(np.sum(t_weights * norms ** p) ** (1.0 / p))


def mixed_norm(sf: SpaceTimeField, p_exp: Exponent, q_exp: Exponent, T: float,
               qm: QuasiModeField, quad: QuadratureSpec,
               tolerance: float = NORM_TOLERANCE) -> NormResult:
    """(int_0^T ||sf(t)||_q^p dt)^(1/p)."""
    p, q = _as_float(p_exp), _as_float(q_exp)
    if p < 1 or q < 1:
        raise ValueError(f"exponents ({p_exp},{q_exp}) must be at least 1")
    if not T > 0:
        raise ValueError(f"T={T} must be positive")
    fine_quad = quad.refined()
    coarse = _mixed_once(sf, p, q, T, qm, quad)
    fine = _mixed_once(sf, p, q, T, qm, fine_quad)
    result = _compare(coarse, fine, tolerance, fine_quad.as_dict())
    if not result.converged:
        logger.warning("%s: L^%s L^%s norm at R=%g not converged (rel err %.2e)",
                       sf.name, p_exp, q_exp, qm.R, result.rel_error_estimate)
    return result


def dual_pair(p: Exponent, q: Exponent) -> Tuple[Exponent, Exponent]:
    """Hoelder conjugates; None stands for infinity."""
    def conjugate(x):
        if x is None:
            return Fraction(1)
        x = Fraction(x)
        if x < 1:
            raise ValueError(f"exponent {x} must be at least 1")
        return None if x == 1 else x / (x - 1)
    return conjugate(p), conjugate(q)


# ---------------------------------------------------------------------------
# Strichartz ratio
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatioResult:
    R: float
    horizon: float
    numerator: NormResult      # ||W_R||_{L^p(0,T; L^q)}
    initial: NormResult        # ||f_R||_2
    forcing: NormResult        # ||F_R||_{L^p'(0,T; L^q')}
    rest: NormResult           # ||rest||_{L^p'(0,T; L^q')}
    forcing_total: NormResult  # ||F_R + rest||_{L^p'(0,T; L^q')}
    forcing_pq: NormResult     # ||F_R||_{L^p(0,T; L^q)}

    @property
    def denominator(self) -> float:
        return self.initial.value + self.forcing_total.value

    @property
    def ratio(self) -> float:
        return self.numerator.value / self.denominator

    @property
    def converged(self) -> bool:
        return all(n.converged for n in (self.numerator, self.initial, self.forcing,
                                         self.rest, self.forcing_total, self.forcing_pq))

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.numerator.value, self.denominator, self.ratio


def strichartz_ratio(R: float, pair, qm: QuasiModeField, quad: QuadratureSpec) -> RatioResult:
    """Ratio ||W_R|| / (||f_R||_2 + ||F_R + rest||) over (0, R^beta)."""
    if pair.p is None and pair.q == 2:
        raise EndpointPairError("(inf,2) is mass conservation and cannot be violated")
    if qm.R != R:
        raise ValueError(f"field built for R={qm.R}, asked for R={R}")
    T = qm.horizon
    p_dual, q_dual = dual_pair(pair.p, pair.q)
    numerator = mixed_norm(w_r_field(qm), pair.p, pair.q, T, qm, quad)
    initial = spatial_norm(f_r_field(qm), 0.0, 2, qm, quad)
    forcing = mixed_norm(forcing_field(qm), p_dual, q_dual, T, qm, quad, FORCING_TOLERANCE)
    rest = mixed_norm(rest_field(qm), p_dual, q_dual, T, qm, quad, FORCING_TOLERANCE)
    total = mixed_norm(forcing_total_field(qm), p_dual, q_dual, T, qm, quad, FORCING_TOLERANCE)
    forcing_pq = mixed_norm(forcing_field(qm), pair.p, pair.q, T, qm, quad, FORCING_TOLERANCE)
    result = RatioResult(R=R, horizon=T, numerator=numerator, initial=initial, forcing=forcing,
                         rest=rest, forcing_total=total, forcing_pq=forcing_pq)
    logger.debug("R=%g ratio=%.6e (num %.6e, den %.6e)", R, result.ratio,
                 numerator.value, result.denominator)
    return result


def rectangle_f_r_norm_closed_form(qm: QuasiModeField) -> float:
    """||f_R||_2 in rectangle mode: ||v||_2^2 * int_{R-R^g}^{R+R^g} z^(d_y alpha/2) dz."""
    if qm.cutoff.mode != 'rectangle':
        raise ValueError("closed form only holds with the rectangle cutoff")
    if qm.config.d_z != 1:
        raise ValueError("closed form is for odd parity")
    profile = qm.profile
    d_y = qm.config.d_y
    if profile.kind == 'gaussian':
        v_sq = profile.amplitude ** 2 * (np.pi / (2.0 * profile.c0)) ** (d_y / 2.0)
    else:
        v_sq = profile_norms(qm.config.eigen, [2])[0] ** 2
    a = d_y * qm.config.alpha / 2.0
    lo, hi = qm.z_interval
    z_integral = (hi ** (a + 1.0) - lo ** (a + 1.0)) / (a + 1.0)
    return float(np.sqrt(v_sq * z_integral))
