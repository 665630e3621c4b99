"""
Closed-form term tables for the forcing of the quasi-mode.

The forcing splits as F_R = Phi * F + G_R, where Phi = Z(z) psi(|y|^2/|z|^2)
is the full cutoff, F = L W is the untruncated forcing and G_R collects the
terms hitting the cutoff. Every term is a coefficient times a basis function.
The basis functions are shared between parities; the coefficients are the
printed ones.
"""

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from features.quasimode import QuasiModeField


@dataclass(frozen=True)
class PrintedTerm:
    name: str
    group: str  # 'F' (untruncated) or 'G' (cutoff)
    description: str


TERMS: List[PrintedTerm] = [
    PrintedTerm('F.v.t2', 'F', 'lambda^2 t^2 |z|^(-2a-2) omega'),
    PrintedTerm('F.v.t1', 'F', 'i lambda t |z|^(-a-2) omega'),
    PrintedTerm('F.G.t1', 'F', 'i lambda t |z|^(-a-2) G'),
    PrintedTerm('F.G.t0', 'F', '|z|^-2 G'),
    PrintedTerm('F.H', 'F', '|z|^-2 H'),
    PrintedTerm('G.w.psi1', 'G', 'omega |z|^-2 Z psi\''),
    PrintedTerm('G.w.y2psi2', 'G', 'omega |y|^2 |z|^-4 Z psi\'\''),
    PrintedTerm('G.w.y2psi1', 'G', 'omega |y|^2 |z|^-4 Z psi\''),
    PrintedTerm('G.w.psiR2', 'G', 'omega (Laplacian Z) psi'),
    PrintedTerm('G.w.y2psiR1psi1', 'G', 'omega |y|^2 |z|^-3 (z.grad Z/|z|) psi\''),
    PrintedTerm('G.w.y4psi2', 'G', 'omega |y|^4 |z|^-6 Z psi\'\''),
    PrintedTerm('G.w.t.psiR1', 'G', 'omega i lambda t |z|^(-a-1) (z.grad Z/|z|) psi'),
    PrintedTerm('G.w.t.psi1', 'G', 'omega i lambda t |y|^2 |z|^(-a-4) Z psi\''),
    PrintedTerm('G.G.psi1', 'G', 'G |z|^-2 Z psi\''),
    PrintedTerm('G.G.y2psi1', 'G', 'G |y|^2 |z|^-4 Z psi\''),
    PrintedTerm('G.G.psiR1', 'G', 'G |z|^-1 (z.grad Z/|z|) psi'),
]

TERM_NAMES = [term.name for term in TERMS]
F_TERMS = [term.name for term in TERMS if term.group == 'F']
G_TERMS = [term.name for term in TERMS if term.group == 'G']


def printed_coefficients(n: int, alpha: float) -> Dict[str, float]:
    """Coefficients as printed for dimension n (parity picks the table)."""
    a = alpha
    odd = n % 2 == 1
    d_y = n - 1 if odd else n - 2
    d_z = 1 if odd else 2
    coefficients = {
        'F.v.t2': a * a,
        'F.v.t1': -a * (a + 1.0) if odd else -a * a,
        'F.G.t1': -a * a,
        # the even table prints +a^2/4 here
        'F.G.t0': -a * (a + 2.0) / 4.0 if odd else a * a / 4.0,
        'F.H': -a * a / 4.0,
        'G.w.psi1': -2.0 * d_y,
        'G.w.y2psi2': -4.0,
        'G.w.y2psi1': -2.0 * (4.0 - d_z),
        'G.w.psiR2': -1.0,
        'G.w.y2psiR1psi1': 4.0,
        'G.w.y4psi2': -4.0,
        'G.w.t.psiR1': 2.0 * a,
        'G.w.t.psi1': -4.0 * a,
        'G.G.psi1': -4.0,
        'G.G.y2psi1': -2.0 * a,
        'G.G.psiR1': a,
    }
    return coefficients


def corrected_coefficients(n: int, alpha: float) -> Dict[str, float]:
    """Coefficients obtained by differentiating W_R directly.

    Differs from the printed table only in the even |z|^-2 G term, where the
    extra (1/|z|) d_s of the two-dimensional z-Laplacian gives -a^2/4.
    """
    coefficients = printed_coefficients(n, alpha)
    if n % 2 == 0:
        coefficients['F.G.t0'] = -alpha * alpha / 4.0
    return coefficients


def term_basis(qm: QuasiModeField, t, rho, z) -> Dict[str, np.ndarray]:
    """Every basis function at the given points, phase included.

    F terms are returned without the cutoff factor Phi.
    """
    j = qm._jets(t, rho, z)
    alpha, lam = qm.config.alpha, qm.lam
    s, q, t = j.s, j.q, j.t
    e = j.phase
    omega = j.v
    g = 2.0 * j.big_q * j.dv
    h = g + 4.0 * j.big_q ** 2 * j.ddv
    ilt = 1j * lam * t
    zc, dzc = j.zc, j.dzc
    return {
        'F.v.t2': e * (lam * t) ** 2 * s ** (-2.0 * alpha - 2.0) * omega,
        'F.v.t1': e * ilt * s ** (-alpha - 2.0) * omega,
        'F.G.t1': e * ilt * s ** (-alpha - 2.0) * g,
        'F.G.t0': e * s ** -2.0 * g,
        'F.H': e * s ** -2.0 * h,
        'G.w.psi1': e * omega * s ** -2.0 * zc * j.dpsi,
        'G.w.y2psi2': e * omega * q * s ** -4.0 * zc * j.ddpsi,
        'G.w.y2psi1': e * omega * q * s ** -4.0 * zc * j.dpsi,
        'G.w.psiR2': e * omega * j.lap_zc * j.psi,
        'G.w.y2psiR1psi1': e * omega * q * s ** -3.0 * dzc * j.dpsi,
        'G.w.y4psi2': e * omega * q * q * s ** -6.0 * zc * j.ddpsi,
        'G.w.t.psiR1': e * omega * ilt * s ** (-alpha - 1.0) * dzc * j.psi,
        'G.w.t.psi1': e * omega * ilt * q * s ** (-alpha - 4.0) * zc * j.dpsi,
        'G.G.psi1': e * g * s ** -2.0 * zc * j.dpsi,
        'G.G.y2psi1': e * g * q * s ** -4.0 * zc * j.dpsi,
        'G.G.psiR1': e * g * s ** -1.0 * dzc * j.psi,
    }


def cutoff_factor(qm: QuasiModeField, rho, z) -> np.ndarray:
    j = qm._jets(0.0, rho, z)
    return j.zc * j.psi


def combine(qm: QuasiModeField, basis: Dict[str, np.ndarray], coefficients: Dict[str, float],
            rho, z) -> np.ndarray:
    """Phi * sum(F terms) + sum(G terms)."""
    phi = cutoff_factor(qm, rho, z)
    f_part = sum(coefficients[name] * basis[name] for name in F_TERMS)
    g_part = sum(coefficients[name] * basis[name] for name in G_TERMS)
    return phi * f_part + g_part


def eval_f_printed(qm: QuasiModeField, t, y, z, coefficients: Dict[str, float] = None):
    """Untruncated forcing F from the closed-form table."""
    y, z = qm._check_vector_input(y, z)
    coefficients = coefficients or printed_coefficients(qm.config.n, qm.config.alpha)
    basis = term_basis(qm, t, np.linalg.norm(y, axis=-1), z)
    return sum(coefficients[name] * basis[name] for name in F_TERMS)


def eval_g_r_printed(qm: QuasiModeField, t, y, z, coefficients: Dict[str, float] = None):
    """Cutoff terms G_R from the closed-form table."""
    y, z = qm._check_vector_input(y, z)
    coefficients = coefficients or printed_coefficients(qm.config.n, qm.config.alpha)
    basis = term_basis(qm, t, np.linalg.norm(y, axis=-1), z)
    return sum(coefficients[name] * basis[name] for name in G_TERMS)


def eval_f_r_printed(qm: QuasiModeField, t, y, z, coefficients: Dict[str, float] = None):
    y, z = qm._check_vector_input(y, z)
    coefficients = coefficients or printed_coefficients(qm.config.n, qm.config.alpha)
    rho = np.linalg.norm(y, axis=-1)
    return combine(qm, term_basis(qm, t, rho, z), coefficients, rho, z)
