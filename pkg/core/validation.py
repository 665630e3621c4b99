"""Shared validation functions.

Each validator returns ``(is_valid, error_message)``; the message is empty when
the input is valid and otherwise says what to change.
"""

import math
from fractions import Fraction
from typing import Optional, Tuple

from config import MODEL_COEFFICIENTS, QUAD_MIN_NODES, MIN_FIT_DECADES, MIN_FIT_POINTS


def parse_exponent(text: str) -> Optional[Fraction]:
    """Parse '2', '8/3', '1.2' or 'inf' into a Fraction (None means infinity)."""
    cleaned = str(text).strip().lower()
    if cleaned in ('inf', 'infinity', '∞'):
        return None
    return Fraction(cleaned)


def validate_dimension(n: int) -> Tuple[bool, str]:
    """The construction needs n >= 3 (n = 1, 2 are open problems)."""
    if not isinstance(n, int) or isinstance(n, bool):
        return False, f"Dimension must be an integer, got {n!r}"
    if n < 3:
        return False, f"Dimension n={n} not supported: use n >= 3 (n = 1, 2 remain open)"
    return True, ""


def validate_block_count(k: int) -> Tuple[bool, str]:
    if not isinstance(k, int) or k < 1:
        return False, f"Block count k={k!r} invalid: use a positive integer"
    return True, ""


def validate_alpha(alpha: float) -> Tuple[bool, str]:
    if not (1.0 < alpha < 2.0):
        return False, f"alpha={alpha} outside (1, 2): choose a decay exponent strictly between 1 and 2"
    return True, ""


def validate_gamma(gamma: float) -> Tuple[bool, str]:
    if not (0.5 < gamma < 1.0):
        return False, f"gamma={gamma} outside (1/2, 1): choose a cutoff exponent strictly between 0.5 and 1"
    return True, ""


def validate_beta(beta: Optional[float]) -> Tuple[bool, str]:
    if beta is not None and not beta > 0:
        return False, f"beta={beta} must be positive (or omitted to use the threshold margin)"
    return True, ""


def validate_model_c(c: int) -> Tuple[bool, str]:
    if c not in MODEL_COEFFICIENTS:
        allowed = ', '.join(str(v) for v in MODEL_COEFFICIENTS)
        return False, f"Model coefficient c={c} invalid: allowed values are {allowed}"
    return True, ""


def validate_pair(p_text: str, q_text: str, n: int) -> Tuple[bool, str]:
    """Check admissibility 2/p = n/2 - n/q, p >= 2, and exclude (inf, 2)."""
    try:
        p = parse_exponent(p_text)
        q = parse_exponent(q_text)
    except (ValueError, ZeroDivisionError):
        return False, f"Could not parse pair '{p_text},{q_text}': use forms like 2,6 or 8/3,4"
    if q is None:
        return False, "q = inf is not admissible"
    if p is None:
        if q == 2:
            return False, "Pair (inf,2) is mass conservation and holds trivially: pick p < inf"
        return False, f"Pair (inf,{q}) is not admissible in n={n}"
    if p < 2:
        return False, f"p={p} < 2 is not admissible"
    if Fraction(2) / p != Fraction(n, 2) - Fraction(n) / q:
        return False, f"Pair ({p},{q}) violates 2/p = n/2 - n/q for n={n}"
    return True, ""


def validate_r_grid(r_min: float, r_max: float, points: int) -> Tuple[bool, str]:
    if r_min <= 2:
        return False, f"r_min={r_min} must exceed 2"
    if r_max <= r_min:
        return False, f"r_max={r_max} must exceed r_min={r_min}"
    if points < MIN_FIT_POINTS:
        return False, f"r_points={points} too small: slope fits need at least {MIN_FIT_POINTS} points"
    if math.log10(r_max / r_min) < MIN_FIT_DECADES - 1e-12:
        return False, (
            f"R range [{r_min}, {r_max}] spans fewer than {MIN_FIT_DECADES:g} decades; widen it"
        )
    return True, ""


def validate_node_count(name: str, count: int) -> Tuple[bool, str]:
    if count < QUAD_MIN_NODES:
        return False, f"{name}={count} below the minimum of {QUAD_MIN_NODES} nodes"
    return True, ""
