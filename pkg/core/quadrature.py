"""Gauss-Legendre rules and radial measure helpers."""

from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import gamma as gamma_fn


@lru_cache(maxsize=64)
def _reference_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(a: float, b: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _reference_rule(int(n))
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def unit_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    return gauss_legendre(0.0, 1.0, n)


def composite_rule(breaks, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Concatenate n-point rules over consecutive panels [breaks[i], breaks[i+1]]."""
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b > a:
            x, w = gauss_legendre(a, b, n)
            nodes.append(x)
            weights.append(w)
    if not nodes:
        return np.empty(0), np.empty(0)
    return np.concatenate(nodes), np.concatenate(weights)


def sphere_area(dim: int) -> float:
    """Surface area of the unit sphere in R^dim."""
    return float(2.0 * np.pi ** (dim / 2.0) / gamma_fn(dim / 2.0))
