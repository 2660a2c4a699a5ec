"""Polar quadrature rules on the complex plane."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def radial_rule(n: int, r_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to ``[0, r_max]``."""
    x, w = _legendre(int(n))
    return 0.5 * r_max * (x + 1.0), 0.5 * r_max * w


def angular_rule(n: int) -> np.ndarray:
    """Uniform angles ``2 pi t / n``; each carries weight ``2 pi / n``."""
    return 2.0 * np.pi * np.arange(n) / n


def polar_grid(n_radial: int, n_angular: int, r_max: float):
    """Nodes ``z`` and weights for ``int d^2z / pi``, flattened radial-major."""
    rho, w_r = radial_rule(n_radial, r_max)
    theta = angular_rule(n_angular)
    z = (rho[:, None] * np.exp(1j * theta)[None, :]).ravel()
    # d^2z / pi = rho d rho d theta / pi
    weights = np.repeat(w_r * rho * (2.0 / n_angular), n_angular)
    return z, weights
