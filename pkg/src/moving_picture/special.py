"""Hermite polynomials and normalized Hermite functions."""

from __future__ import annotations

import numpy as np

from .errors import DomainError


def hermite(n: int, xi):
    """Physicists' Hermite polynomial H_n(xi) by the three-term recurrence.

    H_{n+1} = 2 xi H_n - 2 n H_{n-1}, starting from H_0 = 1, H_1 = 2 xi.
    Accepts scalars or arrays; returns a float or ndarray accordingly.
    """
    if int(n) != n or n < 0:
        raise DomainError(f"Hermite degree must be a non-negative integer, got {n!r}")
    n = int(n)
    xi = np.asarray(xi, dtype=float)
    h_prev = np.ones_like(xi)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * xi
    for k in range(1, n):
        h_prev, h = h, 2.0 * xi * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Orthonormal Hermite functions h_0..h_{n_max} of the dimensionless x.

    h_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2), evaluated with the
    normalized recurrence so that no factorials or large H_n appear.
    Returns an array of shape (n_max + 1,) + x.shape.
    """
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x**2)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = np.sqrt(2.0 / (k + 1)) * x * out[k] - np.sqrt(k / (k + 1)) * out[k - 1]
    return out
