"""Uniform sampling on the unit sphere in R^n by Gaussian normalization."""

from __future__ import annotations

import math

import numpy as np

from .rng import RngStream

_NORM_FLOOR = 1e-100


def sample_uniform_sphere(n: int, rng: RngStream) -> np.ndarray:
    """One point, uniform on the unit sphere in R^n (norm within 1e-14 of 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    while True:
        g = rng.normals(n)
        norm = math.sqrt(g @ g)
        if norm >= _NORM_FLOOR:
            return g / norm


def sample_uniform_sphere_many(n: int, count: int, rng: RngStream) -> np.ndarray:
    """``count`` iid uniform sphere points as rows of a (count, n) array."""
    if n < 1:
        raise ValueError("n must be >= 1")
    g = rng.normals(count * n).reshape(count, n)
    norms = np.linalg.norm(g, axis=1)
    bad = norms < _NORM_FLOOR
    while bad.any():
        k = int(bad.sum())
        g[bad] = rng.normals(k * n).reshape(k, n)
        norms[bad] = np.linalg.norm(g[bad], axis=1)
        bad = norms < _NORM_FLOOR
    return g / norms[:, None]


def basis_vector_e1(n: int) -> np.ndarray:
    """(1, 0, ..., 0) of length n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    e = np.zeros(n)
    e[0] = 1.0
    return e
