"""Householder reflectors that interchange two equal-length vectors.

For u != v with ||u|| = ||v||, the matrix h = I - 2 w w' / (w' w) with
w = u - v is symmetric, orthogonal, an involution, and satisfies h u = v
and h v = u; for u == v the reflector is the identity.  Reflectors are kept
in vector form so application is a rank-1 update, O(n) on vectors and
O(n m) on matrices; the dense matrix is materialized only for tests.
"""

from __future__ import annotations

import math

import numpy as np

#: relative norm mismatch accepted between the two interchanged vectors
#: (absorbs accumulated rounding from upstream sqrt(1 - gamma^2) scaling)
NORM_MATCH_RTOL = 1e-10

#: below this relative difference u and v are treated as equal and the
#: reflector is the identity, avoiding cancellation in w / ||w||^2
IDENTITY_RTOL = 1e-12


class Reflector:
    """A Householder reflector in vector form, or the identity."""

    __slots__ = ("n", "w", "_ww")

    def __init__(self, n: int, w: np.ndarray | None):
        self.n = n
        self.w = w
        if w is None:
            self._ww = 0.0
        else:
            self._ww = float(w @ w)
            if self._ww <= 0.0:
                raise ValueError("reflector vector must have positive norm")

    @property
    def is_identity(self) -> bool:
        return self.w is None

    @classmethod
    def between(cls, u, v) -> "Reflector":
        """The reflector mapping u to v (and v to u); identity when u == v."""
        u = np.asarray(u, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
            raise ValueError("u and v must be 1-D vectors of equal length")
        nu = float(np.linalg.norm(u))
        nv = float(np.linalg.norm(v))
        if nu == 0.0 or nv == 0.0:
            raise ValueError("cannot build a reflector from a zero vector")
        if abs(nu - nv) > NORM_MATCH_RTOL * nu:
            raise ValueError(f"norms differ beyond tolerance: {nu!r} vs {nv!r}")
        w = u - v
        if float(np.linalg.norm(w)) <= IDENTITY_RTOL * nu:
            return cls(len(u), None)
        return cls(len(u), w)

    @classmethod
    def to_scaled_e1(cls, target, gamma: float) -> "Reflector":
        """The reflector sending sqrt(1 - gamma^2) * e1 to ``target``.

        A deterministic (hence Borel) function of ``target``.  Same
        reflector as ``between(s * e1, target)``, but the head of
        w = s e1 - target is computed as (s^2 - t0^2) / (s + t0) when
        t0 > 0, which avoids the cancellation that otherwise loses
        orthogonality when the target sits near the axis.
        """
        if not -1.0 < gamma < 1.0:
            raise ValueError(f"gamma must be in (-1, 1), got {gamma}")
        target = np.asarray(target, dtype=np.float64)
        if target.ndim != 1 or len(target) < 1:
            raise ValueError("target must be a nonempty 1-D vector")
        s = math.sqrt(1.0 - gamma * gamma)
        norm = math.sqrt(target @ target)
        if norm == 0.0 or abs(norm - s) > NORM_MATCH_RTOL * s:
            raise ValueError(f"target norm {norm!r} does not match "
                             f"sqrt(1 - gamma^2) = {s!r}")
        tail_sq = float(target[1:] @ target[1:])
        w = -target
        w[0] = tail_sq / (s + target[0]) if target[0] > 0.0 else s - target[0]
        if math.sqrt(w[0] * w[0] + tail_sq) <= IDENTITY_RTOL * s:
            return cls(len(target), None)
        return cls(len(target), w)

    def _check_len(self, k: int):
        if k != self.n:
            raise ValueError(f"length mismatch: reflector is {self.n}-dimensional, "
                             f"operand has {k}")

    def apply(self, x) -> np.ndarray:
        """h @ x for a vector x, as a rank-1 update."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise ValueError("x must be a 1-D vector")
        self._check_len(len(x))
        if self.w is None:
            return x.copy()
        return x - (2.0 * (self.w @ x) / self._ww) * self.w

    def apply_cols(self, a) -> np.ndarray:
        """h @ a: reflect each column of a."""
        a = np.asarray(a, dtype=np.float64)
        self._check_len(a.shape[0])
        if self.w is None:
            return a.copy()
        return a - np.outer((2.0 / self._ww) * self.w, self.w @ a)

    def apply_rows(self, a) -> np.ndarray:
        """a @ h: reflect each row of a (h is symmetric)."""
        a = np.asarray(a, dtype=np.float64)
        self._check_len(a.shape[1])
        if self.w is None:
            return a.copy()
        return a - np.outer(a @ ((2.0 / self._ww) * self.w), self.w)

    def as_matrix(self) -> np.ndarray:
        """Dense realization I - 2 w w' / (w' w)."""
        eye = np.eye(self.n)
        if self.w is None:
            return eye
        return eye - (2.0 / self._ww) * np.outer(self.w, self.w)
