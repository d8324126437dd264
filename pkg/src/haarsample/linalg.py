"""Dense matrix helpers and certified orthogonal matrices.

Matrices are plain 2-D float64 ``numpy`` arrays throughout; the only wrapper
type is :class:`OrthogonalMatrix`, which certifies orthogonality at
construction and is immutable afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: residual at which an OrthogonalMatrix is accepted (about 100x machine
#: epsilon times typical dimension; loose enough for p up to a few hundred)
ORTHOGONALITY_TOL = 1e-12
DETERMINANT_TOL = 1e-10


def _as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    return m


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit dimension check."""
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def orthogonality_residual(m) -> float:
    """Max-abs entry of ``m.T @ m - I``; zero for an exactly orthogonal m."""
    m = _as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if m.shape[0] == 0:
        return 0.0
    r = m.T @ m
    np.fill_diagonal(r, r.diagonal() - 1.0)
    return float(np.max(np.abs(r)))


def determinant(m) -> float:
    """Determinant via LU with partial pivoting (used for +-1 sign checks)."""
    m = _as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    return float(np.linalg.det(m))


@dataclass(frozen=True)
class OrthogonalMatrix:
    """A square matrix certified orthogonal at construction.

    Construction recomputes the residual and rejects the matrix if it
    exceeds :data:`ORTHOGONALITY_TOL` or if ``|det| - 1`` exceeds
    :data:`DETERMINANT_TOL`.  The stored array is a read-only copy.
    """

    m: np.ndarray
    residual: float = field(init=False)

    def __post_init__(self):
        m = _as_matrix(self.m)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")
        res = orthogonality_residual(m)
        if res > ORTHOGONALITY_TOL:
            raise ValueError(f"orthogonality residual {res:.3e} exceeds "
                             f"{ORTHOGONALITY_TOL:.0e}")
        if m.shape[0] > 0 and abs(abs(determinant(m)) - 1.0) > DETERMINANT_TOL:
            raise ValueError("determinant is not within tolerance of +-1")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "residual", res)

    @property
    def p(self) -> int:
        return self.m.shape[0]

    def det_sign(self) -> float:
        if self.p == 0:
            return 1.0
        return 1.0 if determinant(self.m) > 0 else -1.0
