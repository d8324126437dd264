"""Haar-distributed random matrices on the orthogonal group O_p.

Two independent constructions:

* the recursive decomposition: draw the corner entry gamma from its marginal
  law, draw the first column and row as sqrt(1 - gamma^2) times independent
  uniform sphere points, and conjugate the lower-right core
  diag(-gamma, Delta) by the two Householder reflectors that carry the
  scaled basis vector onto the drawn column/row, where Delta is Haar on
  O_{p-2}; iterating from O_0 or O_1 upward yields Haar on O_p;

* a QR-based oracle: factor a square matrix of iid standard normals and fix
  the sign indeterminacy by making R's diagonal positive, which makes the
  factorization unique and Q exactly Haar.  The sign-uncorrected variant is
  kept as a deliberately broken negative control.

The per-draw path consumes randomness in a fixed documented order (base
sign for odd p first, then per level: corner entry, column sphere point,
row sphere point).  The batched path draws whole levels across a batch at
once; it realizes the same distribution but a different stream layout, so
the two paths are separately reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .entry_law import EntryLaw
from .linalg import OrthogonalMatrix, orthogonality_residual
from .reflectors import IDENTITY_RTOL, Reflector
from .rng import RngStream
from .sphere import sample_uniform_sphere, sample_uniform_sphere_many

#: residual accepted for an externally supplied core matrix
_DELTA_RTOL = 1e-10

#: chunk size of the batched sampler (consumption contract: a batch of n is
#: generated in consecutive chunks of this size on the one stream)
BATCH_CHUNK = 65536


@dataclass(frozen=True)
class HaarSample:
    """A certified draw together with a reproducibility token."""

    gamma: OrthogonalMatrix
    seed_record: str


@dataclass(frozen=True)
class ConditionalInput:
    """Conditioning data: corner entry plus first column and first row.

    Both vectors must have squared norm 1 - gamma11^2 (relative 1e-10), as
    any column/row pair of an orthogonal matrix with that corner does.
    """

    gamma11: float
    gamma21: np.ndarray
    gamma12: np.ndarray

    def __post_init__(self):
        if not -1.0 < self.gamma11 < 1.0:
            raise ValueError(f"gamma11 must be in (-1, 1), got {self.gamma11}")
        g21 = np.asarray(self.gamma21, dtype=np.float64)
        g12 = np.asarray(self.gamma12, dtype=np.float64)
        if g21.ndim != 1 or g12.ndim != 1 or len(g21) != len(g12) or len(g21) < 1:
            raise ValueError("gamma21 and gamma12 must be 1-D of equal length >= 1")
        target = 1.0 - self.gamma11 ** 2
        for name, v in (("gamma21", g21), ("gamma12", g12)):
            sq = float(v @ v)
            if abs(sq - target) > 1e-10 * target:
                raise ValueError(f"||{name}||^2 = {sq!r} is not 1 - gamma11^2 "
                                 f"= {target!r} within relative 1e-10")
        g21 = g21.copy()
        g12 = g12.copy()
        g21.flags.writeable = False
        g12.flags.writeable = False
        object.__setattr__(self, "gamma11", float(self.gamma11))
        object.__setattr__(self, "gamma21", g21)
        object.__setattr__(self, "gamma12", g12)

    @property
    def p(self) -> int:
        return len(self.gamma21) + 1


@lru_cache(maxsize=None)
def _law(p: int) -> EntryLaw:
    return EntryLaw(p)


def _check_p(p: int) -> int:
    if int(p) != p or p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    return int(p)


# ---------------------------------------------------------------------------
# recursive construction, one matrix at a time
# ---------------------------------------------------------------------------

def _sign_draw(rng: RngStream) -> float:
    return 1.0 if rng.next_uniform() < 0.5 else -1.0


def _grow(core: np.ndarray, gamma: float, g21: np.ndarray,
          g12: np.ndarray) -> np.ndarray:
    """One level of the recursion: from Delta on O_{k-2} to a k x k matrix."""
    k = core.shape[0] + 2
    h1 = Reflector.to_scaled_e1(g21, gamma)
    h2 = Reflector.to_scaled_e1(g12, gamma)
    block = np.zeros((k - 1, k - 1))
    block[0, 0] = -gamma
    block[1:, 1:] = core
    block = h1.apply_cols(h2.apply_rows(block))
    out = np.empty((k, k))
    out[0, 0] = gamma
    out[0, 1:] = g12
    out[1:, 0] = g21
    out[1:, 1:] = block
    return out


def _two_spheres(k: int, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Two iid uniform points on the sphere in R^k, drawn as one normal batch
    (first half the first point); underflowing norms redraw that point alone."""
    z = rng.normals(2 * k)
    u1, u2 = z[:k], z[k:]
    n1 = math.sqrt(u1 @ u1)
    n2 = math.sqrt(u2 @ u2)
    if n1 < 1e-100:
        return sample_uniform_sphere(k, rng), u2 / n2
    if n2 < 1e-100:
        return u1 / n1, sample_uniform_sphere(k, rng)
    return u1 / n1, u2 / n2


def haar_matrix(p: int, rng: RngStream) -> np.ndarray:
    """One Haar draw on O_p as a raw p x p array (reference per-draw path)."""
    p = _check_p(p)
    if p % 2 == 0:
        g = np.zeros((0, 0))
    else:
        g = np.array([[_sign_draw(rng)]])
    for k in range(g.shape[0] + 2, p + 1, 2):
        gamma = _law(k).sample(rng)
        s = math.sqrt(1.0 - gamma * gamma)
        u1, u2 = _two_spheres(k - 1, rng)
        g = _grow(g, gamma, s * u1, s * u2)
    if p >= 2:
        # outside O_p+ only on a probability-zero set; never fires
        assert abs(g[0, 0]) < 1.0
    return g


def haar_sample(p: int, rng: RngStream) -> HaarSample:
    """One certified Haar draw on O_p."""
    token = rng.state_token()
    return HaarSample(OrthogonalMatrix(haar_matrix(p, rng)), token)


def sample_row_col(gamma11: float, p: int, rng: RngStream
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Draw the first column and first row conditionally on the corner entry.

    Both are sqrt(1 - gamma11^2) times independent uniform points on the
    sphere in R^{p-1} (column drawn first).
    """
    if not -1.0 < gamma11 < 1.0:
        raise ValueError(f"gamma11 must be in (-1, 1), got {gamma11}")
    p = _check_p(p)
    if p < 2:
        raise ValueError("p must be >= 2")
    s = np.sqrt(1.0 - gamma11 * gamma11)
    g21 = s * sample_uniform_sphere(p - 1, rng)
    g12 = s * sample_uniform_sphere(p - 1, rng)
    return g21, g12


def conditional_gamma22(cond: ConditionalInput,
                        delta: OrthogonalMatrix | np.ndarray | None = None,
                        rng: RngStream | None = None) -> np.ndarray:
    """The lower-right block given the corner entry, first column and row.

    Returns h1 @ diag(-gamma11, delta) @ h2' where h1, h2 are the reflectors
    carrying sqrt(1 - gamma11^2) e1 onto the conditioning column/row.  With
    ``delta`` a Haar draw on O_{p-2} this realizes the conditional law of the
    block; any fixed orthogonal ``delta`` gives the corresponding
    deterministic section.  ``delta=None`` draws Haar internally from ``rng``.
    """
    k = cond.p - 1
    if delta is None:
        if rng is None:
            raise ValueError("need an rng when delta is not supplied")
        # O_0 is the trivial group: the empty core closes the recursion at p = 2
        core = np.zeros((0, 0)) if cond.p == 2 else haar_matrix(cond.p - 2, rng)
    elif isinstance(delta, OrthogonalMatrix):
        core = np.asarray(delta.m)
    else:
        core = np.asarray(delta, dtype=np.float64)
        if core.shape != (cond.p - 2, cond.p - 2):
            raise ValueError(f"delta must be {cond.p - 2} x {cond.p - 2}, "
                             f"got {core.shape}")
        if orthogonality_residual(core) > _DELTA_RTOL:
            raise ValueError("delta is not orthogonal within tolerance")
    if core.shape[0] != k - 1:
        raise ValueError(f"delta must be {k - 1} x {k - 1}, got {core.shape}")
    h1 = Reflector.to_scaled_e1(cond.gamma21, cond.gamma11)
    h2 = Reflector.to_scaled_e1(cond.gamma12, cond.gamma11)
    block = np.zeros((k, k))
    block[0, 0] = -cond.gamma11
    block[1:, 1:] = core
    return h1.apply_cols(h2.apply_rows(block))


def assemble(cond: ConditionalInput, gamma22: np.ndarray) -> np.ndarray:
    """Full p x p matrix from conditioning data and a lower-right block."""
    p = cond.p
    gamma22 = np.asarray(gamma22, dtype=np.float64)
    if gamma22.shape != (p - 1, p - 1):
        raise ValueError(f"gamma22 must be {p - 1} x {p - 1}, got {gamma22.shape}")
    out = np.empty((p, p))
    out[0, 0] = cond.gamma11
    out[0, 1:] = cond.gamma12
    out[1:, 0] = cond.gamma21
    out[1:, 1:] = gamma22
    return out


def cross_section_matrix(gamma11: float, p: int) -> OrthogonalMatrix:
    """The canonical orbit representative with a given corner entry.

    Corner gamma, entries (1,2) and (2,1) equal to sqrt(1 - gamma^2),
    entry (2,2) equal to -gamma, identity elsewhere.
    """
    if not -1.0 < gamma11 < 1.0:
        raise ValueError(f"gamma11 must be in (-1, 1), got {gamma11}")
    p = _check_p(p)
    if p < 2:
        raise ValueError("p must be >= 2")
    s = np.sqrt(1.0 - gamma11 * gamma11)
    m = np.eye(p)
    m[0, 0] = gamma11
    m[0, 1] = s
    m[1, 0] = s
    m[1, 1] = -gamma11
    return OrthogonalMatrix(m)


# ---------------------------------------------------------------------------
# QR oracle
# ---------------------------------------------------------------------------

def qr_matrix(p: int, rng: RngStream, sign_fix: bool = True) -> np.ndarray:
    """One draw from the QR sampler as a raw array.

    ``sign_fix=False`` keeps the factorization's arbitrary signs and is NOT
    Haar; it exists as a negative control for the test harness.
    """
    p = _check_p(p)
    g = rng.normals(p * p).reshape(p, p)
    q, r = np.linalg.qr(g)
    if sign_fix:
        d = np.diagonal(r)
        q = q * np.where(d >= 0.0, 1.0, -1.0)[None, :]
    return q


def qr_matrices(p: int, n: int, rng: RngStream, sign_fix: bool = True
                ) -> np.ndarray:
    """``n`` QR-sampler draws, stacked (n, p, p); vectorized."""
    p = _check_p(p)
    g = rng.normals(n * p * p).reshape(n, p, p)
    q, r = np.linalg.qr(g)
    if sign_fix:
        d = np.diagonal(r, axis1=1, axis2=2)
        q = q * np.where(d >= 0.0, 1.0, -1.0)[:, None, :]
    return q


def qr_oracle(p: int, rng: RngStream) -> HaarSample:
    """One certified draw from the sign-corrected QR sampler."""
    token = rng.state_token()
    return HaarSample(OrthogonalMatrix(qr_matrix(p, rng)), token)


# ---------------------------------------------------------------------------
# batched recursive construction
# ---------------------------------------------------------------------------

def _stable_w(s: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reflector vectors w = s e1 - g with a cancellation-free head.

    When g[0] > 0 the head is computed as (s^2 - g0^2) / (s + g0)
    = sum(g[1:]^2) / (s + g0), which stays accurate when g lies near the
    axis.  Returns (w, ||w||^2).
    """
    tail_sq = np.einsum("ni,ni->n", g[:, 1:], g[:, 1:])
    w = -g
    g0 = g[:, 0]
    pos = g0 > 0.0
    w[:, 0] = np.where(pos, tail_sq / (s + np.where(pos, g0, 0.0)), s - g0)
    return w, w[:, 0] ** 2 + tail_sq


def _grow_batch(cores: np.ndarray, k: int, rng: RngStream) -> np.ndarray:
    """Vectorized level: (n, k-2, k-2) cores to (n, k, k) matrices."""
    n = cores.shape[0]
    gamma = _law(k).sample_many(n, rng)
    s = np.sqrt(1.0 - gamma * gamma)
    g21 = s[:, None] * sample_uniform_sphere_many(k - 1, n, rng)
    g12 = s[:, None] * sample_uniform_sphere_many(k - 1, n, rng)

    block = np.zeros((n, k - 1, k - 1))
    block[:, 0, 0] = -gamma
    block[:, 1:, 1:] = cores

    for g, side in ((g12, "right"), (g21, "left")):
        w, ww = _stable_w(s, g)
        ident = np.sqrt(ww) <= IDENTITY_RTOL * s
        factor = np.where(ident, 0.0, 2.0 / np.where(ident, 1.0, ww))
        if side == "right":
            bw = np.einsum("nij,nj->ni", block, w)
            block -= (factor[:, None] * bw)[:, :, None] * w[:, None, :]
        else:
            wb = np.einsum("ni,nij->nj", w, block)
            block -= w[:, :, None] * (factor[:, None] * wb)[:, None, :]

    out = np.empty((n, k, k))
    out[:, 0, 0] = gamma
    out[:, 0, 1:] = g12
    out[:, 1:, 0] = g21
    out[:, 1:, 1:] = block
    return out


def _haar_chunk(p: int, n: int, rng: RngStream) -> np.ndarray:
    if p % 2 == 0:
        g = np.zeros((n, 0, 0))
    else:
        signs = np.where(rng.uniforms(n) < 0.5, 1.0, -1.0)
        g = signs.reshape(n, 1, 1)
    for k in range(g.shape[1] + 2, p + 1, 2):
        g = _grow_batch(g, k, rng)
    return g


def haar_matrices(p: int, n: int, rng: RngStream,
                  chunk: int = BATCH_CHUNK) -> np.ndarray:
    """``n`` recursive Haar draws, stacked (n, p, p).

    Same construction as :func:`haar_matrix`, vectorized level by level
    across the batch; generated in consecutive chunks on the one stream.
    """
    p = _check_p(p)
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = np.empty((n, p, p))
    done = 0
    while done < n:
        m = min(chunk, n - done)
        out[done:done + m] = _haar_chunk(p, m, rng)
        done += m
    return out
