"""Composable verification battery behind the ``verify`` CLI subcommand.

Each battery run checks one sampling method at one dimension against the
distributional facts the samplers are supposed to realize: certification
bounds, the corner-entry marginal and its moments, the sphere-coordinate
law of the normalized first column, translation invariance, and agreement
with the independent QR oracle.  Every test draws from its own substream of
the run seed, so a battery is reproducible line by line.
"""

from __future__ import annotations

import math

import numpy as np

from .entry_law import EntryLaw
from .harness import TestReport, invariance_test, ks_one_sample, ks_two_sample, moment_test
from .rng import RngStream
from .sampler import haar_matrices, qr_matrices
from .linalg import ORTHOGONALITY_TOL, DETERMINANT_TOL

METHODS = ("recursive", "qr", "qr-nosign")

#: draws spent on per-matrix certification inside a battery
_CERT_CAP = 2000


def _sampler_for(method: str):
    if method == "recursive":
        return lambda p, n, rng: haar_matrices(p, n, rng)
    if method == "qr":
        return lambda p, n, rng: qr_matrices(p, n, rng)
    if method == "qr-nosign":
        return lambda p, n, rng: qr_matrices(p, n, rng, sign_fix=False)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def corner_stat(batch: np.ndarray) -> np.ndarray:
    return batch[:, 0, 0]


def trace_stat(batch: np.ndarray) -> np.ndarray:
    return np.trace(batch, axis1=1, axis2=2)


def permutation_matrix(order) -> np.ndarray:
    m = np.zeros((len(order), len(order)))
    for i, j in enumerate(order):
        m[i, j] = 1.0
    return m


def rotation_reflection(p: int, theta: float = 1.0) -> np.ndarray:
    """A fixed plane rotation in the leading 2 x 2 block, identity elsewhere."""
    m = np.eye(p)
    if p >= 2:
        c, s = math.cos(theta), math.sin(theta)
        m[0, 0], m[0, 1], m[1, 0], m[1, 1] = c, -s, s, c
    else:
        m[0, 0] = -1.0
    return m


def invariance_pairs(p: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Two fixed non-trivial (g_left, g_right) translation pairs."""
    if p == 1:
        flip = np.array([[-1.0]])
        return [(flip, np.eye(1)), (flip, flip)]
    cyc = permutation_matrix([(i + 1) % p for i in range(p)])
    rev = permutation_matrix(list(reversed(range(p))))
    refl = np.eye(p)
    refl[0, 0] = -1.0
    return [(cyc, rev), (rotation_reflection(p), refl)]


def run_battery(p: int, method: str = "recursive", n: int = 20_000,
                seed: int = 2024, alpha: float = 0.01) -> list[TestReport]:
    """All checks for one (dimension, method); one TestReport per check."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if n < 10_000:
        raise ValueError("battery needs n >= 10000 for its moment tests")
    draw = _sampler_for(method)
    other_method = "recursive" if method != "recursive" else "qr"
    other = _sampler_for(other_method)

    def stream(slot: int) -> RngStream:
        return RngStream(seed, stream_index=p * 1000 + slot)

    tag = f"{method}_p{p}"
    reports: list[TestReport] = []

    batch = draw(p, n, stream(0))
    ncap = min(n, _CERT_CAP)
    sub = batch[:ncap]
    gram = np.einsum("nji,njk->nik", sub, sub)
    gram[:, np.arange(p), np.arange(p)] -= 1.0
    residual = float(np.max(np.abs(gram))) if p > 0 else 0.0
    reports.append(TestReport(
        name=f"residual_max_{tag}", n=(ncap,), statistic=residual,
        threshold=ORTHOGONALITY_TOL, passed=residual <= ORTHOGONALITY_TOL))

    dets = np.linalg.det(batch)
    det_err = float(np.max(np.abs(np.abs(dets[:ncap]) - 1.0)))
    reports.append(TestReport(
        name=f"det_abs_err_{tag}", n=(ncap,), statistic=det_err,
        threshold=DETERMINANT_TOL, passed=det_err <= DETERMINANT_TOL))

    plus_freq = float(np.mean(dets > 0.0))
    band = 1.5 / math.sqrt(n)  # 3 sigma binomial band around 1/2
    reports.append(TestReport(
        name=f"det_plus_freq_{tag}", n=(n,), statistic=plus_freq - 0.5,
        threshold=band, passed=abs(plus_freq - 0.5) <= band,
        details=f"freq={plus_freq!r}"))

    corner = corner_stat(batch)
    if p >= 2:
        law = EntryLaw(p)
        reports.append(ks_one_sample(corner, law.cdf,
                                     name=f"ks_corner_{tag}", alpha=alpha))
        reports.append(moment_test(corner ** 2, 1.0 / p,
                                   name=f"corner_sq_moment_{tag}"))
        reports.append(moment_test(corner ** 4, 3.0 / (p * (p + 2)),
                                   name=f"corner_4th_moment_{tag}"))
        reports.append(moment_test(batch[:, 0, p - 1] ** 2, 1.0 / p,
                                   name=f"offdiag_sq_moment_{tag}"))
    else:
        sign_freq = float(np.mean(corner > 0.0))
        reports.append(TestReport(
            name=f"corner_plus_freq_{tag}", n=(n,), statistic=sign_freq - 0.5,
            threshold=band, passed=abs(sign_freq - 0.5) <= band))

    if p >= 3:
        scale = np.sqrt(1.0 - corner ** 2)
        coord = batch[:, 1, 0] / scale
        reports.append(ks_one_sample(coord, EntryLaw(p - 1).cdf,
                                     name=f"ks_column_coord_{tag}", alpha=alpha))

    pairs = invariance_pairs(p)
    inv_stream = stream(1)
    reports.append(invariance_test(
        lambda m: draw(p, m, inv_stream), *pairs[0], trace_stat, n,
        name=f"invariance_trace_{tag}", alpha=alpha))
    reports.append(invariance_test(
        lambda m: draw(p, m, inv_stream), *pairs[1], corner_stat, n,
        name=f"invariance_corner_{tag}", alpha=alpha))

    ref = other(p, n, stream(2))
    reports.append(ks_two_sample(corner, corner_stat(ref),
                                 name=f"ks_{other_method}_corner_{tag}",
                                 alpha=alpha))
    reports.append(ks_two_sample(trace_stat(batch), trace_stat(ref),
                                 name=f"ks_{other_method}_trace_{tag}",
                                 alpha=alpha))
    return reports
