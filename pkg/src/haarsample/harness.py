"""Statistical machinery turning distributional claims into pass/fail tests.

Kolmogorov-Smirnov statistics are computed exactly from sorted samples and
compared against asymptotic critical values: every sample size used by the
verification suites is at least 10^4, where the asymptotic approximation
error is negligible next to the alpha = 0.01 margin.  Moment tests use five
Monte Carlo standard errors, conservative enough to keep a fixed-seed suite
deterministic in practice: with all null hypotheses true each test passes
with probability at least 0.99 (the flakiness budget; CI runs fixed seeds,
soak mode runs fresh ones).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

#: rounded asymptotic Kolmogorov quantiles c(alpha)
KOLMOGOROV_C = {0.01: 1.628, 0.05: 1.358, 0.10: 1.224}

MOMENT_SE_THRESHOLD = 5.0
MIN_KS_SAMPLES = 100
MIN_MOMENT_SAMPLES = 10_000


def kolmogorov_critical(alpha: float) -> float:
    """c(alpha) with the tabulated rounding for the standard levels."""
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"alpha must be in (0, 0.5), got {alpha}")
    if alpha in KOLMOGOROV_C:
        return KOLMOGOROV_C[alpha]
    return math.sqrt(-0.5 * math.log(0.5 * alpha))


@dataclass(frozen=True)
class TestReport:
    """Outcome of one statistical check.

    ``passed`` is ``|statistic| <= threshold`` (KS statistics are already
    nonnegative, so the same rule covers both test families).
    """

    name: str
    n: tuple[int, ...]
    statistic: float
    threshold: float
    passed: bool
    details: str = field(default="", compare=False)

    def to_line(self) -> str:
        joined = ",".join(str(k) for k in self.n)
        return (f"name={self.name} n={joined} statistic={self.statistic!r} "
                f"threshold={self.threshold!r} "
                f"passed={'true' if self.passed else 'false'}")

    def to_dict(self) -> dict:
        return {"name": self.name, "n": list(self.n),
                "statistic": self.statistic, "threshold": self.threshold,
                "passed": self.passed, "details": self.details}


def reports_to_text(reports: Sequence[TestReport]) -> str:
    return "\n".join(r.to_line() for r in reports) + "\n"


def reports_to_json(reports: Sequence[TestReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"


def _report(name, n, statistic, threshold, details=""):
    return TestReport(name=name, n=tuple(n), statistic=float(statistic),
                      threshold=float(threshold),
                      passed=bool(abs(statistic) <= threshold), details=details)


def ks_one_sample(samples, cdf: Callable, name: str = "ks_one_sample",
                  alpha: float = 0.01) -> TestReport:
    """Exact D_n = sup |F_n - F| against threshold c(alpha) / sqrt(n)."""
    s = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(s)
    if n == 0:
        raise ValueError("samples must be nonempty")
    if n < MIN_KS_SAMPLES:
        raise ValueError(f"need at least {MIN_KS_SAMPLES} samples, got {n}")
    f = np.asarray(cdf(s), dtype=np.float64)
    i = np.arange(1, n + 1)
    d = max(float(np.max(i / n - f)), float(np.max(f - (i - 1) / n)))
    return _report(name, (n,), d, kolmogorov_critical(alpha) / math.sqrt(n),
                   details=f"alpha={alpha}")


def ks_two_sample(a, b, name: str = "ks_two_sample",
                  alpha: float = 0.01) -> TestReport:
    """Exact two-sample KS statistic vs c(alpha) * sqrt((n + m) / (n m))."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        raise ValueError("samples must be nonempty")
    if n < MIN_KS_SAMPLES or m < MIN_KS_SAMPLES:
        raise ValueError(f"need at least {MIN_KS_SAMPLES} samples per side")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / n
    fb = np.searchsorted(b, grid, side="right") / m
    d = float(np.max(np.abs(fa - fb)))
    thr = kolmogorov_critical(alpha) * math.sqrt((n + m) / (n * m))
    return _report(name, (n, m), d, thr, details=f"alpha={alpha}")


def moment_test(samples, target: float, known_variance_bound: float | None = None,
                name: str = "moment_test",
                threshold: float = MOMENT_SE_THRESHOLD) -> TestReport:
    """Standardized deviation of the sample mean from ``target``.

    The statistic is (mean - target) / (sd / sqrt(n)), compared against
    five standard errors.  ``known_variance_bound``, when given, is only a
    diagnostic: a note is attached if the sample variance exceeds it.
    """
    s = np.asarray(samples, dtype=np.float64)
    n = len(s)
    if n < MIN_MOMENT_SAMPLES:
        raise ValueError(f"need at least {MIN_MOMENT_SAMPLES} samples, got {n}")
    mean = float(np.mean(s))
    sd = float(np.std(s, ddof=1))
    details = f"mean={mean!r} target={target!r}"
    if sd == 0.0:
        if mean == target:
            return _report(name, (n,), 0.0, threshold, details)
        return TestReport(name=name, n=(n,), statistic=math.inf,
                          threshold=float(threshold), passed=False,
                          details=details + " zero sample variance off target")
    if known_variance_bound is not None and sd * sd > known_variance_bound:
        details += f" sample variance above bound {known_variance_bound!r}"
    stat = (mean - target) / (sd / math.sqrt(n))
    return _report(name, (n,), stat, threshold, details)


def invariance_test(sampler: Callable[[int], np.ndarray], g_left, g_right,
                    statistic: Callable[[np.ndarray], np.ndarray], n: int,
                    name: str = "invariance_test",
                    alpha: float = 0.01) -> TestReport:
    """Two-sample KS between a statistic of plain and translated draws.

    ``sampler(m)`` must return a stacked (m, p, p) batch; ``statistic`` maps
    such a batch to an (m,) vector.  Plain and translated statistics are
    computed on independent batches.
    """
    if n < MIN_MOMENT_SAMPLES:
        raise ValueError(f"need at least {MIN_MOMENT_SAMPLES} draws, got {n}")
    g_left = np.asarray(g_left, dtype=np.float64)
    g_right = np.asarray(g_right, dtype=np.float64)
    batch = sampler(n)
    p = batch.shape[1]
    if g_left.shape != (p, p) or g_right.shape != (p, p):
        raise ValueError(f"group elements must be {p} x {p}, got "
                         f"{g_left.shape} and {g_right.shape}")
    plain = statistic(batch)
    translated = statistic(np.einsum("ij,njk,lk->nil", g_left, sampler(n),
                                     g_right))
    return ks_two_sample(plain, translated, name=name, alpha=alpha)
