"""Marginal law of a single entry of a Haar orthogonal matrix.

For a Haar-distributed p x p orthogonal matrix, any one entry has density

    f(x) = C(p) * (1 - x^2)^((p - 3) / 2)  on (-1, 1),
    C(p) = Gamma(p/2) / (Gamma(1/2) * Gamma((p - 1)/2)),

which is also the law of one coordinate of a uniform point on the unit
sphere in R^p.  Shifting to (x + 1) / 2 turns this into a symmetric
Beta((p-1)/2, (p-1)/2), which gives a singularity-free CDF through the
regularized incomplete beta function and a standard sampling route through
gamma variates.  (The change of variables is verified against direct
quadrature of the pdf in the test suite.)

p = 2 is the arcsine law with infinite endpoints; p = 3 is uniform on
(-1, 1).  The support is the open interval: for p = 1 the entry is +-1 and
this density does not apply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .rng import RngStream

_QUANTILE_TOL = 1e-12
_QUANTILE_BRACKET = 1e-15


def _standard_gamma(rng: RngStream, shape: float, n: int) -> np.ndarray:
    """Gamma(shape, 1) deviates by the Marsaglia-Tsang squeeze method.

    For shape < 1 the boost path draws Gamma(shape + 1) and multiplies by
    U^(1/shape).  Each rejection round consumes one normal and one uniform
    per still-unfilled slot, so consumption is deterministic given the
    stream.
    """
    if shape <= 0:
        raise ValueError("shape must be positive")
    if shape < 1.0:
        g = _standard_gamma(rng, shape + 1.0, n)
        u = rng.uniforms(n)
        return g * u ** (1.0 / shape)

    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    have = 0
    while have < n:
        m = n - have
        x = rng.normals(m)
        u = rng.uniforms(m)
        v = (1.0 + c * x) ** 3
        pos = v > 0.0
        x2 = x * x
        squeeze = u < 1.0 - 0.0331 * x2 * x2
        with np.errstate(divide="ignore", invalid="ignore"):
            slow = np.log(u) < 0.5 * x2 + d * (1.0 - v + np.log(np.where(pos, v, 1.0)))
        accept = pos & (squeeze | slow)
        vals = d * v[accept]
        take = len(vals)
        out[have:have + take] = vals
        have += take
    return out


def _standard_gamma_scalar(rng: RngStream, shape: float) -> float:
    """Scalar twin of :func:`_standard_gamma` at n = 1, without the arrays."""
    if shape < 1.0:
        g = _standard_gamma_scalar(rng, shape + 1.0)
        return g * rng.next_uniform() ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = rng.next_normal()
        u = rng.next_uniform()
        v = (1.0 + c * x) ** 3
        if v <= 0.0:
            continue
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return d * v
        if u == 0.0 or math.log(u) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
            return d * v


@dataclass(frozen=True)
class EntryLaw:
    """Marginal law of one entry in ambient dimension ``p`` (p >= 2)."""

    p: int

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 2:
            raise ValueError(f"p must be an integer >= 2, got {self.p}")
        object.__setattr__(self, "p", int(self.p))

    @property
    def beta_shape(self) -> float:
        return 0.5 * (self.p - 1)

    def _log_prefactor(self) -> float:
        p = self.p
        return (math.lgamma(0.5 * p) - math.lgamma(0.5)
                - math.lgamma(0.5 * (p - 1)))

    def pdf(self, x):
        """Density at ``x`` (scalar or array).

        Outside the open support: 0 for p >= 4 and for |x| > 1.  At the
        endpoints |x| = 1: +inf for p = 2 (arcsine endpoints), 1/2 for
        p = 3 (the uniform density extends to the closed interval), 0 for
        p >= 4.
        """
        x = np.asarray(x, dtype=np.float64)
        pref = math.exp(self._log_prefactor())
        inside = np.abs(x) < 1.0
        onedge = np.abs(x) == 1.0
        with np.errstate(invalid="ignore"):
            body = pref * np.power(np.where(inside, 1.0 - x * x, 1.0),
                                   0.5 * (self.p - 3))
        out = np.where(inside, body, 0.0)
        if self.p == 2:
            out = np.where(onedge, np.inf, out)
        elif self.p == 3:
            out = np.where(onedge, 0.5, out)
        if out.ndim == 0:
            return float(out)
        return out

    def cdf(self, x):
        """F(x), via the regularized incomplete beta; clamps outside [-1, 1]."""
        x = np.asarray(x, dtype=np.float64)
        y = np.clip(0.5 * (x + 1.0), 0.0, 1.0)
        a = self.beta_shape
        out = special.betainc(a, a, y)
        if out.ndim == 0:
            return float(out)
        return out

    def quantile(self, u: float) -> float:
        """Inverse CDF on (0, 1); |cdf(result) - u| <= 1e-12."""
        if not 0.0 < u < 1.0:
            raise ValueError(f"u must be in (0, 1), got {u}")
        a = self.beta_shape
        x = 2.0 * float(special.betaincinv(a, a, u)) - 1.0
        if abs(self.cdf(x) - u) > _QUANTILE_TOL:
            lo, hi = -1.0 + _QUANTILE_BRACKET, 1.0 - _QUANTILE_BRACKET
            x = optimize.brentq(lambda t: self.cdf(t) - u, lo, hi,
                                xtol=1e-13, rtol=8.9e-16)
        return x

    def sample_many(self, n: int, rng: RngStream) -> np.ndarray:
        """``n`` iid draws with this density, as ``2 * Beta - 1``.

        The Beta deviate is a ratio of two gamma deviates drawn on the same
        stream (all numerators first, then all denominators).  Draws that
        land exactly on 0 or 1 (probability ~2^-53 per draw) are rejected
        and redrawn, keeping the open support.
        """
        a = self.beta_shape
        out = np.empty(n)
        have = 0
        while have < n:
            m = n - have
            g1 = _standard_gamma(rng, a, m)
            g2 = _standard_gamma(rng, a, m)
            with np.errstate(invalid="ignore"):
                x = 2.0 * (g1 / (g1 + g2)) - 1.0
            good = (x > -1.0) & (x < 1.0)
            vals = x[good]
            out[have:have + len(vals)] = vals
            have += len(vals)
        return out

    def sample(self, rng: RngStream) -> float:
        """Scalar draw (scalar-math twin of ``sample_many``; deterministic
        given the stream, consumption round structure as documented there)."""
        a = self.beta_shape
        while True:
            g1 = _standard_gamma_scalar(rng, a)
            g2 = _standard_gamma_scalar(rng, a)
            x = 2.0 * (g1 / (g1 + g2)) - 1.0
            if -1.0 < x < 1.0:
                return x
