"""Probability primitives used throughout the package.

Normal, Half-Normal, Folded-Normal and bivariate Normal distributions with
density, cumulative, quantile, sampling and maximum-likelihood fitting, plus
a seedable random-stream abstraction.  The Folded Normal is the distribution
of ``|N(location, spread2)|``; the Half Normal is its location-zero special
case, so no separate type is needed for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize, special

from .errors import DomainError, InsufficientDataError

__all__ = [
    "RandomStream",
    "FoldedNormal",
    "Gaussian1D",
    "Gaussian2D",
    "fit_folded_normal",
    "normal_quantile",
]

_SQRT2 = math.sqrt(2.0)
_LOG_2PI = math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RandomStream:
    """A reproducible, splittable source of randomness.

    Identical ``(seed, stream)`` pairs reproduce identical draw sequences;
    distinct stream ids give statistically independent streams.  Internally
    each stream maps to a PCG64 generator keyed by a ``SeedSequence`` so
    independence holds by construction.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream < 0:
            raise DomainError("seed and stream id must be non-negative integers")

    def generator(self, *subkey: int) -> np.random.Generator:
        """Return a fresh generator for this stream.

        Extra integers extend the key, giving independent sub-streams (one
        per chain, worker partition, ...) that are still fully determined by
        ``(seed, stream, *subkey)``.
        """
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, *subkey))
        return np.random.Generator(np.random.PCG64(ss))


# ---------------------------------------------------------------------------
# scalar normal helpers
# ---------------------------------------------------------------------------

def _phi_cdf(x):
    return 0.5 * (1.0 + special.erf(np.asarray(x, dtype=float) / _SQRT2))


def normal_quantile(p: float) -> float:
    """Inverse standard normal cdf, accurate to better than 1e-12 in Phi."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie strictly in (0, 1), got {p}")
    return float(special.ndtri(p))


def _validate_argument(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    return arr


def _scalar_like(value: np.ndarray, template) -> float | np.ndarray:
    if np.isscalar(template) or getattr(template, "ndim", 1) == 0:
        return float(value)
    return value


# ---------------------------------------------------------------------------
# folded normal
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FoldedNormal:
    """Distribution of ``|N(location, spread2)|``.

    ``spread2`` is the variance of the underlying Normal before folding.
    ``location = 0`` gives the Half Normal.  A zero ``spread2`` is accepted
    as a point mass at ``|location|`` for sampling only; density, cumulative
    and fitting reject it.
    """

    location: float
    spread2: float

    def __post_init__(self):
        if not (math.isfinite(self.location) and math.isfinite(self.spread2)):
            raise DomainError("folded normal parameters must be finite")
        if self.spread2 < 0.0:
            raise DomainError(f"spread2 must be >= 0, got {self.spread2}")

    def _require_spread(self):
        if self.spread2 == 0.0:
            raise DomainError("degenerate folded normal (spread2 = 0) has no density")

    def pdf(self, x):
        """Two-term exponential density; zero for negative arguments."""
        self._require_spread()
        arr = _validate_argument(x)
        inv2 = 0.5 / self.spread2
        norm = 1.0 / math.sqrt(2.0 * math.pi * self.spread2)
        dens = norm * (np.exp(-inv2 * (arr - self.location) ** 2)
                       + np.exp(-inv2 * (arr + self.location) ** 2))
        out = np.where(arr >= 0.0, dens, 0.0)
        return _scalar_like(out, x)

    def cdf(self, x):
        """P(X <= x); 0 below the support, monotone to 1."""
        self._require_spread()
        arr = _validate_argument(x)
        sd = math.sqrt(self.spread2)
        val = _phi_cdf((arr - self.location) / sd) - _phi_cdf((-arr - self.location) / sd)
        out = np.where(arr >= 0.0, val, 0.0)
        return _scalar_like(out, x)

    def survival(self, x):
        """P(X > x), computed as 1 - cdf."""
        cdf = self.cdf(x)
        return 1.0 - cdf if np.isscalar(cdf) else 1.0 - np.asarray(cdf)

    def quantile(self, p: float) -> float:
        """Inverse cdf by bisection; there is no closed form."""
        self._require_spread()
        p = float(p)
        if not 0.0 < p < 1.0:
            raise DomainError(f"probability must lie strictly in (0, 1), got {p}")
        lo, hi = 0.0, abs(self.location) + 10.0 * math.sqrt(self.spread2)
        while self.cdf(hi) < p:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.cdf(mid) < p:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-14 * max(1.0, hi):
                break
        return 0.5 * (lo + hi)

    def mean(self) -> float:
        """E|N(location, spread2)| in closed form."""
        if self.spread2 == 0.0:
            return abs(self.location)
        sd = math.sqrt(self.spread2)
        ratio = self.location / sd
        return float(sd * math.sqrt(2.0 / math.pi) * math.exp(-0.5 * ratio ** 2)
                     + self.location * (1.0 - 2.0 * _phi_cdf(-ratio)))

    def sample(self, n: int, rng: RandomStream | np.random.Generator) -> np.ndarray:
        """n absolute-value draws of the underlying Normal."""
        if n < 1:
            raise DomainError(f"sample size must be >= 1, got {n}")
        gen = rng.generator() if isinstance(rng, RandomStream) else rng
        if self.spread2 == 0.0:
            return np.full(n, abs(self.location))
        return np.abs(gen.normal(self.location, math.sqrt(self.spread2), size=n))

    def log_likelihood(self, samples: np.ndarray) -> float:
        """Sum of log densities, evaluated stably in the tails."""
        self._require_spread()
        x = np.asarray(samples, dtype=float)
        inv2 = 0.5 / self.spread2
        a = -inv2 * (x - self.location) ** 2
        b = -inv2 * (x + self.location) ** 2
        return float(np.sum(np.logaddexp(a, b))
                     - 0.5 * len(x) * (_LOG_2PI + math.log(self.spread2)))


def fit_folded_normal(samples: Sequence[float]) -> FoldedNormal:
    """Maximum-likelihood Folded-Normal fit.

    Derivative-free simplex search on (location, log spread2), started from
    Normal moment matching, with a Half-Normal start as a fallback for
    near-zero locations.  The returned location is reported non-negative;
    the density is symmetric in its sign.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or len(x) < 30:
        raise InsufficientDataError(
            f"folded normal fit needs at least 30 samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("samples must be finite")
    if np.any(x < 0.0):
        raise DomainError("folded normal samples must be non-negative")
    if np.var(x) == 0.0:
        raise DomainError("samples have zero variance; fit is degenerate")

    def nll(params):
        loc, log_sp = params
        if not (math.isfinite(loc) and math.isfinite(log_sp)) or abs(log_sp) > 700:
            return np.inf
        return -FoldedNormal(loc, math.exp(log_sp)).log_likelihood(x)

    starts = [
        np.array([x.mean(), math.log(x.var())]),        # Normal moment match
        np.array([0.0, math.log(np.mean(x ** 2))]),     # Half-Normal moment match
    ]
    best = None
    for start in starts:
        res = optimize.minimize(nll, start, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-8,
                                         "maxiter": 4000})
        if best is None or res.fun < best.fun:
            best = res
    loc, log_sp = best.x
    return FoldedNormal(abs(float(loc)), float(math.exp(log_sp)))


# ---------------------------------------------------------------------------
# gaussians
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gaussian1D:
    """Univariate Normal.  ``sd = 0`` is tolerated as a point mass."""

    mean: float
    sd: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.sd)):
            raise DomainError("gaussian parameters must be finite")
        if self.sd < 0.0:
            raise DomainError(f"sd must be >= 0, got {self.sd}")

    def pdf(self, x):
        if self.sd == 0.0:
            raise DomainError("point mass has no density")
        arr = _validate_argument(x)
        z = (arr - self.mean) / self.sd
        out = np.exp(-0.5 * z ** 2) / (self.sd * math.sqrt(2.0 * math.pi))
        return _scalar_like(out, x)

    def cdf(self, x):
        if self.sd == 0.0:
            arr = _validate_argument(x)
            return _scalar_like(np.where(arr >= self.mean, 1.0, 0.0), x)
        arr = _validate_argument(x)
        return _scalar_like(_phi_cdf((arr - self.mean) / self.sd), x)

    def quantile(self, p: float) -> float:
        if self.sd == 0.0:
            return self.mean
        return self.mean + self.sd * normal_quantile(p)

    def sample(self, n: int, rng: RandomStream | np.random.Generator) -> np.ndarray:
        if n < 1:
            raise DomainError(f"sample size must be >= 1, got {n}")
        gen = rng.generator() if isinstance(rng, RandomStream) else rng
        if self.sd == 0.0:
            return np.full(n, self.mean)
        return gen.normal(self.mean, self.sd, size=n)


def _validate_cov2(cov: np.ndarray) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2):
        raise DomainError(f"covariance must be 2x2, got shape {cov.shape}")
    if not np.all(np.isfinite(cov)):
        raise DomainError("covariance must be finite")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12 * (1.0 + np.abs(cov).max())):
        raise DomainError("covariance must be symmetric")
    tol = 1e-10 * max(1.0, float(np.trace(cov)))
    if cov[0, 0] < -tol or cov[1, 1] < -tol or np.linalg.det(cov) < -tol:
        raise DomainError("covariance must be positive semi-definite")
    return 0.5 * (cov + cov.T)


@dataclass(frozen=True)
class Gaussian2D:
    """Bivariate Normal with a symmetric positive semi-definite covariance."""

    mean: tuple[float, float]
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        if mean.shape != (2,) or not np.all(np.isfinite(mean)):
            raise DomainError("mean must be a finite pair")
        object.__setattr__(self, "mean", (float(mean[0]), float(mean[1])))
        object.__setattr__(self, "cov", _validate_cov2(self.cov))

    def transform(self) -> np.ndarray:
        """A matrix B with B B^T = cov (eigendecomposition, PSD-safe)."""
        evals, evecs = np.linalg.eigh(self.cov)
        evals = np.clip(evals, 0.0, None)
        return evecs * np.sqrt(evals)

    def sample(self, n: int, rng: RandomStream | np.random.Generator) -> np.ndarray:
        """n draws, shape (n, 2); degenerate covariances collapse exactly."""
        if n < 1:
            raise DomainError(f"sample size must be >= 1, got {n}")
        gen = rng.generator() if isinstance(rng, RandomStream) else rng
        z = gen.standard_normal(size=(n, 2))
        return np.asarray(self.mean) + z @ self.transform().T
