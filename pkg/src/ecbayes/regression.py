"""Posterior inference for the ensemble regression.

Two paths: the improper reference prior, sampled exactly through Normal /
scaled-inverse-chi-squared conjugacy, and subjective Normal + Half-Normal
priors, sampled by Gibbs updates on the coefficients with univariate slice
updates on the residual sd.  Both consume only least-squares sufficient
statistics, computed with exactly-rounded sums, so row order is genuinely
irrelevant to the draws.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy import stats as sstats

from .distributions import FoldedNormal, RandomStream, fit_folded_normal
from .errors import (ConvergenceError, DomainError, ImproperPosteriorError,
                     InsufficientDataError)

if TYPE_CHECKING:  # pragma: no cover
    from .dataio import Ensemble

__all__ = [
    "ModelPrior",
    "RegressionPosterior",
    "PosteriorSummary",
    "LaplaceReport",
    "fit_reference",
    "fit_subjective",
    "summarize",
    "laplace_check",
]

RHAT_WARN = 1.01
ESS_WARN = 400.0
RHAT_FAIL = 1.2
ESS_FAIL = 50.0


@dataclass(frozen=True)
class ModelPrior:
    """Prior on the regression coefficients and residual sd.

    ``reference`` is the improper flat/log-scale prior under which the
    Bayesian and classical analyses coincide.  ``subjective`` is
    Normal(mu, Sigma_beta) on the coefficients (diagonal Sigma_beta
    recommended: let the data supply any correlation) with a Half-Normal
    scale prior on the residual sd.
    """

    kind: str
    mu: tuple[float, float] | None = None
    Sigma_beta: np.ndarray | None = None
    sigma_s: float | None = None

    def __post_init__(self):
        if self.kind not in ("reference", "subjective"):
            raise DomainError(f"prior kind must be reference|subjective, got {self.kind!r}")
        if self.kind == "subjective":
            mu = np.asarray(self.mu, dtype=float)
            if mu.shape != (2,) or not np.all(np.isfinite(mu)):
                raise DomainError("subjective prior mean must be a finite pair")
            object.__setattr__(self, "mu", (float(mu[0]), float(mu[1])))
            S = np.asarray(self.Sigma_beta, dtype=float)
            if S.shape != (2, 2) or not np.all(np.isfinite(S)):
                raise DomainError("Sigma_beta must be a finite 2x2 matrix")
            if not np.allclose(S, S.T):
                raise DomainError("Sigma_beta must be symmetric")
            if np.linalg.det(S) <= 0 or S[0, 0] <= 0 or S[1, 1] <= 0:
                raise DomainError("Sigma_beta must be positive definite")
            object.__setattr__(self, "Sigma_beta", S)
            if self.sigma_s is None or not self.sigma_s > 0:
                raise DomainError(f"sigma_s must be > 0, got {self.sigma_s}")

    @classmethod
    def reference(cls) -> "ModelPrior":
        return cls("reference")

    @classmethod
    def subjective(cls, mu, Sigma_beta, sigma_s: float) -> "ModelPrior":
        return cls("subjective", mu=tuple(np.asarray(mu, dtype=float)),
                   Sigma_beta=np.asarray(Sigma_beta, dtype=float),
                   sigma_s=float(sigma_s))

    def to_json_dict(self) -> dict:
        if self.kind == "reference":
            return {"kind": "reference"}
        return {"kind": "subjective", "mu": list(self.mu),
                "Sigma_beta": self.Sigma_beta.tolist(), "sigma_s": self.sigma_s}


@dataclass(frozen=True)
class RegressionPosterior:
    """Joint posterior draws of (beta0, beta1, sigma)."""

    draws: np.ndarray
    chains: int
    prior: ModelPrior
    diagnostics: dict | None = None

    def __post_init__(self):
        d = np.asarray(self.draws, dtype=float)
        if d.ndim != 2 or d.shape[1] != 3:
            raise DomainError(f"draws must have shape (n, 3), got {d.shape}")
        if np.any(d[:, 2] <= 0):
            raise DomainError("all sigma draws must be positive")
        if self.chains < 1 or d.shape[0] % self.chains != 0:
            raise DomainError("draw count must be a positive multiple of chains")
        object.__setattr__(self, "draws", d)

    @property
    def beta0(self) -> np.ndarray:
        return self.draws[:, 0]

    @property
    def beta1(self) -> np.ndarray:
        return self.draws[:, 1]

    @property
    def sigma(self) -> np.ndarray:
        return self.draws[:, 2]

    @property
    def n_draws(self) -> int:
        return self.draws.shape[0]


@dataclass(frozen=True)
class PosteriorSummary:
    """Moments of the regression posterior plus a Folded-Normal fit to the
    residual-sd draws (used by the guided reality layer)."""

    beta0_hat: float
    beta1_hat: float
    sd_beta0: float
    sd_beta1: float
    rho: float
    sigma_fn: FoldedNormal
    sigma_mean: float
    sigma_sd: float

    def __post_init__(self):
        if not (self.sd_beta0 > 0 and self.sd_beta1 > 0 and self.sigma_sd > 0):
            raise DomainError("posterior standard deviations must be positive")
        if not -1.0 <= self.rho <= 1.0:
            raise DomainError(f"correlation must lie in [-1,1], got {self.rho}")

    def to_json_dict(self) -> dict:
        return {
            "beta0": {"mean": self.beta0_hat, "sd": self.sd_beta0},
            "beta1": {"mean": self.beta1_hat, "sd": self.sd_beta1},
            "sigma": {"mean": self.sigma_mean, "sd": self.sigma_sd,
                      "fn_location": self.sigma_fn.location,
                      "fn_spread2": self.sigma_fn.spread2},
            "rho": self.rho,
        }


@dataclass(frozen=True)
class LaplaceReport:
    """Shape diagnostics for the Normal-approximation assumption behind the
    guided elicitation."""

    skewness: dict[str, float]
    excess_kurtosis: dict[str, float]
    normal_flag: bool


# ---------------------------------------------------------------------------
# sufficient statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _SuffStats:
    n: int
    xbar: float
    ybar: float
    sxx: float
    b0: float
    b1: float
    rss: float
    # raw cross-moments for arbitrary-beta residual sums
    sx: float
    sy: float
    sxx_raw: float
    sxy_raw: float
    syy_raw: float

    def rss_at(self, b0: float, b1: float) -> float:
        return (self.syy_raw - 2.0 * (b0 * self.sy + b1 * self.sxy_raw)
                + self.n * b0 * b0 + 2.0 * b0 * b1 * self.sx + b1 * b1 * self.sxx_raw)

    def xtx_inv(self) -> np.ndarray:
        m00 = 1.0 / self.n + self.xbar ** 2 / self.sxx
        m01 = -self.xbar / self.sxx
        return np.array([[m00, m01], [m01, 1.0 / self.sxx]])


def _suff_stats(e: "Ensemble") -> _SuffStats:
    # math.fsum is exactly rounded, so every statistic is bit-identical
    # under any permutation of the rows.
    x = np.asarray(e.x, dtype=float)
    y = np.asarray(e.y, dtype=float)
    n = len(x)
    sx = math.fsum(x)
    sy = math.fsum(y)
    xbar = sx / n
    ybar = sy / n
    sxx = math.fsum((xi - xbar) ** 2 for xi in x)
    sxy = math.fsum((xi - xbar) * (yi - ybar) for xi, yi in zip(x, y))
    if sxx == 0.0:
        raise DomainError("degenerate predictor: all x values identical")
    b1 = sxy / sxx
    b0 = ybar - b1 * xbar
    rss = math.fsum((yi - b0 - b1 * xi) ** 2 for xi, yi in zip(x, y))
    return _SuffStats(
        n=n, xbar=xbar, ybar=ybar, sxx=sxx, b0=b0, b1=b1, rss=rss,
        sx=sx, sy=sy,
        sxx_raw=math.fsum(xi * xi for xi in x),
        sxy_raw=math.fsum(xi * yi for xi, yi in zip(x, y)),
        syy_raw=math.fsum(yi * yi for yi in y))


# ---------------------------------------------------------------------------
# reference path (exact conjugate sampling)
# ---------------------------------------------------------------------------

def fit_reference(e: "Ensemble", draws: int = 20000,
                  rng: RandomStream | None = None) -> RegressionPosterior:
    """Exact draws from the reference-prior posterior.

    sigma^2 follows a scaled-inverse-chi-squared law on n-2 degrees of
    freedom with the residual variance as scale; the coefficients given
    sigma are Normal around the least-squares estimate.  No MCMC, so no
    convergence risk, and the classical analysis is matched by construction.
    """
    if draws < 1:
        raise DomainError(f"draws must be >= 1, got {draws}")
    stats = _suff_stats(e)
    if stats.n < 4:
        raise ImproperPosteriorError(
            f"reference fit needs n >= 4 (got {stats.n}) for a proper posterior "
            "with finite variance")
    scale = stats.syy_raw - stats.sy ** 2 / stats.n
    if stats.rss <= 1e-12 * max(scale, 1.0):
        raise ImproperPosteriorError(
            "data lie exactly on a line: zero residual variance makes the "
            "posterior improper")
    gen = (rng or RandomStream(0)).generator()
    dof = stats.n - 2
    s2 = stats.rss / dof
    sigma2 = dof * s2 / gen.chisquare(dof, size=draws)
    sigma = np.sqrt(sigma2)
    chol = np.linalg.cholesky(stats.xtx_inv())
    z = gen.standard_normal(size=(draws, 2))
    beta = np.array([stats.b0, stats.b1]) + (z @ chol.T) * sigma[:, None]
    return RegressionPosterior(np.column_stack([beta, sigma]), chains=1,
                               prior=ModelPrior.reference())


# ---------------------------------------------------------------------------
# subjective path (Gibbs + slice)
# ---------------------------------------------------------------------------

def _chol2(m: np.ndarray) -> np.ndarray:
    a = math.sqrt(m[0, 0])
    b = m[1, 0] / a
    c = math.sqrt(max(m[1, 1] - b * b, 0.0))
    return np.array([[a, 0.0], [b, c]])


def _slice_update_log_sigma(t0: float, logpost, gen, width: float = 1.0,
                            max_step_out: int = 200) -> float:
    """One slice-sampling sweep (step out + shrink) on t = log sigma."""
    ly = logpost(t0) - gen.exponential()
    u = gen.uniform()
    lo = t0 - width * u
    hi = t0 + width * (1.0 - u)
    steps = max_step_out
    while steps > 0 and logpost(lo) > ly:
        lo -= width
        steps -= 1
    steps = max_step_out
    while steps > 0 and logpost(hi) > ly:
        hi += width
        steps -= 1
    while True:
        t1 = gen.uniform(lo, hi)
        if logpost(t1) > ly:
            return t1
        if t1 < t0:
            lo = t1
        else:
            hi = t1


def _run_chain(stats: _SuffStats, prior: ModelPrior, keep: int, burn: int,
               gen: np.random.Generator) -> np.ndarray:
    prior_prec = np.linalg.inv(prior.Sigma_beta)
    prior_prec_mu = prior_prec @ np.asarray(prior.mu)
    xtx = np.array([[stats.n, stats.sx], [stats.sx, stats.sxx_raw]])
    xty = np.array([stats.sy, stats.sxy_raw])
    inv_2ss = 0.5 / prior.sigma_s ** 2
    n = stats.n

    # overdispersed start around the least-squares fit
    s_ols = math.sqrt(stats.rss / max(n - 2, 1)) if stats.rss > 0 else prior.sigma_s
    log_sigma = math.log(s_ols) + gen.normal(0.0, 0.5)
    beta = np.array([stats.b0, stats.b1]) + gen.standard_normal(2) * (
        3.0 * s_ols * np.sqrt(np.diag(stats.xtx_inv())))

    out = np.empty((keep, 3))
    for it in range(burn + keep):
        sigma2 = math.exp(2.0 * log_sigma)
        prec = xtx / sigma2 + prior_prec
        cov = np.linalg.inv(prec)
        mean = cov @ (xty / sigma2 + prior_prec_mu)
        beta = mean + _chol2(cov) @ gen.standard_normal(2)

        rss_b = stats.rss_at(beta[0], beta[1])

        def logpost(t: float, _rss=rss_b) -> float:
            if abs(t) > 300.0:
                return -np.inf
            # -n log sigma - rss/(2 sigma^2) - sigma^2/(2 sigma_s^2) + log|Jacobian|
            return (-n * t - 0.5 * _rss * math.exp(-2.0 * t)
                    - inv_2ss * math.exp(2.0 * t) + t)

        log_sigma = _slice_update_log_sigma(log_sigma, logpost, gen)
        if it >= burn:
            out[it - burn] = (beta[0], beta[1], math.exp(log_sigma))
    return out


def split_rhat(chain_values: np.ndarray) -> float:
    """Potential scale reduction on split chains, shape (chains, iterations)."""
    c, t = chain_values.shape
    half = t // 2
    splits = np.concatenate([chain_values[:, :half], chain_values[:, half:2 * half]])
    m, nn = splits.shape
    w = splits.var(axis=1, ddof=1).mean()
    b = nn * splits.mean(axis=1).var(ddof=1)
    if w == 0.0:
        return 1.0
    var_plus = (nn - 1) / nn * w + b / nn
    return float(math.sqrt(var_plus / w))


def effective_sample_size(chain_values: np.ndarray) -> float:
    """Autocorrelation-based ESS with Geyer initial-positive truncation,
    summed over chains.  Input shape (chains, iterations)."""
    total = 0.0
    for row in chain_values:
        t = len(row)
        centered = row - row.mean()
        var0 = float(centered @ centered) / t
        if var0 == 0.0:
            continue
        size = 1
        while size < 2 * t:
            size <<= 1
        f = np.fft.rfft(centered, size)
        acov = np.fft.irfft(f * np.conj(f), size)[:t].real / t
        rho = acov / var0
        tau = 1.0
        k = 1
        while k + 1 < t:
            pair = rho[k] + rho[k + 1]
            if pair < 0.0:
                break
            tau += 2.0 * pair
            k += 2
        total += t / tau
    return total


def fit_subjective(e: "Ensemble", prior: ModelPrior, draws: int = 20000,
                   chains: int = 4, rng: RandomStream | None = None,
                   workers: int = 1) -> RegressionPosterior:
    """MCMC for Normal coefficient priors with a Half-Normal sd prior.

    Conjugate Gibbs updates on the coefficients alternate with slice updates
    on log sigma, so no step-size tuning is needed.  The first half of every
    chain is discarded.  Chains use independent substreams and are merged by
    chain index, so the result is identical for any worker count.
    """
    if prior.kind != "subjective":
        raise DomainError("fit_subjective requires a subjective prior")
    if draws < 1 or chains < 1:
        raise DomainError("draws and chains must be positive")
    stats = _suff_stats(e)
    keep = -(-draws // chains)  # ceil
    burn = keep
    base = rng or RandomStream(0)

    def job(chain_idx: int) -> np.ndarray:
        return _run_chain(stats, prior, keep, burn, base.generator(chain_idx))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chain_draws = list(pool.map(job, range(chains)))
    else:
        chain_draws = [job(c) for c in range(chains)]

    stacked = np.stack(chain_draws)  # (chains, keep, 3)
    diagnostics: dict = {"rhat": {}, "ess": {}, "warnings": []}
    names = ("beta0", "beta1", "sigma")
    for p, name in enumerate(names):
        vals = stacked[:, :, p]
        r = split_rhat(vals) if chains > 1 else 1.0
        ess = effective_sample_size(vals)
        diagnostics["rhat"][name] = r
        diagnostics["ess"][name] = ess
        if r > RHAT_FAIL or ess < ESS_FAIL:
            raise ConvergenceError(
                f"{name}: rhat={r:.3f}, ess={ess:.0f}; sampler failed to converge",
                rhat=diagnostics["rhat"], ess=diagnostics["ess"])
        if r >= RHAT_WARN or ess < ESS_WARN:
            diagnostics["warnings"].append(
                f"{name}: rhat={r:.4f}, ess={ess:.0f} below target "
                f"(rhat<{RHAT_WARN}, ess>{ESS_WARN:.0f})")
    if diagnostics["warnings"]:
        warnings.warn("; ".join(diagnostics["warnings"]), stacklevel=2)

    merged = stacked.reshape(chains * keep, 3)
    return RegressionPosterior(merged, chains=chains, prior=prior,
                               diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# summaries
# ---------------------------------------------------------------------------

def summarize(p: RegressionPosterior) -> PosteriorSummary:
    """Empirical moments plus the Folded-Normal fit to the sigma draws."""
    if p.n_draws < 1000:
        raise InsufficientDataError(
            f"summaries need at least 1000 draws, got {p.n_draws}")
    sd0 = float(p.beta0.std(ddof=1))
    sd1 = float(p.beta1.std(ddof=1))
    ssd = float(p.sigma.std(ddof=1))
    if sd0 == 0.0 or sd1 == 0.0 or ssd == 0.0:
        raise DomainError("degenerate posterior: zero standard deviation")
    rho = float(np.corrcoef(p.beta0, p.beta1)[0, 1])
    return PosteriorSummary(
        beta0_hat=float(p.beta0.mean()), beta1_hat=float(p.beta1.mean()),
        sd_beta0=sd0, sd_beta1=sd1, rho=rho,
        sigma_fn=fit_folded_normal(p.sigma),
        sigma_mean=float(p.sigma.mean()), sigma_sd=ssd)


def laplace_check(p: RegressionPosterior, skew_tol: float = 0.2,
                  kurtosis_tol: float = 0.5) -> LaplaceReport:
    """Check whether the coefficient marginals look Normal enough for the
    guided elicitation's Normal approximation."""
    if p.n_draws < 1000:
        raise InsufficientDataError(
            f"shape diagnostics need at least 1000 draws, got {p.n_draws}")
    skew: dict[str, float] = {}
    kurt: dict[str, float] = {}
    for name, vals in (("beta0", p.beta0), ("beta1", p.beta1), ("sigma", p.sigma)):
        skew[name] = float(sstats.skew(vals))
        kurt[name] = float(sstats.kurtosis(vals))  # Fisher: excess kurtosis
    flag = all(abs(skew[n]) < skew_tol and abs(kurt[n]) < kurtosis_tol
               for n in ("beta0", "beta1"))
    return LaplaceReport(skewness=skew, excess_kurtosis=kurt, normal_flag=flag)
