"""Posterior-predictive pipeline for the real-world response.

One response draw per retained posterior draw: real-world coefficients
around the model coefficients, real-world residual sd folded around the
model residual sd, true predictor from its own posterior, then the response
from the real-world regression line.  Draws are generated in fixed blocks
with per-block substreams, so results are identical for any worker count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataio import AnalysisConfig, Ensemble, ObservationSpec, PredictorPrior
from .distributions import Gaussian1D, Gaussian2D, RandomStream
from .errors import DomainError, EcbayesError, InsufficientDataError
from .reality import RealityPrior, build_reality_prior
from .regression import (RegressionPosterior, fit_reference, fit_subjective,
                         summarize)

__all__ = [
    "PredictiveResult",
    "posterior_x_star",
    "sample_predictive",
    "credible_interval",
    "kde_density",
    "run_constraint",
]

N_SAMPLE_BLOCKS = 16
KDE_GRID_POINTS = 512


@dataclass(frozen=True)
class PredictiveResult:
    """Posterior-predictive draws with intervals and a density curve."""

    y_star_draws: np.ndarray
    intervals: dict[float, tuple[float, float]]
    median: float
    density: np.ndarray  # (grid points, 2): x, density
    x_star_posterior: Gaussian1D
    provenance: str
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "median": self.median,
            "intervals": {_level_key(lv): [lo, hi]
                          for lv, (lo, hi) in self.intervals.items()},
            "density": [[float(a), float(b)] for a, b in self.density],
            "x_star": {"mean": self.x_star_posterior.mean,
                       "sd": self.x_star_posterior.sd},
            "seed": self.seed,
            "draws": int(len(self.y_star_draws)),
            "provenance": self.provenance,
        }


def _level_key(level: float) -> str:
    return repr(float(level))


def posterior_x_star(obs: ObservationSpec, prior: PredictorPrior) -> Gaussian1D:
    """Posterior of the true predictor given the measurement.

    A flat prior returns the measurement distribution itself; a Normal prior
    combines by precision weighting.
    """
    if prior.kind == "flat":
        return Gaussian1D(obs.z, obs.sigma_z)
    prec_prior = 1.0 / prior.sigma_x ** 2
    prec_obs = 1.0 / obs.sigma_z ** 2
    prec = prec_prior + prec_obs
    mean = (prior.mu_x * prec_prior + obs.z * prec_obs) / prec
    return Gaussian1D(mean, math.sqrt(1.0 / prec))


def _sample_block(beta: np.ndarray, sigma: np.ndarray, transform: np.ndarray,
                  xi: float, xstar: Gaussian1D, gen: np.random.Generator) -> np.ndarray:
    k = len(sigma)
    # Fixed draw layout (coefficients, sd, predictor, response) regardless of
    # degeneracy, so collapsed runs consume the stream identically.
    beta_star = beta + gen.standard_normal((k, 2)) @ transform.T
    sigma_star = np.abs(sigma + math.sqrt(xi) * gen.standard_normal(k))
    x_star = xstar.mean + xstar.sd * gen.standard_normal(k)
    return (beta_star[:, 0] + beta_star[:, 1] * x_star
            + sigma_star * gen.standard_normal(k))


def sample_predictive(post: RegressionPosterior, rp: RealityPrior,
                      xstar: Gaussian1D, rng: RandomStream | None = None,
                      workers: int = 1) -> np.ndarray:
    """One real-world response draw per posterior draw.

    Factorised exactly as: coefficients* | coefficients, sd* | sd,
    predictor* | observation, response | all of them.
    """
    transform = Gaussian2D((0.0, 0.0), rp.Sigma_beta_star).transform()
    base = rng or RandomStream(0)
    n = post.n_draws
    bounds = np.linspace(0, n, N_SAMPLE_BLOCKS + 1).astype(int)

    def job(b: int) -> np.ndarray:
        lo, hi = bounds[b], bounds[b + 1]
        if lo == hi:
            return np.empty(0)
        return _sample_block(post.draws[lo:hi, :2], post.draws[lo:hi, 2],
                             transform, rp.xi, xstar, base.generator(b))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(job, range(N_SAMPLE_BLOCKS)))
    else:
        blocks = [job(b) for b in range(N_SAMPLE_BLOCKS)]
    return np.concatenate(blocks)


def credible_interval(draws: np.ndarray, level: float,
                      method: str = "equal_tailed") -> tuple[float, float]:
    """Empirical interval at the given probability level.

    The default is equal-tailed (matching symmetric published intervals);
    ``method="hdi"`` gives the shortest interval containing the mass instead.
    """
    draws = np.asarray(draws, dtype=float)
    if draws.size < 1000:
        raise InsufficientDataError(
            f"intervals need at least 1000 draws, got {draws.size}")
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0,1), got {level}")
    if method not in ("equal_tailed", "hdi"):
        raise DomainError(f"method must be equal_tailed|hdi, got {method!r}")
    tail = (1.0 - level) / 2.0
    if tail < 1.0 / (draws.size + 1):
        warnings.warn(
            f"level {level} is finer than the draw resolution; returning the "
            "extreme order statistics", stacklevel=2)
        return float(draws.min()), float(draws.max())
    if method == "hdi":
        ordered = np.sort(draws)
        window = int(math.ceil(level * draws.size))
        widths = ordered[window - 1:] - ordered[:draws.size - window + 1]
        start = int(np.argmin(widths))
        return float(ordered[start]), float(ordered[start + window - 1])
    lo, hi = np.quantile(draws, [tail, 1.0 - tail])
    return float(lo), float(hi)


def kde_density(draws: np.ndarray, grid_points: int = KDE_GRID_POINTS) -> np.ndarray:
    """Gaussian-kernel density on a regular grid.

    Bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5); the grid spans the draws
    plus three bandwidths each side, so the curve integrates to one up to
    truncation error.
    """
    draws = np.asarray(draws, dtype=float)
    n = draws.size
    if n < 1000:
        raise InsufficientDataError(f"density needs at least 1000 draws, got {n}")
    sd = float(draws.std(ddof=1))
    if sd == 0.0:
        raise DomainError("draws have zero variance; no density to estimate")
    q75, q25 = np.percentile(draws, [75, 25])
    iqr_scale = (q75 - q25) / 1.34
    spread = min(sd, iqr_scale) if iqr_scale > 0 else sd
    bw = 0.9 * spread * n ** (-0.2)
    grid = np.linspace(draws.min() - 3.0 * bw, draws.max() + 3.0 * bw, grid_points)
    # evaluate in chunks to bound the (grid x draws) intermediate
    dens = np.empty(grid_points)
    inv = 1.0 / bw
    chunk = max(1, int(2e6 / n))
    for start in range(0, grid_points, chunk):
        g = grid[start:start + chunk, None]
        z = (g - draws[None, :]) * inv
        dens[start:start + chunk] = np.exp(-0.5 * z * z).mean(axis=1)
    dens *= inv / math.sqrt(2.0 * math.pi)
    return np.column_stack([grid, dens])


def _stage(label: str):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, EcbayesError):
                exc.args = (f"{label}: {exc.args[0]}",) + exc.args[1:]
            return False

    return _Ctx()


def run_constraint(cfg: AnalysisConfig, e: Ensemble) -> PredictiveResult:
    """Full pipeline: fit, summarize, reality prior, predictor posterior,
    predictive sampling, intervals and density.  Deterministic given the
    sampler seed."""
    fit_rng = RandomStream(cfg.sampler.seed, stream=0)
    predict_rng = RandomStream(cfg.sampler.seed, stream=1)

    with _stage("regression"):
        if cfg.model_prior.kind == "reference":
            post = fit_reference(e, draws=cfg.sampler.draws, rng=fit_rng)
        else:
            post = fit_subjective(e, cfg.model_prior, draws=cfg.sampler.draws,
                                  chains=cfg.sampler.chains, rng=fit_rng)
        summary = summarize(post)
    with _stage("reality"):
        rp = build_reality_prior(summary, cfg.reality)
    with _stage("observation"):
        xstar = posterior_x_star(cfg.observation, cfg.predictor_prior)
    with _stage("predictive"):
        y_star = sample_predictive(post, rp, xstar, rng=predict_rng)
        intervals = {lv: credible_interval(y_star, lv, cfg.interval_method)
                     for lv in cfg.levels}
        density = kde_density(y_star)
    return PredictiveResult(
        y_star_draws=y_star,
        intervals=intervals,
        median=float(np.median(y_star)),
        density=density,
        x_star_posterior=xstar,
        provenance=cfg.digest(),
        seed=cfg.sampler.seed)
