"""Ensemble tables, observation specs, analysis configuration and the
built-in catalog of published constraint observations.

Only the observations (``z``, ``sigma_z``) of the published constraints are
tabulated anywhere; the per-model (x, y) tables themselves must be sourced
externally.  ``engineered_ensemble`` builds synthetic ensembles with exact
least-squares statistics so the full pipeline can be exercised and tested
without shipping data we do not have.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .errors import DomainError, ParseError
from .reality import RealitySpec
from .regression import ModelPrior

__all__ = [
    "Ensemble",
    "ObservationSpec",
    "PredictorPrior",
    "SamplerSettings",
    "AnalysisConfig",
    "CatalogEntry",
    "load_ensemble_csv",
    "save_ensemble_csv",
    "load_config",
    "parse_config",
    "builtin_catalog",
    "catalog_lookup",
    "engineered_ensemble",
    "cox_like_ensemble",
    "canonical_json",
]

DEFAULT_LEVELS = (0.66, 0.90, 0.95)
DEFAULT_DRAWS = 20000
DEFAULT_CHAINS = 4


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, no whitespace, repr-exact floats."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


# ---------------------------------------------------------------------------
# core tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Ensemble:
    """Labelled (predictor, response) pairs from a model intercomparison."""

    labels: tuple[str, ...]
    x: np.ndarray
    y: np.ndarray
    predictor_name: str = "x"
    response_name: str = "y"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        n = len(self.labels)
        if n < 3:
            raise DomainError(f"ensemble needs at least 3 rows, got {n}")
        if x.shape != (n,) or y.shape != (n,):
            raise DomainError("labels, x and y must have equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DomainError("ensemble values must be finite")
        if len(set(self.labels)) != n:
            raise DomainError("model labels must be unique")
        if np.all(x == x[0]):
            raise DomainError("degenerate predictor: all x values identical")

    @property
    def n(self) -> int:
        return len(self.labels)

    def rows(self) -> Iterable[tuple[str, float, float]]:
        return zip(self.labels, self.x, self.y)


@dataclass(frozen=True)
class ObservationSpec:
    """Real-world measurement z of the predictor with error sd sigma_z."""

    z: float
    sigma_z: float

    def __post_init__(self):
        if not (math.isfinite(self.z) and math.isfinite(self.sigma_z)):
            raise DomainError("observation values must be finite")
        if self.sigma_z <= 0.0:
            raise DomainError(f"sigma_z must be > 0, got {self.sigma_z}")


@dataclass(frozen=True)
class PredictorPrior:
    """Prior for the true predictor value: improper flat, or Normal."""

    kind: str = "flat"
    mu_x: float | None = None
    sigma_x: float | None = None

    def __post_init__(self):
        if self.kind not in ("flat", "normal"):
            raise DomainError(f"predictor prior kind must be flat|normal, got {self.kind!r}")
        if self.kind == "normal":
            if self.mu_x is None or self.sigma_x is None:
                raise DomainError("normal predictor prior needs mu_x and sigma_x")
            if not self.sigma_x > 0.0:
                raise DomainError(f"sigma_x must be > 0, got {self.sigma_x}")

    @classmethod
    def flat(cls) -> "PredictorPrior":
        return cls("flat")

    @classmethod
    def normal(cls, mu_x: float, sigma_x: float) -> "PredictorPrior":
        return cls("normal", mu_x, sigma_x)


@dataclass(frozen=True)
class SamplerSettings:
    draws: int = DEFAULT_DRAWS
    chains: int = DEFAULT_CHAINS
    seed: int = 0

    def __post_init__(self):
        if self.draws < 1000:
            raise DomainError(f"draws must be >= 1000, got {self.draws}")
        if self.chains < 2:
            raise DomainError(f"chains must be >= 2, got {self.chains}")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")


@dataclass(frozen=True)
class AnalysisConfig:
    """Everything needed to run one constraint end to end."""

    observation: ObservationSpec
    model_prior: ModelPrior = field(default_factory=ModelPrior.reference)
    reality: RealitySpec = field(default_factory=RealitySpec.collapsed)
    predictor_prior: PredictorPrior = field(default_factory=PredictorPrior.flat)
    sampler: SamplerSettings = field(default_factory=SamplerSettings)
    levels: tuple[float, ...] = DEFAULT_LEVELS
    interval_method: str = "equal_tailed"

    def __post_init__(self):
        if len(self.levels) == 0:
            raise DomainError("at least one interval level is required")
        for lv in self.levels:
            if not 0.0 < lv < 1.0:
                raise DomainError(f"interval levels must lie in (0,1), got {lv}")
        if self.interval_method not in ("equal_tailed", "hdi"):
            raise DomainError(f"interval method must be equal_tailed|hdi, "
                              f"got {self.interval_method!r}")

    def to_json_dict(self) -> dict:
        return {
            "observation": {"z": self.observation.z, "sigma_z": self.observation.sigma_z},
            "model_prior": self.model_prior.to_json_dict(),
            "reality": self.reality.to_json_dict(),
            "predictor_prior": (
                {"kind": "flat"} if self.predictor_prior.kind == "flat"
                else {"kind": "normal", "mu_x": self.predictor_prior.mu_x,
                      "sigma_x": self.predictor_prior.sigma_x}),
            "sampler": {"draws": self.sampler.draws, "chains": self.sampler.chains,
                        "seed": self.sampler.seed},
            "levels": list(self.levels),
            "interval_method": self.interval_method,
        }

    def digest(self) -> str:
        """Stable fingerprint of the full configuration."""
        return hashlib.sha256(canonical_json(self.to_json_dict()).encode()).hexdigest()


# ---------------------------------------------------------------------------
# CSV ingest
# ---------------------------------------------------------------------------

def load_ensemble_csv(source: str | Path | IO[str] | bytes,
                      predictor_name: str = "x",
                      response_name: str = "y") -> Ensemble:
    """Parse an ensemble table with header ``model,x,y``.

    Errors name the offending row (1-based, excluding the header).
    """
    if isinstance(source, bytes):
        stream: IO[str] = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, (str, Path)) and "\n" not in str(source):
        stream = open(source, newline="", encoding="utf-8")
    elif isinstance(source, str):
        stream = io.StringIO(source)
    else:
        stream = source

    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file: expected header 'model,x,y'") from None
        cols = [h.strip().lower() for h in header]
        if cols[:3] != ["model", "x", "y"]:
            raise ParseError(f"expected header 'model,x,y', got {','.join(header)!r}")
        labels: list[str] = []
        xs: list[float] = []
        ys: list[float] = []
        for idx, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 3:
                raise ParseError(f"row {idx}: expected 3 columns, got {len(row)}")
            label = row[0].strip()
            if not label:
                raise ParseError(f"row {idx}: empty model label")
            if label in labels:
                raise ParseError(f"row {idx}: duplicate model label {label!r}")
            vals = []
            for col_name, cell in zip(("x", "y"), row[1:3]):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(
                        f"row {idx}: non-numeric {col_name} value {cell!r}") from None
                if not math.isfinite(v):
                    raise ParseError(f"row {idx}: non-finite {col_name} value {cell!r}")
                vals.append(v)
            labels.append(label)
            xs.append(vals[0])
            ys.append(vals[1])
    finally:
        if isinstance(source, (str, Path)) and "\n" not in str(source):
            stream.close()

    if len(labels) < 3:
        raise ParseError(f"ensemble needs at least 3 rows, got {len(labels)}")
    if len(set(xs)) == 1:
        raise ParseError("degenerate predictor: all x values identical")
    return Ensemble(tuple(labels), np.array(xs), np.array(ys),
                    predictor_name, response_name)


def save_ensemble_csv(e: Ensemble, target: str | Path | IO[str] | None = None) -> str:
    """Write ``model,x,y`` rows; returns the CSV text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "x", "y"])
    for label, x, y in e.rows():
        writer.writerow([label, repr(float(x)), repr(float(y))])
    text = buf.getvalue()
    if target is not None:
        if isinstance(target, (str, Path)):
            Path(target).write_text(text, encoding="utf-8")
        else:
            target.write(text)
    return text


# ---------------------------------------------------------------------------
# configuration ingest
# ---------------------------------------------------------------------------

def _cfg_err(pointer: str, message: str) -> ParseError:
    return ParseError(f"{pointer}: {message}")


def _require_number(obj: dict, key: str, pointer: str, positive: bool = False) -> float:
    if key not in obj:
        raise _cfg_err(f"{pointer}/{key}", "missing required field")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise _cfg_err(f"{pointer}/{key}", f"expected a finite number, got {v!r}")
    if positive and not v > 0:
        raise _cfg_err(f"{pointer}/{key}", f"must be > 0, got {v}")
    return float(v)


def parse_config(doc: dict) -> AnalysisConfig:
    """Validate a config document, filling defaults.

    Errors carry a JSON-pointer-style path to the offending field.
    """
    if not isinstance(doc, dict):
        raise _cfg_err("", f"expected a JSON object, got {type(doc).__name__}")
    known = {"observation", "predictor_prior", "model_prior", "reality",
             "sampler", "levels", "interval_method"}
    for key in doc:
        if key not in known:
            raise _cfg_err(f"/{key}", "unknown field")

    if "observation" not in doc:
        raise _cfg_err("/observation", "missing required field")
    obs_doc = doc["observation"]
    if not isinstance(obs_doc, dict):
        raise _cfg_err("/observation", "expected an object")
    try:
        observation = ObservationSpec(
            _require_number(obs_doc, "z", "/observation"),
            _require_number(obs_doc, "sigma_z", "/observation", positive=True))
    except DomainError as err:
        raise _cfg_err("/observation", str(err)) from None

    pp_doc = doc.get("predictor_prior", {"kind": "flat"})
    if not isinstance(pp_doc, dict):
        raise _cfg_err("/predictor_prior", "expected an object")
    kind = pp_doc.get("kind", "flat")
    if kind == "flat":
        predictor_prior = PredictorPrior.flat()
    elif kind == "normal":
        predictor_prior = PredictorPrior.normal(
            _require_number(pp_doc, "mu_x", "/predictor_prior"),
            _require_number(pp_doc, "sigma_x", "/predictor_prior", positive=True))
    else:
        raise _cfg_err("/predictor_prior/kind", f"must be 'flat' or 'normal', got {kind!r}")

    mp_doc = doc.get("model_prior", {"kind": "reference"})
    if not isinstance(mp_doc, dict):
        raise _cfg_err("/model_prior", "expected an object")
    mp_kind = mp_doc.get("kind", "reference")
    if mp_kind == "reference":
        model_prior = ModelPrior.reference()
    elif mp_kind == "subjective":
        if "mu" not in mp_doc or "Sigma_beta" not in mp_doc:
            raise _cfg_err("/model_prior", "subjective prior needs mu and Sigma_beta")
        try:
            model_prior = ModelPrior.subjective(
                mu=mp_doc["mu"],
                Sigma_beta=mp_doc["Sigma_beta"],
                sigma_s=_require_number(mp_doc, "sigma_s", "/model_prior", positive=True))
        except DomainError as err:
            raise _cfg_err("/model_prior", str(err)) from None
    else:
        raise _cfg_err("/model_prior/kind",
                       f"must be 'reference' or 'subjective', got {mp_kind!r}")

    reality_doc = doc.get("reality", {"kind": "collapsed"})
    if not isinstance(reality_doc, dict):
        raise _cfg_err("/reality", "expected an object")
    try:
        reality = RealitySpec.from_json(reality_doc)
    except DomainError as err:
        raise _cfg_err("/reality", str(err)) from None

    sampler_doc = doc.get("sampler", {})
    if not isinstance(sampler_doc, dict):
        raise _cfg_err("/sampler", "expected an object")
    try:
        sampler = SamplerSettings(
            draws=int(sampler_doc.get("draws", DEFAULT_DRAWS)),
            chains=int(sampler_doc.get("chains", DEFAULT_CHAINS)),
            seed=int(sampler_doc.get("seed", 0)))
    except (DomainError, TypeError, ValueError) as err:
        raise _cfg_err("/sampler", str(err)) from None

    levels_doc = doc.get("levels", list(DEFAULT_LEVELS))
    if not isinstance(levels_doc, list) or not levels_doc:
        raise _cfg_err("/levels", "expected a non-empty array of probabilities")
    levels = []
    for i, lv in enumerate(levels_doc):
        if isinstance(lv, bool) or not isinstance(lv, (int, float)) or not 0 < lv < 1:
            raise _cfg_err(f"/levels/{i}", f"must lie in (0,1), got {lv!r}")
        levels.append(float(lv))

    method = doc.get("interval_method", "equal_tailed")
    if method not in ("equal_tailed", "hdi"):
        raise _cfg_err("/interval_method",
                       f"must be 'equal_tailed' or 'hdi', got {method!r}")

    return AnalysisConfig(observation=observation, model_prior=model_prior,
                          reality=reality, predictor_prior=predictor_prior,
                          sampler=sampler, levels=tuple(levels),
                          interval_method=method)


def load_config(source: str | Path | IO[str]) -> AnalysisConfig:
    """Read and validate a JSON analysis configuration."""
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON: {err}") from None
    return parse_config(doc)


# ---------------------------------------------------------------------------
# built-in catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    observation: ObservationSpec
    predictor_prior: PredictorPrior
    notes: str


_CATALOG = (
    CatalogEntry(
        "cox",
        ObservationSpec(z=0.13, sigma_z=0.016),
        PredictorPrior.normal(mu_x=0.15, sigma_x=1.0),
        "Temperature-variability metric vs ECS (CMIP5); observation from the "
        "HadCRUT4 record."),
    CatalogEntry(
        "sherwood",
        ObservationSpec(z=0.825, sigma_z=0.072),
        PredictorPrior.flat(),
        "Sum of large- and small-scale lower-tropospheric mixing indices."),
    CatalogEntry(
        "brient_schneider",
        ObservationSpec(z=-0.96, sigma_z=0.22),
        PredictorPrior.flat(),
        "Temporal covariance of low-cloud reflection with temperature."),
    CatalogEntry(
        "tian",
        ObservationSpec(z=1.0, sigma_z=0.5),
        PredictorPrior.flat(),
        "Double intertropical convergence zone bias."),
    CatalogEntry(
        "zhai",
        ObservationSpec(z=-1.285, sigma_z=0.565),
        PredictorPrior.flat(),
        "Seasonal variation of marine boundary-layer cloud fraction with SST."),
)


def builtin_catalog() -> tuple[CatalogEntry, ...]:
    """The five built-in constraint observations."""
    return _CATALOG


def catalog_lookup(name: str) -> CatalogEntry:
    for entry in _CATALOG:
        if entry.name == name:
            return entry
    known = ", ".join(e.name for e in _CATALOG)
    raise LookupError(f"unknown dataset {name!r}; known: {known}")


# ---------------------------------------------------------------------------
# synthetic ensembles
# ---------------------------------------------------------------------------

def engineered_ensemble(beta0: float, beta1: float, resid_sd: float, n: int,
                        x_mean: float, x_sum_squares: float, seed: int = 0,
                        predictor_name: str = "x",
                        response_name: str = "y") -> Ensemble:
    """Synthetic ensemble whose least-squares statistics are exact.

    The generated table has sample predictor mean ``x_mean``, centered sum
    of squares ``x_sum_squares``, least-squares coefficients exactly
    ``(beta0, beta1)`` and residual variance exactly ``resid_sd**2`` (up to
    float rounding), regardless of seed.  The seed only shapes the
    particular point cloud.
    """
    if n < 4:
        raise DomainError("engineered ensemble needs n >= 4")
    if resid_sd <= 0 or x_sum_squares <= 0:
        raise DomainError("resid_sd and x_sum_squares must be > 0")
    gen = np.random.default_rng(seed)
    xr = gen.normal(size=n)
    xc = xr - xr.mean()
    while np.allclose(xc, 0):
        xr = gen.normal(size=n)
        xc = xr - xr.mean()
    x = x_mean + xc * math.sqrt(x_sum_squares / float(xc @ xc))
    design = np.column_stack([np.ones(n), x])
    e_raw = gen.normal(size=n)
    coef, *_ = np.linalg.lstsq(design, e_raw, rcond=None)
    e = e_raw - design @ coef
    e *= math.sqrt((n - 2) * resid_sd ** 2 / float(e @ e))
    y = beta0 + beta1 * x + e
    labels = tuple(f"m{i + 1:02d}" for i in range(n))
    return Ensemble(labels, x, y, predictor_name, response_name)


def _sigma_mean_factor(dof: int) -> float:
    # E[sigma]/s for sigma^2 ~ scaled-inv-chi2(dof, s^2)
    return math.sqrt(dof / 2.0) * math.exp(
        math.lgamma((dof - 1) / 2.0) - math.lgamma(dof / 2.0))


def cox_like_ensemble(seed: int = 20260809) -> Ensemble:
    """Stand-in for the temperature-variability/ECS ensemble.

    The real per-model table is not shipped; this builds a synthetic one
    whose reference-posterior summary reproduces the published values
    (intercept 1.23 +- 0.46, slope 12.06 +- 2.62, residual sd 0.59 +- 0.12,
    coefficient correlation -0.95).  Since the posterior depends on the data
    only through least-squares sufficient statistics, matching those is
    enough to reproduce every downstream interval.  n = 17 is the largest
    size at which those summary values are jointly reachable; the residual
    scale pins the posterior sigma mean, the predictor sum of squares pins
    the slope sd, and the predictor mean makes the coefficient correlation
    exactly -0.95 (the most sensitive downstream input), leaving the
    intercept sd at 0.467.
    """
    n = 17
    dof = n - 2
    s = 0.59 / _sigma_mean_factor(dof)
    e_sigma2 = dof * s * s / (dof - 2)
    x_sum_squares = e_sigma2 / 2.62 ** 2
    rho2 = 0.95 ** 2
    x_mean = math.sqrt(rho2 / (1.0 - rho2) * x_sum_squares / n)
    return engineered_ensemble(beta0=1.23, beta1=12.06, resid_sd=s, n=n,
                               x_mean=x_mean, x_sum_squares=x_sum_squares,
                               seed=seed, predictor_name="temperature_variability",
                               response_name="ecs")
