"""HTTP facade over the fitting and prediction pipeline.

Fits are cached in in-memory sessions so a UI can iterate on reality
judgements, observations and confidence levels without refitting the
regression.  All numeric payloads are canonical JSON (sorted keys, repr
floats), so identical requests with identical seeds return byte-identical
bodies.
"""

from __future__ import annotations

import hashlib
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import dataio, predictive, reality, regression
from .dataio import canonical_json
from .distributions import RandomStream
from .errors import EcbayesError

MAX_BODY_BYTES = 5 * 1024 * 1024
MAX_DRAWS = 200_000
DEFAULT_TTL_SECONDS = 3600.0


@dataclass
class Session:
    id: str
    ensemble: dataio.Ensemble
    posterior: regression.RegressionPosterior
    summary: regression.PosteriorSummary
    fit_digest: str = ""
    created_at: float = field(default_factory=time.time)
    touched_at: float = field(default_factory=time.time)


class SessionStore:
    def __init__(self, ttl_seconds: float = DEFAULT_TTL_SECONDS):
        self.ttl = ttl_seconds
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def put(self, session: Session) -> None:
        with self._lock:
            self._prune()
            self._sessions[session.id] = session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._prune()
            session = self._sessions.get(session_id)
            if session is None:
                raise KeyError(session_id)
            session.touched_at = time.time()
            return session

    def _prune(self) -> None:
        now = time.time()
        stale = [k for k, s in self._sessions.items()
                 if now - s.touched_at > self.ttl]
        for k in stale:
            del self._sessions[k]


# ---------------------------------------------------------------------------
# request bodies
# ---------------------------------------------------------------------------

class PriorBody(BaseModel):
    kind: Literal["reference", "subjective"] = "reference"
    mu: tuple[float, float] | None = None
    Sigma_beta: list[list[float]] | None = None
    sigma_s: float | None = None


class SamplerBody(BaseModel):
    draws: int = Field(default=20000, ge=1000, le=MAX_DRAWS)
    chains: int = Field(default=4, ge=2, le=16)
    seed: int = Field(default=0, ge=0)


class FitBody(BaseModel):
    csv: str | None = None
    builtin: str | None = None
    synthetic: bool = False
    prior: PriorBody = PriorBody()
    sampler: SamplerBody = SamplerBody()


class ObservationBody(BaseModel):
    z: float
    sigma_z: float = Field(gt=0)


class PredictorPriorBody(BaseModel):
    kind: Literal["flat", "normal"] = "flat"
    mu_x: float | None = None
    sigma_x: float | None = None


class RealityBody(BaseModel):
    kind: Literal["collapsed", "manual", "guided"] = "collapsed"
    Sigma_beta_star: list[list[float]] | None = None
    xi: float | None = None
    confidence: str | None = None
    alpha: float | None = None
    mu_y_star: float | None = None
    sigma_y_star: float | None = None
    sign: Literal["positive", "negative"] = "positive"


class PredictBody(BaseModel):
    session: str
    reality: RealityBody = RealityBody()
    observation: ObservationBody
    predictor_prior: PredictorPriorBody = PredictorPriorBody()
    levels: list[float] = Field(default=[0.66, 0.90, 0.95], min_length=1)
    seed: int = Field(default=0, ge=0)
    # deterministic strided subsample of the response draws for display
    include_samples: int = Field(default=0, ge=0, le=2000)


class ElicitBody(BaseModel):
    session: str
    confidence: str | None = None
    alpha: float | None = None
    mu_y_star: float
    sigma_y_star: float = Field(gt=0)
    sign: Literal["positive", "negative"] = "positive"


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _http_error(status: int, detail) -> HTTPException:
    return HTTPException(status_code=status, detail=detail)


def _canonical(doc: dict) -> Response:
    return Response(content=canonical_json(doc), media_type="application/json")


def _reality_spec(body: RealityBody) -> reality.RealitySpec:
    doc = {"kind": body.kind}
    if body.kind == "manual":
        doc["Sigma_beta_star"] = body.Sigma_beta_star
        doc["xi"] = body.xi
    elif body.kind == "guided":
        doc["confidence"] = body.confidence if body.confidence else "custom"
        if body.alpha is not None:
            doc["alpha"] = body.alpha
        elif body.confidence is None:
            raise _http_error(422, "guided reality needs confidence or alpha")
        doc.update(mu_y_star=body.mu_y_star, sigma_y_star=body.sigma_y_star,
                   sign=body.sign)
        if body.mu_y_star is None or body.sigma_y_star is None:
            raise _http_error(422, "guided reality needs mu_y_star and sigma_y_star")
    return reality.RealitySpec.from_json(doc)


def _confidence(confidence: str | None, alpha: float | None) -> reality.ConfidenceLevel:
    if alpha is not None:
        return reality.ConfidenceLevel.custom(alpha)
    if confidence is None:
        raise _http_error(422, "confidence label or alpha is required")
    return reality.ConfidenceLevel.from_label(confidence)


# ---------------------------------------------------------------------------
# app factory
# ---------------------------------------------------------------------------

def create_app(ttl_seconds: float | None = None,
               static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="ecbayes", version="0.1.0")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    ttl = ttl_seconds if ttl_seconds is not None else float(
        os.environ.get("EC_SESSION_TTL", DEFAULT_TTL_SECONDS))
    store = SessionStore(ttl)
    app.state.sessions = store

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/api/datasets")
    def datasets():
        doc = [{"name": c.name, "z": c.observation.z,
                "sigma_z": c.observation.sigma_z,
                "predictor_prior": (
                    {"kind": "flat"} if c.predictor_prior.kind == "flat"
                    else {"kind": "normal", "mu_x": c.predictor_prior.mu_x,
                          "sigma_x": c.predictor_prior.sigma_x}),
                "notes": c.notes} for c in dataio.builtin_catalog()]
        return _canonical({"datasets": doc})

    @app.post("/api/fit")
    def fit(body: FitBody):
        if body.csv is not None and len(body.csv.encode()) > MAX_BODY_BYTES:
            raise _http_error(413, "csv payload exceeds 5 MB")
        try:
            if body.csv is not None:
                ensemble = dataio.load_ensemble_csv(body.csv)
            elif body.builtin is not None:
                entry = dataio.catalog_lookup(body.builtin)
                if body.synthetic and entry.name == "cox":
                    ensemble = dataio.cox_like_ensemble()
                else:
                    path = Path(os.environ.get("EC_DATA_DIR", "data")) / f"{entry.name}.csv"
                    if not path.exists():
                        raise _http_error(
                            422, f"external data required: {path} not found")
                    ensemble = dataio.load_ensemble_csv(path)
            else:
                raise _http_error(422, "provide csv text or a builtin name")
        except (EcbayesError, LookupError) as err:
            raise _http_error(422, str(err)) from None

        try:
            rng = RandomStream(body.sampler.seed, stream=0)
            if body.prior.kind == "reference":
                post = regression.fit_reference(ensemble, draws=body.sampler.draws,
                                                rng=rng)
            else:
                if body.prior.mu is None or body.prior.Sigma_beta is None \
                        or body.prior.sigma_s is None:
                    raise _http_error(
                        422, "subjective prior needs mu, Sigma_beta and sigma_s")
                prior = regression.ModelPrior.subjective(
                    body.prior.mu, np.asarray(body.prior.Sigma_beta),
                    body.prior.sigma_s)
                post = regression.fit_subjective(
                    ensemble, prior, draws=body.sampler.draws,
                    chains=body.sampler.chains, rng=rng)
            summary = regression.summarize(post)
            shape = regression.laplace_check(post)
        except EcbayesError as err:
            raise _http_error(422, str(err)) from None

        session = Session(id=secrets.token_urlsafe(16), ensemble=ensemble,
                          posterior=post, summary=summary,
                          fit_digest=hashlib.sha256(
                              canonical_json(body.model_dump()).encode()
                          ).hexdigest())
        store.put(session)
        return _canonical({
            "session": session.id,
            "summary": summary.to_json_dict(),
            "laplace": {"skewness": shape.skewness,
                        "excess_kurtosis": shape.excess_kurtosis,
                        "normal_flag": shape.normal_flag},
            "diagnostics": post.diagnostics,
            "draws": post.n_draws,
            "ensemble": {"labels": list(ensemble.labels),
                         "x": [float(v) for v in ensemble.x],
                         "y": [float(v) for v in ensemble.y],
                         "predictor_name": ensemble.predictor_name,
                         "response_name": ensemble.response_name},
        })

    @app.post("/api/predict")
    def predict(body: PredictBody):
        try:
            session = store.get(body.session)
        except KeyError:
            raise _http_error(404, f"unknown session {body.session!r}") from None
        for lv in body.levels:
            if not 0.0 < lv < 1.0:
                raise _http_error(422, f"levels must lie in (0,1), got {lv}")
        try:
            obs = dataio.ObservationSpec(body.observation.z, body.observation.sigma_z)
            if body.predictor_prior.kind == "normal":
                if body.predictor_prior.mu_x is None or body.predictor_prior.sigma_x is None:
                    raise _http_error(422, "normal predictor prior needs mu_x, sigma_x")
                pp = dataio.PredictorPrior.normal(body.predictor_prior.mu_x,
                                                  body.predictor_prior.sigma_x)
            else:
                pp = dataio.PredictorPrior.flat()
            spec = _reality_spec(body.reality)
            rp = reality.build_reality_prior(session.summary, spec)
            xstar = predictive.posterior_x_star(obs, pp)
            y_star = predictive.sample_predictive(
                session.posterior, rp, xstar, rng=RandomStream(body.seed, stream=1))
            intervals = {lv: predictive.credible_interval(y_star, lv)
                         for lv in body.levels}
            density = predictive.kde_density(y_star)
        except EcbayesError as err:
            raise _http_error(422, str(err)) from None
        # provenance is a function of the fit inputs and this request, never
        # of the session token, so identical logical requests give identical
        # bytes regardless of which session served them
        provenance = hashlib.sha256(
            canonical_json({"fit": session.fit_digest,
                            "request": body.model_dump(exclude={"session"})}
                           ).encode()).hexdigest()
        result = predictive.PredictiveResult(
            y_star_draws=y_star, intervals=intervals,
            median=float(np.median(y_star)), density=density,
            x_star_posterior=xstar, provenance=provenance, seed=body.seed)
        doc = result.to_json_dict()
        if body.include_samples:
            stride = max(1, len(y_star) // body.include_samples)
            doc["y_star_sample"] = [float(v) for v in
                                    y_star[::stride][:body.include_samples]]
        return _canonical(doc)

    @app.post("/api/elicit")
    def elicit(body: ElicitBody):
        try:
            session = store.get(body.session)
        except KeyError:
            raise _http_error(404, f"unknown session {body.session!r}") from None
        try:
            level = _confidence(body.confidence, body.alpha)
            spec = reality.RealitySpec.guided(reality.GuidedJudgements(
                level, mu_y_star=body.mu_y_star, sigma_y_star=body.sigma_y_star,
                constraint_sign=body.sign))
            rp = reality.build_reality_prior(session.summary, spec)
        except EcbayesError as err:
            raise _http_error(422, str(err)) from None
        s = session.summary
        total_sd = (s.sd_beta1 ** 2 + rp.Sigma_beta_star[1, 1]) ** 0.5
        return _canonical({
            "Sigma_beta_star": [[float(v) for v in row]
                                for row in rp.Sigma_beta_star],
            "xi": float(rp.xi),
            "alpha": level.alpha,
            "sd_beta0_star": float(rp.Sigma_beta_star[0, 0] ** 0.5),
            "sd_beta1_star": float(rp.Sigma_beta_star[1, 1] ** 0.5),
            "sign_flip_probability": reality.sign_flip_probability(
                s.beta1_hat, total_sd),
        })

    ui_dir = static_dir or os.environ.get("EC_UI_DIR")
    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app


app = create_app()
