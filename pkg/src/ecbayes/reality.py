"""Reality-discrepancy layer: the prior linking model regression parameters
to their real-world counterparts.

The real-world coefficients are Normal around the model coefficients with
covariance ``Sigma_beta_star``; the real-world residual sd is Folded-Normal
around the model residual sd with spread ``xi``.  Setting both to zero
collapses back to the standard emergent-constraints analysis.  The guided
path converts a confidence level plus two judgements about the response
(current expectation and current sd) into those quantities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy import optimize

from .distributions import FoldedNormal, normal_quantile
from .errors import DomainError, ElicitationError

if TYPE_CHECKING:  # pragma: no cover
    from .regression import PosteriorSummary

__all__ = [
    "ConfidenceLevel",
    "GuidedJudgements",
    "RealitySpec",
    "RealityPrior",
    "guided_slope_variance",
    "guided_intercept_variance",
    "solve_xi_star",
    "build_reality_prior",
    "sign_flip_probability",
]

# IPCC-style labels; "coin flip" uses 49.9% tail mass rather than 50% to
# keep the elicitation formulas finite.
CONFIDENCE_ALPHAS = {
    "virtually_certain": 0.01,
    "very_likely": 0.10,
    "likely": 0.34,
    "coin_flip": 0.499,
}


@dataclass(frozen=True)
class ConfidenceLevel:
    """Confidence that the constraint holds in reality, as tail mass alpha."""

    label: str
    alpha: float

    def __post_init__(self):
        if self.label in CONFIDENCE_ALPHAS:
            expected = CONFIDENCE_ALPHAS[self.label]
            if self.alpha != expected:
                raise DomainError(
                    f"label {self.label!r} implies alpha={expected}, got {self.alpha}")
        elif self.label == "custom":
            if not 0.0 < self.alpha < 1.0:
                raise DomainError(f"custom alpha must lie in (0,1), got {self.alpha}")
        else:
            known = ", ".join(CONFIDENCE_ALPHAS)
            raise DomainError(f"unknown confidence label {self.label!r}; "
                              f"known: {known}, custom")

    @classmethod
    def from_label(cls, label: str) -> "ConfidenceLevel":
        if label not in CONFIDENCE_ALPHAS:
            known = ", ".join(CONFIDENCE_ALPHAS)
            raise DomainError(f"unknown confidence label {label!r}; known: {known}")
        return cls(label, CONFIDENCE_ALPHAS[label])

    @classmethod
    def custom(cls, alpha: float) -> "ConfidenceLevel":
        return cls("custom", alpha)


@dataclass(frozen=True)
class GuidedJudgements:
    """Inputs to the guided elicitation.

    ``mu_y_star``/``sigma_y_star`` are the current expectation and sd of the
    response itself (available from literature reviews), ``confidence`` the
    belief that the constraint survives in reality, and ``constraint_sign``
    the claimed sign of the relationship.
    """

    confidence: ConfidenceLevel
    mu_y_star: float
    sigma_y_star: float
    constraint_sign: str = "positive"

    def __post_init__(self):
        if not self.sigma_y_star > 0.0:
            raise DomainError(f"sigma_y_star must be > 0, got {self.sigma_y_star}")
        if self.constraint_sign not in ("positive", "negative"):
            raise DomainError(
                f"constraint sign must be positive|negative, got {self.constraint_sign!r}")


@dataclass(frozen=True)
class RealitySpec:
    """How to obtain the reality prior: collapsed, manual, or guided."""

    kind: str
    Sigma_beta_star: np.ndarray | None = None
    xi: float | None = None
    judgements: GuidedJudgements | None = None

    def __post_init__(self):
        if self.kind not in ("collapsed", "manual", "guided"):
            raise DomainError(f"reality kind must be collapsed|manual|guided, "
                              f"got {self.kind!r}")
        if self.kind == "manual":
            if self.Sigma_beta_star is None or self.xi is None:
                raise DomainError("manual reality spec needs Sigma_beta_star and xi")
            object.__setattr__(self, "Sigma_beta_star",
                               _validate_psd2(self.Sigma_beta_star))
            if not self.xi >= 0.0:
                raise DomainError(f"xi must be >= 0, got {self.xi}")
        if self.kind == "guided" and self.judgements is None:
            raise DomainError("guided reality spec needs judgements")

    @classmethod
    def collapsed(cls) -> "RealitySpec":
        return cls("collapsed")

    @classmethod
    def manual(cls, Sigma_beta_star, xi: float) -> "RealitySpec":
        return cls("manual", Sigma_beta_star=Sigma_beta_star, xi=float(xi))

    @classmethod
    def guided(cls, judgements: GuidedJudgements) -> "RealitySpec":
        return cls("guided", judgements=judgements)

    @classmethod
    def from_json(cls, doc: dict) -> "RealitySpec":
        kind = doc.get("kind", "collapsed")
        if kind == "collapsed":
            return cls.collapsed()
        if kind == "manual":
            if "Sigma_beta_star" not in doc or "xi" not in doc:
                raise DomainError("manual reality spec needs Sigma_beta_star and xi")
            return cls.manual(np.asarray(doc["Sigma_beta_star"], dtype=float),
                              float(doc["xi"]))
        if kind == "guided":
            if "confidence" not in doc:
                raise DomainError("guided reality spec needs a confidence level")
            conf = doc["confidence"]
            if isinstance(conf, str) and conf in CONFIDENCE_ALPHAS:
                level = ConfidenceLevel.from_label(conf)
            elif "alpha" in doc:
                level = ConfidenceLevel.custom(float(doc["alpha"]))
            elif isinstance(conf, (int, float)):
                level = ConfidenceLevel.custom(float(conf))
            else:
                raise DomainError(f"unknown confidence {conf!r} and no alpha given")
            for key in ("mu_y_star", "sigma_y_star"):
                if key not in doc:
                    raise DomainError(f"guided reality spec needs {key}")
            return cls.guided(GuidedJudgements(
                confidence=level,
                mu_y_star=float(doc["mu_y_star"]),
                sigma_y_star=float(doc["sigma_y_star"]),
                constraint_sign=doc.get("sign", "positive")))
        raise DomainError(f"reality kind must be collapsed|manual|guided, got {kind!r}")

    def to_json_dict(self) -> dict:
        if self.kind == "collapsed":
            return {"kind": "collapsed"}
        if self.kind == "manual":
            return {"kind": "manual",
                    "Sigma_beta_star": self.Sigma_beta_star.tolist(),
                    "xi": self.xi}
        j = self.judgements
        return {"kind": "guided", "confidence": j.confidence.label,
                "alpha": j.confidence.alpha, "mu_y_star": j.mu_y_star,
                "sigma_y_star": j.sigma_y_star, "sign": j.constraint_sign}


@dataclass(frozen=True)
class RealityPrior:
    """Assembled discrepancy quantities, ready for predictive sampling."""

    Sigma_beta_star: np.ndarray
    xi: float
    summary_used: "PosteriorSummary | None" = None

    def __post_init__(self):
        object.__setattr__(self, "Sigma_beta_star",
                           _validate_psd2(self.Sigma_beta_star))
        if not self.xi >= 0.0:
            raise DomainError(f"xi must be >= 0, got {self.xi}")


def _validate_psd2(cov) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2):
        raise DomainError(f"Sigma_beta_star must be 2x2, got shape {cov.shape}")
    if not np.all(np.isfinite(cov)):
        raise DomainError("Sigma_beta_star must be finite")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12 * (1.0 + np.abs(cov).max())):
        raise DomainError("Sigma_beta_star must be symmetric")
    tol = 1e-10 * max(1.0, float(np.trace(np.abs(cov))))
    if cov[0, 0] < -tol or cov[1, 1] < -tol or np.linalg.det(cov) < -tol:
        raise DomainError("Sigma_beta_star must be positive semi-definite")
    return 0.5 * (cov + cov.T)


# ---------------------------------------------------------------------------
# guided elicitation
# ---------------------------------------------------------------------------

def guided_slope_variance(beta1_hat: float, sd_beta1: float, alpha: float,
                          sign: str = "positive") -> float:
    """Extra slope variance implied by an alpha-level confidence.

    Chosen so that, unclamped, the marginal real-world slope
    N(beta1_hat, sd_beta1^2 + result) puts tail mass alpha/2 on the wrong
    side of zero.  A negative-sign constraint mirrors the argument and gives
    the same number, since only the slope magnitude enters.
    """
    if sign not in ("positive", "negative"):
        raise DomainError(f"sign must be positive|negative, got {sign!r}")
    if beta1_hat == 0.0:
        raise ElicitationError("slope estimate is 0: no constraint to hold or fail")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")
    if (sign == "positive") != (beta1_hat > 0):
        warnings.warn(f"stated {sign} constraint but fitted slope is {beta1_hat:g}; "
                      "using the slope magnitude", stacklevel=2)
    q = normal_quantile(alpha / 2.0)
    raw = beta1_hat ** 2 / q ** 2 - sd_beta1 ** 2
    if raw < 0.0:
        warnings.warn("requested confidence is weaker than the posterior already "
                      "implies; clamping slope discrepancy variance to 0",
                      stacklevel=2)
        return 0.0
    return raw


def guided_intercept_variance(beta0_hat: float, sd_beta0: float,
                              mu_y_star: float, alpha: float) -> float:
    """Extra intercept variance: as the constraint dissolves, the intercept
    should be able to reach the current expectation of the response with
    tail mass alpha/2."""
    if mu_y_star == beta0_hat:
        raise ElicitationError(
            "current response expectation equals the intercept estimate; "
            "the intercept condition is degenerate")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")
    q = normal_quantile(1.0 - alpha / 2.0)
    raw = (mu_y_star - beta0_hat) ** 2 / q ** 2 - sd_beta0 ** 2
    if raw < 0.0:
        warnings.warn("requested confidence is weaker than the posterior already "
                      "implies; clamping intercept discrepancy variance to 0",
                      stacklevel=2)
        return 0.0
    return raw


def solve_xi_star(sigma_fn: FoldedNormal, sigma_y_star: float, alpha: float) -> float:
    """Smallest xi* >= 0 with P(sigma* > sigma_y_star) >= alpha/2 for
    sigma* ~ FoldedNormal(s_hat, xi_hat + xi*).

    Links the confidence to whether the constraint actually reduces response
    uncertainty.  Solved by bracketing plus root refinement on the survival
    function, which is monotone in xi* wherever the condition is not already
    satisfied at xi* = 0.
    """
    if not sigma_y_star > 0.0:
        raise DomainError(f"sigma_y_star must be > 0, got {sigma_y_star}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")
    target = alpha / 2.0
    s_hat, xi_hat = sigma_fn.location, sigma_fn.spread2

    if xi_hat == 0.0:
        base_survival = 1.0 if abs(s_hat) > sigma_y_star else 0.0
    else:
        base_survival = float(sigma_fn.survival(sigma_y_star))
    if base_survival >= target:
        return 0.0

    def gap(xi_star: float) -> float:
        if xi_hat + xi_star == 0.0:
            return base_survival - target
        return float(FoldedNormal(s_hat, xi_hat + xi_star).survival(sigma_y_star)) - target

    hi = max(1.0, sigma_y_star ** 2, xi_hat)
    for _ in range(200):
        if gap(hi) >= 0.0:
            break
        hi *= 2.0
    else:
        raise DomainError(f"survival probability {target} unreachable for "
                          f"sigma_y_star={sigma_y_star}")
    return float(optimize.brentq(gap, 0.0, hi, xtol=1e-13, rtol=8.9e-16,
                                 maxiter=300))


def sign_flip_probability(beta1_hat: float, total_sd: float) -> float:
    """P(real-world slope crosses 0) for a Normal slope with the given
    magnitude and total (posterior + discrepancy) sd."""
    if not total_sd > 0.0:
        raise DomainError(f"total sd must be > 0, got {total_sd}")
    from scipy.stats import norm
    return float(norm.cdf(-abs(beta1_hat) / total_sd))


def build_reality_prior(summary: "PosteriorSummary", spec: RealitySpec) -> RealityPrior:
    """Assemble (Sigma_beta_star, xi) from a posterior summary and a spec.

    Guided mode reuses the posterior correlation of the coefficients for the
    discrepancy covariance, reflecting line-fitting geometry rather than any
    separate judgement.
    """
    if spec.kind == "collapsed":
        return RealityPrior(np.zeros((2, 2)), 0.0, summary)
    if spec.kind == "manual":
        return RealityPrior(spec.Sigma_beta_star, spec.xi, summary)

    j = spec.judgements
    alpha = j.confidence.alpha
    v1 = guided_slope_variance(summary.beta1_hat, summary.sd_beta1, alpha,
                               j.constraint_sign)
    v0 = guided_intercept_variance(summary.beta0_hat, summary.sd_beta0,
                                   j.mu_y_star, alpha)
    off = summary.rho * math.sqrt(v0 * v1)
    xi = solve_xi_star(summary.sigma_fn, j.sigma_y_star, alpha)
    return RealityPrior(np.array([[v0, off], [off, v1]]), xi, summary)
