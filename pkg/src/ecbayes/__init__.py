"""Generalized Bayesian emergent-constraints toolkit.

Fit an ensemble regression, inflate it with reality-discrepancy uncertainty
through confidence-linked guided priors, and produce posterior-predictive
distributions and intervals for a real-world quantity of interest.
"""

from .dataio import (AnalysisConfig, CatalogEntry, Ensemble, ObservationSpec,
                     PredictorPrior, SamplerSettings, builtin_catalog,
                     catalog_lookup, cox_like_ensemble, engineered_ensemble,
                     load_config, load_ensemble_csv, parse_config,
                     save_ensemble_csv)
from .distributions import (FoldedNormal, Gaussian1D, Gaussian2D, RandomStream,
                            fit_folded_normal, normal_quantile)
from .errors import (ConvergenceError, DomainError, EcbayesError,
                     ElicitationError, ImproperPosteriorError,
                     InsufficientDataError, ParseError)
from .mining import MiningConfig, MiningResult, correlation_mining_demo
from .predictive import (PredictiveResult, credible_interval, kde_density,
                         posterior_x_star, run_constraint, sample_predictive)
from .reality import (ConfidenceLevel, GuidedJudgements, RealityPrior,
                      RealitySpec, build_reality_prior,
                      guided_intercept_variance, guided_slope_variance,
                      sign_flip_probability, solve_xi_star)
from .regression import (LaplaceReport, ModelPrior, PosteriorSummary,
                         RegressionPosterior, fit_reference, fit_subjective,
                         laplace_check, summarize)

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig", "CatalogEntry", "Ensemble", "ObservationSpec",
    "PredictorPrior", "SamplerSettings", "builtin_catalog", "catalog_lookup",
    "cox_like_ensemble", "engineered_ensemble", "load_config",
    "load_ensemble_csv", "parse_config", "save_ensemble_csv",
    "FoldedNormal", "Gaussian1D", "Gaussian2D", "RandomStream",
    "fit_folded_normal", "normal_quantile",
    "ConvergenceError", "DomainError", "EcbayesError", "ElicitationError",
    "ImproperPosteriorError", "InsufficientDataError", "ParseError",
    "MiningConfig", "MiningResult", "correlation_mining_demo",
    "PredictiveResult", "credible_interval", "kde_density", "posterior_x_star",
    "run_constraint", "sample_predictive",
    "ConfidenceLevel", "GuidedJudgements", "RealityPrior", "RealitySpec",
    "build_reality_prior", "guided_intercept_variance", "guided_slope_variance",
    "sign_flip_probability", "solve_xi_star",
    "LaplaceReport", "ModelPrior", "PosteriorSummary", "RegressionPosterior",
    "fit_reference", "fit_subjective", "laplace_check", "summarize",
]
