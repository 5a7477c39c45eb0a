"""The confidence ladder: from an IPCC-style confidence label to a full
reality prior, and the prediction intervals that follow.

Three judgements drive everything: the confidence that the constraint holds
in reality (as tail mass alpha), the current expectation of the response,
and the current sd of the response.  Writes demos/output/confidence_ladder.png.
"""
import math
from pathlib import Path

from ecbayes import (AnalysisConfig, ConfidenceLevel, GuidedJudgements,
                     ObservationSpec, PredictorPrior, RandomStream,
                     RealitySpec, SamplerSettings, build_reality_prior,
                     cox_like_ensemble, fit_reference, run_constraint,
                     sign_flip_probability, summarize)

MU_Y, SIGMA_Y = 3.0, 1.5  # literature-review judgement for the response

ensemble = cox_like_ensemble()
summary = summarize(fit_reference(ensemble, draws=100000, rng=RandomStream(3)))

print("elicited discrepancy quantities per confidence level")
print(f"{'confidence':>18s}{'alpha':>8s}{'sd(b0*)':>9s}{'sd(b1*)':>9s}"
      f"{'xi*':>8s}{'P(sign flip)':>14s}")
for label in ("virtually_certain", "very_likely", "likely", "coin_flip"):
    level = ConfidenceLevel.from_label(label)
    spec = RealitySpec.guided(GuidedJudgements(level, MU_Y, SIGMA_Y))
    rp = build_reality_prior(summary, spec)
    total_sd = math.sqrt(summary.sd_beta1 ** 2 + rp.Sigma_beta_star[1, 1])
    flip = sign_flip_probability(summary.beta1_hat, total_sd)
    print(f"{label:>18s}{level.alpha:8.3f}"
          f"{math.sqrt(rp.Sigma_beta_star[0, 0]):9.3f}"
          f"{math.sqrt(rp.Sigma_beta_star[1, 1]):9.3f}"
          f"{rp.xi:8.3f}{flip:14.2e}")

print("\nprediction intervals (sampled end to end)")
obs = ObservationSpec(0.13, 0.016)
results = {}
for label in ("virtually_certain", "very_likely", "likely", "coin_flip"):
    spec = RealitySpec.guided(GuidedJudgements(
        ConfidenceLevel.from_label(label), MU_Y, SIGMA_Y))
    cfg = AnalysisConfig(observation=obs, reality=spec,
                         predictor_prior=PredictorPrior.normal(0.15, 1.0),
                         sampler=SamplerSettings(draws=100000, chains=4, seed=3))
    results[label] = run_constraint(cfg, ensemble)

print(f"{'confidence':>18s}{'66%':>16s}{'90%':>16s}{'95%':>16s}")
for label, res in results.items():
    cells = "".join(f"  [{res.intervals[lv][0]:5.2f},{res.intervals[lv][1]:5.2f}]"
                    for lv in (0.66, 0.90, 0.95))
    print(f"{label:>18s}{cells}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    pass
else:
    out = Path(__file__).parent / "output"
    out.mkdir(exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, res in results.items():
        ax.plot(res.density[:, 0], res.density[:, 1], label=label)
    ax.set_xlabel("response")
    ax.set_ylabel("posterior predictive density")
    ax.set_xlim(-1, 7)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "confidence_ladder.png", dpi=150)
    print(f"\nfigure written to {out / 'confidence_ladder.png'}")
