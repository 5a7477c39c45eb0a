"""Reference-prior regression on a synthetic ensemble engineered to match a
published summary table.

The reference path samples the posterior exactly through conjugacy, so the
Bayesian answer coincides with the classical one and there is nothing to
tune or monitor.
"""
from ecbayes import (RandomStream, cox_like_ensemble, fit_reference,
                     laplace_check, summarize)

ensemble = cox_like_ensemble()
print(f"ensemble: {ensemble.n} models, predictor '{ensemble.predictor_name}', "
      f"response '{ensemble.response_name}'")
for label, x, y in list(ensemble.rows())[:5]:
    print(f"  {label}: x={x:+.4f}  y={y:+.4f}")
print("  ...")

post = fit_reference(ensemble, draws=100000, rng=RandomStream(1))
s = summarize(post)

print("\nposterior summary (published values: 1.23/0.46, 12.06/2.62, 0.59/0.12)")
print(f"  intercept : {s.beta0_hat:7.4f}  sd {s.sd_beta0:.4f}")
print(f"  slope     : {s.beta1_hat:7.4f}  sd {s.sd_beta1:.4f}")
print(f"  resid sd  : {s.sigma_mean:7.4f}  sd {s.sigma_sd:.4f}")
print(f"  coefficient correlation: {s.rho:.4f}  (published -0.95)")
print(f"  folded-normal fit to sigma draws: location {s.sigma_fn.location:.4f}, "
      f"spread2 {s.sigma_fn.spread2:.6f}")

report = laplace_check(post)
print("\nshape diagnostics (Normal approximation behind the guided layer):")
for name in ("beta0", "beta1", "sigma"):
    print(f"  {name}: skewness {report.skewness[name]:+.3f}, "
          f"excess kurtosis {report.excess_kurtosis[name]:+.3f}")
print(f"  normal enough for elicitation: {report.normal_flag}")
print("  (17 models leave t marginals with ~15 dof: excess kurtosis 6/11 sits "
      "just past the 0.5 gate; at 30+ models the flag turns true)")
