"""Folded-Normal primitives: density, folding, the Normal limit, and MLE.

The Folded Normal |N(location, spread2)| is the workhorse for residual-sd
uncertainty: it is strictly positive, needs no extra parameters, and turns
into a plain Normal once the location clears a few spread widths.
"""
import numpy as np

from ecbayes import FoldedNormal, RandomStream, fit_folded_normal

rng = RandomStream(2026)

print("== Half Normal is the location-zero case ==")
hn = FoldedNormal(0.0, 1.0)
print(f"pdf at 0      : {hn.pdf(0.0):.10f}  (twice the standard Normal peak)")
print(f"cdf at 1      : {hn.cdf(1.0):.6f}")
print(f"mean (closed) : {hn.mean():.6f}  = sqrt(2/pi)")
print(f"sample mean   : {hn.sample(100000, rng).mean():.6f}")

print("\n== Folding matters only near the origin ==")
for loc in (0.0, 0.5, 1.0, 3.0, 10.0):
    fn = FoldedNormal(loc, 1.0)
    print(f"location {loc:5.1f}: mean {fn.mean():.4f} vs underlying {loc:5.1f}")

print("\n== Normal limit: location = 10 * spread ==")
fn = FoldedNormal(10.0, 1.0)
grid = np.linspace(0.0, 18.0, 1000)
normal_pdf = np.exp(-0.5 * (grid - 10.0) ** 2) / np.sqrt(2 * np.pi)
print(f"sup |folded - normal| = {np.max(np.abs(fn.pdf(grid) - normal_pdf)):.2e}")

print("\n== Numerical maximum likelihood ==")
truth = FoldedNormal(0.59, 0.0144)
draws = truth.sample(100000, rng)
fitted = fit_folded_normal(draws)
print(f"truth : location 0.5900, spread2 0.014400")
print(f"fitted: location {fitted.location:.4f}, spread2 {fitted.spread2:.6f}")
