import type { EnsemblePayload, PredictResponse, SummaryPayload } from "../src/types.js";

/** Deterministic fake predict payload; `shift` displaces every number so two
 * payloads with different shifts are distinguishable. */
export function fakePredict(shift = 0, seed = 0): PredictResponse {
  const density: Array<[number, number]> = [];
  for (let i = 0; i < 64; i++) {
    const x = shift + i * 0.1;
    density.push([x, Math.exp(-((x - shift - 3.2) ** 2))]);
  }
  return {
    median: 2.7978 + shift,
    intervals: {
      "0.66": [2.1913 + shift, 3.4041 + shift],
      "0.9": [1.7244 + shift, 3.8705 + shift],
      "0.95": [1.4911 + shift, 4.0931 + shift],
    },
    density,
    x_star: { mean: 0.13, sd: 0.016 },
    seed,
    draws: 20000,
    provenance: `prov-${shift}-${seed}`,
    y_star_sample: [2.1 + shift, 2.8 + shift, 3.3 + shift],
  };
}

export function fakeSummary(): SummaryPayload {
  return {
    beta0: { mean: 1.23, sd: 0.46 },
    beta1: { mean: 12.06, sd: 2.62 },
    sigma: { mean: 0.59, sd: 0.12, fn_location: 0.59, fn_spread2: 0.0144 },
    rho: -0.95,
  };
}

export function fakeEnsemble(): EnsemblePayload {
  return {
    labels: ["m01", "m02", "m03", "m04"],
    x: [0.1, 0.15, 0.2, 0.25],
    y: [2.3, 3.0, 3.4, 4.1],
    predictor_name: "predictor",
    response_name: "response",
  };
}
