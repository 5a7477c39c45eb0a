/** Server payload shapes. The UI renders these verbatim and computes nothing. */

export interface SummaryPayload {
  beta0: { mean: number; sd: number };
  beta1: { mean: number; sd: number };
  sigma: { mean: number; sd: number; fn_location: number; fn_spread2: number };
  rho: number;
}

export interface EnsemblePayload {
  labels: string[];
  x: number[];
  y: number[];
  predictor_name: string;
  response_name: string;
}

export interface FitResponse {
  session: string;
  summary: SummaryPayload;
  laplace: {
    skewness: Record<string, number>;
    excess_kurtosis: Record<string, number>;
    normal_flag: boolean;
  };
  diagnostics: unknown;
  draws: number;
  ensemble: EnsemblePayload;
}

export interface PredictResponse {
  median: number;
  intervals: Record<string, [number, number]>;
  density: Array<[number, number]>;
  x_star: { mean: number; sd: number };
  seed: number;
  draws: number;
  provenance: string;
  y_star_sample?: number[];
}

export interface ElicitResponse {
  Sigma_beta_star: number[][];
  xi: number;
  alpha: number;
  sd_beta0_star: number;
  sd_beta1_star: number;
  sign_flip_probability: number;
}

export interface DatasetEntry {
  name: string;
  z: number;
  sigma_z: number;
  predictor_prior:
    | { kind: "flat" }
    | { kind: "normal"; mu_x: number; sigma_x: number };
  notes: string;
}

export type RealityMode = "collapsed" | "manual" | "guided";

export interface RealityControls {
  mode: RealityMode;
  confidence: string; // label, or "custom"
  alpha: number; // used when confidence === "custom"
  muYStar: number;
  sigmaYStar: number;
  sign: "positive" | "negative";
  manualV00: number;
  manualV11: number;
  manualCov: number;
  manualXi: number;
}

export interface ObservationControls {
  z: number;
  sigmaZ: number;
  predictorPrior: "flat" | "normal";
  muX: number;
  sigmaX: number;
}

/** A result pinned for comparison; immutable once created. */
export interface Overlay {
  readonly name: string;
  readonly color: string;
  readonly payload: PredictResponse;
}
