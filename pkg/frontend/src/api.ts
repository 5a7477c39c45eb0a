/** Thin typed client for the inference service. */

import type {
  DatasetEntry,
  ElicitResponse,
  FitResponse,
  PredictResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function post<T>(
  url: string,
  body: unknown,
  signal?: AbortSignal,
): Promise<T> {
  const response = await fetch(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
    signal,
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const doc = await response.json();
      detail = typeof doc.detail === "string" ? doc.detail : JSON.stringify(doc.detail);
    } catch {
      /* keep statusText */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export interface FitRequest {
  csv?: string;
  builtin?: string;
  synthetic?: boolean;
  sampler?: { draws?: number; chains?: number; seed?: number };
}

export interface PredictRequest {
  session: string;
  reality: Record<string, unknown>;
  observation: { z: number; sigma_z: number };
  predictor_prior: Record<string, unknown>;
  levels: number[];
  seed: number;
  include_samples?: number;
}

export interface ElicitRequest {
  session: string;
  confidence?: string;
  alpha?: number;
  mu_y_star: number;
  sigma_y_star: number;
  sign: string;
}

export class Client {
  constructor(private base: string = "") {}

  datasets(): Promise<{ datasets: DatasetEntry[] }> {
    return fetch(`${this.base}/api/datasets`).then((r) => r.json());
  }

  fit(request: FitRequest): Promise<FitResponse> {
    return post(`${this.base}/api/fit`, request);
  }

  predict(request: PredictRequest, signal?: AbortSignal): Promise<PredictResponse> {
    return post(`${this.base}/api/predict`, request, signal);
  }

  elicit(request: ElicitRequest, signal?: AbortSignal): Promise<ElicitResponse> {
    return post(`${this.base}/api/elicit`, request, signal);
  }
}
