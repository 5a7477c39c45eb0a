/** Client-side session state: the controls, the last acknowledged results,
 * and the comparison overlays.  Controls mirror the last server-acked values;
 * pinned overlays are frozen at pin time and never mutate. */

import type {
  EnsemblePayload,
  ObservationControls,
  Overlay,
  PredictResponse,
  RealityControls,
  SummaryPayload,
} from "./types.js";

export const MAX_OVERLAYS = 6;

export const OVERLAY_COLORS = [
  "#1f77b4",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
];

export const DEFAULT_REALITY: RealityControls = {
  mode: "collapsed",
  confidence: "likely",
  alpha: 0.34,
  muYStar: 3.0,
  sigmaYStar: 1.5,
  sign: "positive",
  manualV00: 0,
  manualV11: 0,
  manualCov: 0,
  manualXi: 0,
};

export const DEFAULT_OBSERVATION: ObservationControls = {
  z: 0.13,
  sigmaZ: 0.016,
  predictorPrior: "flat",
  muX: 0.15,
  sigmaX: 1.0,
};

export class UiState {
  session: string | null = null;
  summary: SummaryPayload | null = null;
  ensemble: EnsemblePayload | null = null;
  reality: RealityControls = { ...DEFAULT_REALITY };
  observation: ObservationControls = { ...DEFAULT_OBSERVATION };
  seed = 0;
  /** reference (collapsed) result, drawn in black */
  reference: PredictResponse | null = null;
  /** latest result for the current controls, drawn in red */
  current: PredictResponse | null = null;
  private overlays: Overlay[] = [];

  get pinned(): readonly Overlay[] {
    return this.overlays;
  }

  beginSession(session: string, summary: SummaryPayload,
               ensemble: EnsemblePayload): void {
    this.session = session;
    this.summary = summary;
    this.ensemble = ensemble;
    this.reference = null;
    this.current = null;
    this.overlays = [];
  }

  /** Pin the current result for comparison; ignores duplicates and enforces
   * the overlay cap.  Returns the overlay, or null if nothing was pinned. */
  pinCurrent(name: string): Overlay | null {
    if (!this.current || this.overlays.length >= MAX_OVERLAYS) {
      return null;
    }
    if (this.overlays.some((o) => o.payload.provenance === this.current!.provenance
        && o.payload.seed === this.current!.seed)) {
      return null;
    }
    const color = OVERLAY_COLORS[this.overlays.length % OVERLAY_COLORS.length]!;
    const overlay: Overlay = Object.freeze({
      name,
      color,
      payload: this.current,
    });
    this.overlays = [...this.overlays, overlay];
    return overlay;
  }

  unpin(index: number): void {
    this.overlays = this.overlays.filter((_, i) => i !== index);
  }

  /** The reality spec document for the current controls. */
  realityRequest(): Record<string, unknown> {
    const r = this.reality;
    if (r.mode === "collapsed") {
      return { kind: "collapsed" };
    }
    if (r.mode === "manual") {
      return {
        kind: "manual",
        Sigma_beta_star: [
          [r.manualV00, r.manualCov],
          [r.manualCov, r.manualV11],
        ],
        xi: r.manualXi,
      };
    }
    const doc: Record<string, unknown> = {
      kind: "guided",
      mu_y_star: r.muYStar,
      sigma_y_star: r.sigmaYStar,
      sign: r.sign,
    };
    if (r.confidence === "custom") {
      doc.confidence = "custom";
      doc.alpha = r.alpha;
    } else {
      doc.confidence = r.confidence;
    }
    return doc;
  }

  observationRequest(): { z: number; sigma_z: number } {
    return { z: this.observation.z, sigma_z: this.observation.sigmaZ };
  }

  predictorPriorRequest(): Record<string, unknown> {
    if (this.observation.predictorPrior === "flat") {
      return { kind: "flat" };
    }
    return {
      kind: "normal",
      mu_x: this.observation.muX,
      sigma_x: this.observation.sigmaX,
    };
  }
}
