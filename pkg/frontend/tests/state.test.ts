import { describe, expect, it } from "vitest";

import { MAX_OVERLAYS, UiState } from "../src/state.js";
import { fakeEnsemble, fakePredict, fakeSummary } from "./helpers.js";

function sessionState(): UiState {
  const state = new UiState();
  state.beginSession("s1", fakeSummary(), fakeEnsemble());
  return state;
}

describe("UiState overlays", () => {
  it("pins the current result and freezes it", () => {
    const state = sessionState();
    state.current = fakePredict(0);
    const overlay = state.pinCurrent("guided likely");
    expect(overlay).not.toBeNull();
    expect(Object.isFrozen(overlay)).toBe(true);
    expect(state.pinned).toHaveLength(1);
    expect(state.pinned[0]!.payload.median).toBe(fakePredict(0).median);
  });

  it("refuses to pin without a current result", () => {
    const state = sessionState();
    expect(state.pinCurrent("x")).toBeNull();
  });

  it("refuses duplicate pins of the same payload", () => {
    const state = sessionState();
    state.current = fakePredict(1);
    expect(state.pinCurrent("a")).not.toBeNull();
    expect(state.pinCurrent("a again")).toBeNull();
    expect(state.pinned).toHaveLength(1);
  });

  it("caps the overlay count", () => {
    const state = sessionState();
    for (let i = 0; i < MAX_OVERLAYS + 3; i++) {
      state.current = fakePredict(i + 1);
      state.pinCurrent(`cfg ${i}`);
    }
    expect(state.pinned).toHaveLength(MAX_OVERLAYS);
  });

  it("assigns distinct colors to overlays", () => {
    const state = sessionState();
    for (let i = 0; i < 4; i++) {
      state.current = fakePredict(i + 1);
      state.pinCurrent(`cfg ${i}`);
    }
    const colors = state.pinned.map((o) => o.color);
    expect(new Set(colors).size).toBe(colors.length);
  });

  it("unpins by index without touching the rest", () => {
    const state = sessionState();
    for (let i = 0; i < 3; i++) {
      state.current = fakePredict(i + 1);
      state.pinCurrent(`cfg ${i}`);
    }
    state.unpin(1);
    expect(state.pinned.map((o) => o.name)).toEqual(["cfg 0", "cfg 2"]);
  });

  it("resets results and overlays on a new session", () => {
    const state = sessionState();
    state.current = fakePredict(0);
    state.pinCurrent("old");
    state.beginSession("s2", fakeSummary(), fakeEnsemble());
    expect(state.pinned).toHaveLength(0);
    expect(state.current).toBeNull();
    expect(state.reference).toBeNull();
    expect(state.session).toBe("s2");
  });
});

describe("request documents", () => {
  it("collapsed mode produces the collapsed spec", () => {
    const state = sessionState();
    state.reality.mode = "collapsed";
    expect(state.realityRequest()).toEqual({ kind: "collapsed" });
  });

  it("manual mode carries the covariance and spread", () => {
    const state = sessionState();
    state.reality.mode = "manual";
    state.reality.manualV00 = 0.25;
    state.reality.manualV11 = 15;
    state.reality.manualCov = -0.9;
    state.reality.manualXi = 0.11;
    expect(state.realityRequest()).toEqual({
      kind: "manual",
      Sigma_beta_star: [
        [0.25, -0.9],
        [-0.9, 15],
      ],
      xi: 0.11,
    });
  });

  it("guided mode uses the label, or alpha when custom", () => {
    const state = sessionState();
    state.reality.mode = "guided";
    state.reality.confidence = "likely";
    expect(state.realityRequest()).toMatchObject({
      kind: "guided",
      confidence: "likely",
      mu_y_star: 3,
      sigma_y_star: 1.5,
    });
    state.reality.confidence = "custom";
    state.reality.alpha = 0.2;
    expect(state.realityRequest()).toMatchObject({
      confidence: "custom",
      alpha: 0.2,
    });
  });

  it("predictor prior request follows the controls", () => {
    const state = sessionState();
    expect(state.predictorPriorRequest()).toEqual({ kind: "flat" });
    state.observation.predictorPrior = "normal";
    state.observation.muX = 0.15;
    state.observation.sigmaX = 1;
    expect(state.predictorPriorRequest()).toEqual({
      kind: "normal",
      mu_x: 0.15,
      sigma_x: 1,
    });
  });
});
