/** Application wiring: controls on the left, charts and the interval table
 * on the right.  Workflow: pick or upload an ensemble, fit once, then
 * iterate on reality judgements; the server refuses no statistics to us,
 * and we do none ourselves. */

import { ApiError, Client } from "./api.js";
import { renderDensity } from "./charts/density.js";
import { renderScatter } from "./charts/scatter.js";
import { renderIntervalTable, type TableRow } from "./charts/table.js";
import { ElicitPreview } from "./elicit.js";
import { UiState } from "./state.js";
import type { ElicitResponse, RealityMode } from "./types.js";

const LEVELS = [0.66, 0.9, 0.95];
const LEVEL_KEYS = ["0.66", "0.9", "0.95"];
const CONFIDENCE_LABELS = ["virtually_certain", "very_likely", "likely",
                           "coin_flip", "custom"];

const client = new Client("");
const state = new UiState();
const elicitPreview = new ElicitPreview(client);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function numberInput(id: string): number {
  return Number(el<HTMLInputElement>(id).value);
}

function setStatus(text: string, isError = false): void {
  const node = el<HTMLElement>("status");
  node.textContent = text;
  node.className = isError ? "status error" : "status";
}

function refreshCharts(): void {
  renderDensity(el("density"), {
    reference: state.reference,
    current: state.current,
    overlays: state.pinned,
  });
  if (state.ensemble && state.summary) {
    renderScatter(el("scatter"), {
      ensemble: state.ensemble,
      summary: state.summary,
      result: state.current,
      observation: { z: state.observation.z, sigmaZ: state.observation.sigmaZ },
    });
  }
  const rows: TableRow[] = [];
  if (state.reference) rows.push({ name: "reference", payload: state.reference });
  state.pinned.forEach((o) => rows.push({ name: o.name, payload: o.payload }));
  if (state.current) rows.push({ name: "current", payload: state.current });
  renderIntervalTable(el("interval-table"), rows, LEVEL_KEYS);
}

function describeConfiguration(): string {
  const r = state.reality;
  if (r.mode === "collapsed") return "collapsed";
  if (r.mode === "manual") return `manual xi=${r.manualXi}`;
  const label = r.confidence === "custom" ? `alpha=${r.alpha}` : r.confidence;
  return `guided ${label}`;
}

function showElicit(doc: ElicitResponse | null): void {
  const node = el<HTMLElement>("elicit-preview");
  if (!doc) {
    node.innerHTML = "";
    return;
  }
  node.innerHTML =
    `<dl><dt>sd(intercept*)</dt><dd>${doc.sd_beta0_star.toFixed(4)}</dd>` +
    `<dt>sd(slope*)</dt><dd>${doc.sd_beta1_star.toFixed(4)}</dd>` +
    `<dt>extra sd spread</dt><dd>${doc.xi.toFixed(4)}</dd>` +
    `<dt>P(sign flip)</dt><dd>${doc.sign_flip_probability.toExponential(2)}</dd></dl>`;
}

function readControls(): void {
  state.reality.mode = el<HTMLSelectElement>("reality-mode").value as RealityMode;
  state.reality.confidence = el<HTMLSelectElement>("confidence").value;
  state.reality.alpha = numberInput("alpha");
  state.reality.muYStar = numberInput("mu-y");
  state.reality.sigmaYStar = numberInput("sigma-y");
  state.reality.sign = el<HTMLSelectElement>("sign").value as "positive" | "negative";
  state.reality.manualV00 = numberInput("manual-v00");
  state.reality.manualV11 = numberInput("manual-v11");
  state.reality.manualCov = numberInput("manual-cov");
  state.reality.manualXi = numberInput("manual-xi");
  state.observation.z = numberInput("obs-z");
  state.observation.sigmaZ = numberInput("obs-sigma-z");
  state.observation.predictorPrior =
    el<HTMLSelectElement>("x-prior").value as "flat" | "normal";
  state.observation.muX = numberInput("mu-x");
  state.observation.sigmaX = numberInput("sigma-x");
  state.seed = numberInput("seed");
}

async function onConfidenceChange(): Promise<void> {
  readControls();
  if (!state.session || state.reality.mode !== "guided") {
    showElicit(null);
    return;
  }
  const r = state.reality;
  try {
    const doc = await elicitPreview.preview({
      session: state.session,
      ...(r.confidence === "custom" ? { alpha: r.alpha }
                                    : { confidence: r.confidence }),
      mu_y_star: r.muYStar,
      sigma_y_star: r.sigmaYStar,
      sign: r.sign,
    });
    if (doc) showElicit(doc);
  } catch (err) {
    setStatus(err instanceof ApiError ? err.message : String(err), true);
  }
}

async function runPredict(asReference = false): Promise<void> {
  if (!state.session) {
    setStatus("fit an ensemble first", true);
    return;
  }
  readControls();
  setStatus("sampling...");
  try {
    const payload = await client.predict({
      session: state.session,
      reality: asReference ? { kind: "collapsed" } : state.realityRequest(),
      observation: state.observationRequest(),
      predictor_prior: state.predictorPriorRequest(),
      levels: LEVELS,
      seed: state.seed,
      include_samples: 400,
    });
    if (asReference) {
      state.reference = payload;
    } else {
      state.current = payload;
    }
    setStatus("done");
    refreshCharts();
  } catch (err) {
    setStatus(err instanceof ApiError ? err.message : String(err), true);
  }
}

async function runFit(): Promise<void> {
  readControls();
  const file = el<HTMLInputElement>("csv-file").files?.[0];
  const builtin = el<HTMLSelectElement>("dataset").value;
  setStatus("fitting...");
  try {
    const request = file
      ? { csv: await file.text(), sampler: { seed: state.seed } }
      : { builtin, synthetic: true, sampler: { seed: state.seed } };
    const doc = await client.fit(request);
    state.beginSession(doc.session, doc.summary, doc.ensemble);
    const s = doc.summary;
    el("fit-summary").innerHTML =
      `<dl><dt>intercept</dt><dd>${s.beta0.mean.toFixed(3)} &plusmn; ${s.beta0.sd.toFixed(3)}</dd>` +
      `<dt>slope</dt><dd>${s.beta1.mean.toFixed(3)} &plusmn; ${s.beta1.sd.toFixed(3)}</dd>` +
      `<dt>residual sd</dt><dd>${s.sigma.mean.toFixed(3)} &plusmn; ${s.sigma.sd.toFixed(3)}</dd>` +
      `<dt>correlation</dt><dd>${s.rho.toFixed(3)}</dd></dl>`;
    setStatus(`session ${doc.session.slice(0, 8)}... (${doc.draws} draws)`);
    await runPredict(true);
  } catch (err) {
    setStatus(err instanceof ApiError ? err.message : String(err), true);
  }
}

function syncVisibility(): void {
  const mode = el<HTMLSelectElement>("reality-mode").value;
  el("guided-controls").hidden = mode !== "guided";
  el("manual-controls").hidden = mode !== "manual";
  el("custom-alpha").hidden =
    el<HTMLSelectElement>("confidence").value !== "custom";
}

async function populateDatasets(): Promise<void> {
  const select = el<HTMLSelectElement>("dataset");
  try {
    const { datasets } = await client.datasets();
    select.innerHTML = datasets
      .map((d) => `<option value="${d.name}">${d.name} (z=${d.z})</option>`)
      .join("");
    const first = datasets[0];
    if (first) {
      el<HTMLInputElement>("obs-z").value = String(first.z);
      el<HTMLInputElement>("obs-sigma-z").value = String(first.sigma_z);
    }
  } catch {
    select.innerHTML = '<option value="cox">cox</option>';
  }
}

export function bind(): void {
  el("fit-button").addEventListener("click", () => void runFit());
  el("predict-button").addEventListener("click", () => void runPredict());
  el("pin-button").addEventListener("click", () => {
    readControls();
    if (state.pinCurrent(describeConfiguration())) {
      refreshCharts();
    }
  });
  el("reality-mode").addEventListener("change", () => {
    syncVisibility();
    void onConfidenceChange();
  });
  el("confidence").addEventListener("change", () => {
    syncVisibility();
    void onConfidenceChange();
  });
  for (const id of ["alpha", "mu-y", "sigma-y", "sign"]) {
    el(id).addEventListener("change", () => void onConfidenceChange());
  }
  el("dataset").addEventListener("change", () => {
    const selected = el<HTMLSelectElement>("dataset").value;
    void client.datasets().then(({ datasets }) => {
      const entry = datasets.find((d) => d.name === selected);
      if (entry) {
        el<HTMLInputElement>("obs-z").value = String(entry.z);
        el<HTMLInputElement>("obs-sigma-z").value = String(entry.sigma_z);
      }
    });
  });
  syncVisibility();
  refreshCharts();
  void populateDatasets();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bind();
}
