/** Density chart: posterior-predictive curves with shaded 66% intervals.
 * Reference result in black, current in red, pinned overlays in their own
 * colors.  Pure payload -> markup; no statistics happen here. */

import type { Overlay, PredictResponse } from "../types.js";
import { areaPath, linePath, linearScale, round, ticks } from "./scale.js";

export interface DensityInputs {
  reference: PredictResponse | null;
  current: PredictResponse | null;
  overlays: readonly Overlay[];
}

interface Curve {
  payload: PredictResponse;
  color: string;
  name: string;
}

const WIDTH = 640;
const HEIGHT = 360;
const MARGIN = { left: 48, right: 12, top: 12, bottom: 32 };

export function renderDensity(container: HTMLElement, inputs: DensityInputs): void {
  const curves: Curve[] = [];
  if (inputs.reference) {
    curves.push({ payload: inputs.reference, color: "#000000", name: "reference" });
  }
  for (const overlay of inputs.overlays) {
    curves.push({ payload: overlay.payload, color: overlay.color, name: overlay.name });
  }
  if (inputs.current) {
    curves.push({ payload: inputs.current, color: "#d62728", name: "current" });
  }
  if (curves.length === 0) {
    container.innerHTML =
      '<p class="placeholder">No results yet: fit an ensemble, then run a prediction.</p>';
    return;
  }

  let xLo = Infinity;
  let xHi = -Infinity;
  let yHi = 0;
  for (const { payload } of curves) {
    for (const [gx, gy] of payload.density) {
      if (gx < xLo) xLo = gx;
      if (gx > xHi) xHi = gx;
      if (gy > yHi) yHi = gy;
    }
  }
  const x = linearScale([xLo, xHi], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale([0, yHi * 1.05], [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];
  for (const { payload, color, name } of curves) {
    const band = payload.intervals["0.66"];
    if (band) {
      const inside = payload.density.filter(([gx]) => gx >= band[0] && gx <= band[1]);
      parts.push(
        `<path class="band" data-name="${name}" fill="${color}" fill-opacity="0.12" ` +
        `d="${areaPath(inside, x, y, 0)}"></path>`,
      );
    }
    parts.push(
      `<path class="curve" data-name="${name}" fill="none" stroke="${color}" ` +
      `stroke-width="1.8" d="${linePath(payload.density, x, y)}"></path>`,
    );
  }

  const axis = ticks(x.domain, 8)
    .map((t) =>
      `<g transform="translate(${round(x(t))},${HEIGHT - MARGIN.bottom})">` +
      `<line y2="5" stroke="#444"></line>` +
      `<text y="18" text-anchor="middle">${t}</text></g>`)
    .join("");

  const legend = curves
    .map(({ color, name }, i) =>
      `<g transform="translate(${MARGIN.left + 8},${MARGIN.top + 8 + i * 16})">` +
      `<rect width="10" height="10" fill="${color}"></rect>` +
      `<text x="14" y="9">${name}</text></g>`)
    .join("");

  container.innerHTML =
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="predictive densities">` +
    `<line x1="${MARGIN.left}" x2="${WIDTH - MARGIN.right}" ` +
    `y1="${HEIGHT - MARGIN.bottom}" y2="${HEIGHT - MARGIN.bottom}" stroke="#444"></line>` +
    parts.join("") + axis + legend + "</svg>";
}
