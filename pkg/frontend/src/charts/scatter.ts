/** Ensemble scatter with the fitted median line, the observation band, and
 * the predictive sample cloud.  Every plotted number comes from a server
 * payload field (ensemble rows, posterior means, interval endpoints,
 * subsampled draws). */

import type { EnsemblePayload, PredictResponse, SummaryPayload } from "../types.js";
import { linePath, linearScale, round, ticks } from "./scale.js";

export interface ScatterInputs {
  ensemble: EnsemblePayload;
  summary: SummaryPayload;
  result: PredictResponse | null;
  observation: { z: number; sigmaZ: number } | null;
}

const WIDTH = 640;
const HEIGHT = 360;
const MARGIN = { left: 48, right: 12, top: 12, bottom: 36 };

export function renderScatter(container: HTMLElement, inputs: ScatterInputs): void {
  const { ensemble, summary, result, observation } = inputs;
  const xs = [...ensemble.x];
  const ys = [...ensemble.y];
  if (observation) {
    xs.push(observation.z - 2 * observation.sigmaZ,
            observation.z + 2 * observation.sigmaZ);
  }
  if (result) {
    const band = result.intervals["0.66"];
    if (band) ys.push(band[0], band[1]);
    if (result.y_star_sample) ys.push(...result.y_star_sample);
  }
  const padX = (Math.max(...xs) - Math.min(...xs)) * 0.08 || 1;
  const padY = (Math.max(...ys) - Math.min(...ys)) * 0.08 || 1;
  const x = linearScale([Math.min(...xs) - padX, Math.max(...xs) + padX],
                        [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale([Math.min(...ys) - padY, Math.max(...ys) + padY],
                        [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];

  if (observation) {
    const lo = x(observation.z - 2 * observation.sigmaZ);
    const hi = x(observation.z + 2 * observation.sigmaZ);
    parts.push(
      `<rect class="obs-band" x="${round(lo)}" y="${MARGIN.top}" ` +
      `width="${round(hi - lo)}" height="${HEIGHT - MARGIN.top - MARGIN.bottom}" ` +
      `fill="#1f77b4" fill-opacity="0.15"></rect>`,
      `<line class="obs-line" x1="${round(x(observation.z))}" x2="${round(x(observation.z))}" ` +
      `y1="${MARGIN.top}" y2="${HEIGHT - MARGIN.bottom}" stroke="#1f77b4" ` +
      `stroke-dasharray="4 3"></line>`,
    );
  }

  if (result?.y_star_sample && observation) {
    const cloud = result.y_star_sample
      .map((v, i) =>
        `<circle class="cloud" cx="${round(x(observation.z))}" cy="${round(y(v))}" ` +
        `r="1.5" fill="#888" fill-opacity="0.25" data-index="${i}"></circle>`)
      .join("");
    parts.push(cloud);
  }

  // fitted median line from the posterior means (payload fields)
  const [d0, d1] = x.domain;
  const line: Array<[number, number]> = [
    [d0, summary.beta0.mean + summary.beta1.mean * d0],
    [d1, summary.beta0.mean + summary.beta1.mean * d1],
  ];
  parts.push(
    `<path class="fit-line" fill="none" stroke="#d62728" stroke-width="1.8" ` +
    `d="${linePath(line, x, y)}"></path>`,
  );

  if (result && observation) {
    const band = result.intervals["0.66"];
    if (band) {
      parts.push(
        `<line class="pred-band" x1="${round(x(observation.z))}" ` +
        `x2="${round(x(observation.z))}" y1="${round(y(band[0]))}" ` +
        `y2="${round(y(band[1]))}" stroke="#d62728" stroke-width="5" ` +
        `stroke-opacity="0.45"></line>`,
      );
    }
  }

  const dots = ensemble.x
    .map((vx, i) =>
      `<circle class="model" cx="${round(x(vx))}" cy="${round(y(ensemble.y[i]!))}" ` +
      `r="3.5" fill="#111"><title>${ensemble.labels[i]}</title></circle>`)
    .join("");
  parts.push(dots);

  const axisX = ticks(x.domain, 8)
    .map((t) =>
      `<g transform="translate(${round(x(t))},${HEIGHT - MARGIN.bottom})">` +
      `<line y2="5" stroke="#444"></line>` +
      `<text y="18" text-anchor="middle">${t}</text></g>`)
    .join("");
  const axisY = ticks(y.domain, 6)
    .map((t) =>
      `<g transform="translate(${MARGIN.left},${round(y(t))})">` +
      `<line x2="-5" stroke="#444"></line>` +
      `<text x="-8" dy="4" text-anchor="end">${t}</text></g>`)
    .join("");

  container.innerHTML =
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="ensemble scatter">` +
    `<line x1="${MARGIN.left}" x2="${WIDTH - MARGIN.right}" ` +
    `y1="${HEIGHT - MARGIN.bottom}" y2="${HEIGHT - MARGIN.bottom}" stroke="#444"></line>` +
    `<line x1="${MARGIN.left}" x2="${MARGIN.left}" y1="${MARGIN.top}" ` +
    `y2="${HEIGHT - MARGIN.bottom}" stroke="#444"></line>` +
    `<text x="${WIDTH / 2}" y="${HEIGHT - 4}" text-anchor="middle" class="axis-label">` +
    `${ensemble.predictor_name}</text>` +
    parts.join("") + axisX + axisY + "</svg>";
}
