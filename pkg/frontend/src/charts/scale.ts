/** Minimal linear scales and SVG path helpers shared by the charts. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function linePath(points: Array<[number, number]>, x: Scale, y: Scale): string {
  return points
    .map(([px, py], i) => `${i === 0 ? "M" : "L"}${round(x(px))},${round(y(py))}`)
    .join("");
}

export function areaPath(points: Array<[number, number]>, x: Scale, y: Scale,
                         baseline: number): string {
  if (points.length === 0) {
    return "";
  }
  const top = linePath(points, x, y);
  const first = points[0]!;
  const last = points[points.length - 1]!;
  return `${top}L${round(x(last[0]))},${round(y(baseline))}` +
         `L${round(x(first[0]))},${round(y(baseline))}Z`;
}

export function ticks(domain: [number, number], count: number): number[] {
  const [lo, hi] = domain;
  const rawStep = (hi - lo) / Math.max(count, 1);
  const magnitude = 10 ** Math.floor(Math.log10(Math.abs(rawStep) || 1));
  const candidates = [1, 2, 5, 10].map((m) => m * magnitude);
  const step = candidates.find((c) => c >= rawStep) ?? candidates[3]!;
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12; v += step) {
    out.push(Number(v.toFixed(12)));
  }
  return out;
}

/** Fixed-precision coordinates so identical inputs give identical markup. */
export function round(value: number): string {
  return value.toFixed(2);
}
