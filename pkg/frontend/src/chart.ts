/** Rendering transforms: scales, SVG paths, heatmap colors.
 *
 * Everything here is a pure mapping from service payload numbers to screen
 * coordinates or colors; no model math happens client-side.
 */

export interface LinearScale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
  invert(px: number): number;
}

export function linearScale(domain: [number, number], range: [number, number]): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as LinearScale;
  scale.domain = domain;
  scale.range = range;
  scale.invert = (px: number) => d0 + ((px - r0) / (r1 - r0 || 1)) * span;
  return scale;
}

export function extent(values: number[], pad = 0): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!isFinite(lo)) return [0, 1];
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return [lo - pad * span, hi + pad * span];
}

export function linePath(xs: number[], ys: number[], sx: LinearScale, sy: LinearScale): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    const cmd = i === 0 ? "M" : "L";
    parts.push(`${cmd}${sx(xs[i]).toFixed(2)},${sy(ys[i]).toFixed(2)}`);
  }
  return parts.join(" ");
}

/** Step path for a binned score table: cuts define right-closed bins. */
export function stepPath(
  cuts: number[],
  scores: number[],
  domain: [number, number],
  sx: LinearScale,
  sy: LinearScale,
): string {
  const edges = [domain[0], ...cuts, domain[1]];
  const parts: string[] = [];
  for (let i = 0; i < scores.length; i++) {
    const x0 = Math.max(edges[i], domain[0]);
    const x1 = Math.min(edges[i + 1], domain[1]);
    if (x1 < x0) continue;
    const y = sy(scores[i]).toFixed(2);
    parts.push(`${parts.length === 0 ? "M" : "L"}${sx(x0).toFixed(2)},${y}`);
    parts.push(`L${sx(x1).toFixed(2)},${y}`);
  }
  return parts.join(" ");
}

/** Diverging blue-white-red color for a score given a symmetric span. */
export function divergingColor(value: number, span: number): string {
  if (span <= 0) span = 1;
  const t = Math.max(-1, Math.min(1, value / span));
  const mix = (a: number, b: number, k: number) => Math.round(a + (b - a) * k);
  if (t < 0) {
    const k = -t;
    return `rgb(${mix(255, 33, k)},${mix(255, 102, k)},${mix(255, 172, k)})`;
  }
  const k = t;
  return `rgb(${mix(255, 178, k)},${mix(255, 24, k)},${mix(255, 43, k)})`;
}

export function formatScore(v: number): string {
  return (v >= 0 ? "+" : "") + v.toFixed(2);
}

export function formatPercent(v: number): string {
  return `${(100 * v).toFixed(1)}%`;
}

/** Matrix maximum absolute value, for symmetric color spans. */
export function absMax(matrix: number[][]): number {
  let m = 0;
  for (const row of matrix) {
    for (const v of row) {
      const a = Math.abs(v);
      if (a > m) m = a;
    }
  }
  return m;
}
