/** Editing cockpit: curve brushing, replacement preview, apply/undo, drilldown.
 *
 * All numbers come from service payloads; this module only renders them and
 * relays analyst input back. Mutations wait for service acknowledgment.
 */

import { api, ApiError } from "./api.js";
import { addInterval, clampInterval, normalizeInterval, removeIntervalAt } from "./brush.js";
import {
  absMax,
  divergingColor,
  extent,
  formatPercent,
  formatScore,
  linearScale,
  linePath,
  stepPath,
} from "./chart.js";
import {
  AppState,
  curveEditPayload,
  defaultEditBundle,
  epsilonBound,
  heatmapEditPayload,
  initialState,
  withCurveError,
  withCurveFeature,
  withCurvePreview,
  withEpsilon,
  withHeatmapMetric,
  withHeatmapPair,
} from "./state.js";
import type { EvalPayload, ExplanationPayload, UnivariateTermPayload } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const CURVE_W = 560;
const CURVE_H = 300;
const MARGIN = { top: 12, right: 12, bottom: 28, left: 44 };

let state: AppState = initialState();

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function setStatus(text: string): void {
  byId("status").textContent = text;
}

// -- curve view ---------------------------------------------------------------

function currentTerm(): UnivariateTermPayload | null {
  if (!state.terms) return null;
  return state.terms.univariate.find((t) => t.feature === state.curve.feature) ?? null;
}

function renderCurve(): void {
  const host = byId("curve-chart");
  host.textContent = "";
  const term = currentTerm();
  if (!term) return;

  const domain = term.train_range;
  const sampled = state.curve.preview?.sampled ?? [];
  const ys = [
    ...term.scores,
    ...(state.curve.preview ? state.curve.preview.fitted : []),
    ...sampled.map((p) => p[1]),
  ];
  const sx = linearScale(domain, [MARGIN.left, CURVE_W - MARGIN.right]);
  const sy = linearScale(extent(ys, 0.08), [CURVE_H - MARGIN.bottom, MARGIN.top]);

  const svg = svgEl("svg", {
    viewBox: `0 0 ${CURVE_W} ${CURVE_H}`,
    class: "curve-svg",
  });

  // zero line and axes
  const zeroY = sy(0);
  svg.appendChild(svgEl("line", {
    x1: String(MARGIN.left), x2: String(CURVE_W - MARGIN.right),
    y1: zeroY.toFixed(1), y2: zeroY.toFixed(1), class: "axis-zero",
  }));
  for (const tick of [domain[0], (domain[0] + domain[1]) / 2, domain[1]]) {
    const label = svgEl("text", {
      x: sx(tick).toFixed(1), y: String(CURVE_H - 8), class: "tick",
    });
    label.textContent = tick.toFixed(2);
    svg.appendChild(label);
  }

  // excluded interval shading
  for (const [a, b] of state.curve.excluded) {
    const x0 = sx(Math.max(a, domain[0]));
    const x1 = sx(Math.min(b, domain[1]));
    if (x1 <= x0) continue;
    svg.appendChild(svgEl("rect", {
      x: x0.toFixed(1), y: String(MARGIN.top),
      width: (x1 - x0).toFixed(1),
      height: String(CURVE_H - MARGIN.top - MARGIN.bottom),
      class: "excluded-band",
    }));
  }

  // learned shape function as a step curve
  svg.appendChild(svgEl("path", {
    d: stepPath(term.cuts, term.scores, domain, sx, sy),
    class: "curve-original",
  }));

  // sampled points (selected vs excluded)
  if (state.curve.preview) {
    const { sampled: pts, selected, fitted } = state.curve.preview;
    pts.forEach(([x, y], i) => {
      svg.appendChild(svgEl("circle", {
        cx: sx(x).toFixed(1), cy: sy(y).toFixed(1), r: "2.4",
        class: selected[i] ? "pt-selected" : "pt-excluded",
      }));
    });
    svg.appendChild(svgEl("path", {
      d: linePath(pts.map((p) => p[0]), fitted, sx, sy),
      class: "curve-fitted",
    }));
  }

  // brush interaction
  let dragStart: number | null = null;
  const toDomain = (event: MouseEvent): number => {
    const rect = (svg as unknown as SVGGraphicsElement).getBoundingClientRect();
    const px = MARGIN.left +
      ((event.clientX - rect.left) / rect.width) * CURVE_W - MARGIN.left;
    const frac = (event.clientX - rect.left) / rect.width;
    return sx.invert(frac * CURVE_W);
  };
  svg.addEventListener("mousedown", (event) => {
    dragStart = toDomain(event as MouseEvent);
  });
  svg.addEventListener("mouseup", (event) => {
    if (dragStart === null) return;
    const end = toDomain(event as MouseEvent);
    const interval = clampInterval(normalizeInterval(dragStart, end), domain);
    dragStart = null;
    if (Math.abs(interval[1] - interval[0]) < (domain[1] - domain[0]) / 200) {
      state.curve.excluded = removeIntervalAt(state.curve.excluded, interval[0]);
    } else {
      state.curve.excluded = addInterval(state.curve.excluded, interval);
    }
    void refreshFitPreview();
  });

  host.appendChild(svg);
  byId("curve-meta").textContent = state.curve.error
    ? `fit error: ${state.curve.error}`
    : state.curve.preview
      ? `fit SSE ${state.curve.preview.sse.toExponential(2)}; ` +
        `${state.curve.excluded.length} excluded interval(s)`
      : "drag to exclude a region; click a band to clear it";
}

async function refreshFitPreview(): Promise<void> {
  if (!state.sessionId) return;
  const body = {
    feature: state.curve.feature,
    family: state.curve.family,
    direction: state.curve.direction,
    excluded: state.curve.excluded,
    breakpoints: state.curve.breakpoints,
    levels: state.curve.levels,
  };
  try {
    const preview = await api.fitPreview(state.sessionId, body);
    state = withCurvePreview(state, preview);
  } catch (err) {
    state = withCurveError(state, err instanceof ApiError ? err.message : String(err));
  }
  renderCurve();
}

// -- heatmap view -------------------------------------------------------------

function renderHeatmap(): void {
  const host = byId("heatmap-chart");
  host.textContent = "";
  const preview = state.heatmap.preview;
  const termsPayload = state.terms;
  if (!termsPayload) return;
  const matrix = preview
    ? preview.synth_rescaled
    : termsPayload.interactions.find(
        (t) => t.pair[0] === state.heatmap.pair[0] && t.pair[1] === state.heatmap.pair[1],
      )?.matrix;
  const original = termsPayload.interactions.find(
    (t) => t.pair[0] === state.heatmap.pair[0] && t.pair[1] === state.heatmap.pair[1],
  )?.matrix;
  if (!matrix || !original) return;

  const rows = original.length;
  const cols = original[0].length;
  const size = 420;
  const cw = size / cols;
  const ch = size / rows;
  const span = absMax(original);

  const svg = svgEl("svg", { viewBox: `0 0 ${size} ${size}`, class: "heatmap-svg" });
  for (let i = 0; i < rows; i++) {
    for (let j = 0; j < cols; j++) {
      const replaced = preview ? preview.mask[i][j] === 1 : false;
      const value = replaced ? preview!.synth_rescaled[i][j] : original[i][j];
      const rect = svgEl("rect", {
        x: (j * cw).toFixed(1),
        y: ((rows - 1 - i) * ch).toFixed(1),
        width: cw.toFixed(1),
        height: ch.toFixed(1),
        fill: divergingColor(value, span),
        class: replaced ? "cell replaced" : "cell",
      });
      svg.appendChild(rect);
    }
  }
  host.appendChild(svg);

  const label = byId("heatmap-meta");
  if (preview) {
    label.textContent =
      `${preview.pair[0]} x ${preview.pair[1]}: ${formatPercent(preview.replaced_fraction)} ` +
      `of cells replaced (${preview.metric}, eps=${preview.epsilon.toFixed(2)})`;
  } else {
    label.textContent = "original interaction matrix; move the slider to preview replacement";
  }
}

async function refreshReplacementPreview(): Promise<void> {
  if (!state.sessionId) return;
  try {
    const preview = await api.replacementPreview(state.sessionId, heatmapEditPayload(state.heatmap));
    state.heatmap.preview = preview;
    state.heatmap.error = null;
  } catch (err) {
    state.heatmap.preview = null;
    state.heatmap.error = err instanceof ApiError ? err.message : String(err);
  }
  renderHeatmap();
  const meta = byId("heatmap-meta");
  if (state.heatmap.error) meta.textContent = `preview unavailable: ${state.heatmap.error}`;
}

// -- metrics + explanation ------------------------------------------------------

function renderEval(report: EvalPayload | null): void {
  const host = byId("metrics-body");
  host.textContent = "";
  if (!report) return;
  const metrics = ["accuracy", "precision", "recall", "f1", "auc"] as const;
  for (const split of ["validation", "test"]) {
    const row = el("tr");
    row.appendChild(el("th", {}, split));
    for (const metric of metrics) {
      const base = report.base[split][metric];
      const working = report.working[split][metric];
      const cell = el("td", {},
        `${base.toFixed(3)} → ${working.toFixed(3)}`);
      const delta = report.delta[split][metric];
      cell.className = delta < -1e-9 ? "worse" : delta > 1e-9 ? "better" : "";
      row.appendChild(cell);
    }
    host.appendChild(row);
  }
}

function renderExplanation(host: HTMLElement, exp: ExplanationPayload): void {
  host.textContent = "";
  host.appendChild(el("div", { class: "exp-header" },
    `score ${formatScore(exp.score)} (p=${exp.probability.toFixed(3)}, ` +
    `predicted ${exp.label ? "spreading" : "no spreading"})`));
  const maxAbs = Math.max(...exp.contributions.map(([, v]) => Math.abs(v)), 1e-9);
  for (const [name, value] of exp.contributions.slice(0, 10)) {
    const row = el("div", { class: "exp-row" });
    row.appendChild(el("span", { class: "exp-name" }, name));
    const bar = el("div", { class: "exp-bar-host" });
    const width = Math.abs(value) / maxAbs * 50;
    const barEl = el("div", {
      class: value >= 0 ? "exp-bar pos" : "exp-bar neg",
      style: `width:${width.toFixed(1)}%;` +
        (value >= 0 ? "margin-left:50%;" : `margin-left:${(50 - width).toFixed(1)}%;`),
    });
    bar.appendChild(barEl);
    row.appendChild(bar);
    row.appendChild(el("span", { class: "exp-value" }, formatScore(value)));
    host.appendChild(row);
  }
}

async function refreshExplanation(): Promise<void> {
  if (!state.sessionId) return;
  const input = byId("site-input") as HTMLInputElement;
  const siteId = Number.parseInt(input.value, 10);
  if (Number.isNaN(siteId)) return;
  try {
    const base = await api.explain(state.sessionId, siteId, "base");
    const working = await api.explain(state.sessionId, siteId, "working");
    renderExplanation(byId("exp-base"), base);
    renderExplanation(byId("exp-working"), working);
  } catch (err) {
    byId("exp-base").textContent = err instanceof ApiError ? err.message : String(err);
    byId("exp-working").textContent = "";
  }
}

// -- top-level actions -----------------------------------------------------------

async function reloadTerms(): Promise<void> {
  if (!state.sessionId) return;
  state.terms = await api.terms(state.sessionId);
  renderCurve();
  renderHeatmap();
  renderProvenance();
}

function renderProvenance(): void {
  if (!state.terms) return;
  const editedFeatures = state.terms.univariate.filter((t) => t.edited).map((t) => t.feature);
  byId("provenance").textContent =
    `${state.terms.provenance} | hash ${state.terms.model_hash.slice(0, 12)}` +
    (editedFeatures.length ? ` | edited: ${editedFeatures.join(", ")}` : "");
}

async function applyCurveEdit(): Promise<void> {
  if (!state.sessionId) return;
  setStatus("applying curve edit...");
  try {
    const result = await api.applyEdits(state.sessionId, {
      univariate: [curveEditPayload(state.curve)],
      interactions: [],
    });
    state.evalReport = result.eval;
    renderEval(state.evalReport);
    await reloadTerms();
    setStatus("curve edit applied");
  } catch (err) {
    setStatus(`apply failed: ${err instanceof ApiError ? err.message : err}`);
  }
}

async function applyReplacement(): Promise<void> {
  if (!state.sessionId) return;
  setStatus("applying replacement...");
  try {
    const result = await api.applyEdits(state.sessionId, {
      univariate: [],
      interactions: [heatmapEditPayload(state.heatmap)],
    });
    state.evalReport = result.eval;
    renderEval(state.evalReport);
    await reloadTerms();
    setStatus("replacement applied");
  } catch (err) {
    setStatus(`apply failed: ${err instanceof ApiError ? err.message : err}`);
  }
}

async function applyDefaultBundle(): Promise<void> {
  if (!state.sessionId) return;
  setStatus("applying default edit bundle...");
  try {
    const result = await api.applyEdits(state.sessionId, defaultEditBundle());
    state.evalReport = result.eval;
    renderEval(state.evalReport);
    await reloadTerms();
    setStatus("default bundle applied");
  } catch (err) {
    setStatus(`apply failed: ${err instanceof ApiError ? err.message : err}`);
  }
}

async function undoLast(): Promise<void> {
  if (!state.sessionId) return;
  try {
    await api.undo(state.sessionId);
    state.evalReport = await api.evalReport(state.sessionId);
    renderEval(state.evalReport);
    await reloadTerms();
    setStatus("undone");
  } catch (err) {
    setStatus(`undo failed: ${err instanceof ApiError ? err.message : err}`);
  }
}

function wireControls(): void {
  const featureSelect = byId("feature-select") as HTMLSelectElement;
  featureSelect.addEventListener("change", () => {
    state = withCurveFeature(state, featureSelect.value);
    void refreshFitPreview();
  });

  const directionSelect = byId("direction-select") as HTMLSelectElement;
  directionSelect.addEventListener("change", () => {
    state.curve.direction = directionSelect.value as "increasing" | "decreasing" | "free";
    void refreshFitPreview();
  });

  byId("clear-brush").addEventListener("click", () => {
    state.curve.excluded = [];
    void refreshFitPreview();
  });
  byId("apply-curve").addEventListener("click", () => void applyCurveEdit());

  const pairSelect = byId("pair-select") as HTMLSelectElement;
  pairSelect.addEventListener("change", () => {
    const [a, b] = pairSelect.value.split("|");
    state = withHeatmapPair(state, [a, b]);
    void refreshReplacementPreview();
  });

  const metricSelect = byId("metric-select") as HTMLSelectElement;
  const slider = byId("epsilon-slider") as HTMLInputElement;
  const sliderLabel = byId("epsilon-value");
  metricSelect.addEventListener("change", () => {
    state = withHeatmapMetric(state, metricSelect.value as "range" | "relative");
    slider.max = String(epsilonBound(state.heatmap.metric));
    slider.value = String(state.heatmap.epsilon);
    sliderLabel.textContent = state.heatmap.epsilon.toFixed(2);
    void refreshReplacementPreview();
  });
  slider.addEventListener("input", () => {
    state = withEpsilon(state, Number.parseFloat(slider.value));
    sliderLabel.textContent = state.heatmap.epsilon.toFixed(2);
    void refreshReplacementPreview();
  });

  byId("apply-replacement").addEventListener("click", () => void applyReplacement());
  byId("apply-defaults").addEventListener("click", () => void applyDefaultBundle());
  byId("undo").addEventListener("click", () => void undoLast());
  byId("explain-go").addEventListener("click", () => void refreshExplanation());
}

function populateSelectors(): void {
  if (!state.terms) return;
  const featureSelect = byId("feature-select") as HTMLSelectElement;
  featureSelect.textContent = "";
  for (const term of state.terms.univariate) {
    featureSelect.appendChild(el("option", { value: term.feature }, term.feature));
  }
  featureSelect.value = state.curve.feature;

  const pairSelect = byId("pair-select") as HTMLSelectElement;
  pairSelect.textContent = "";
  for (const term of state.terms.interactions) {
    const value = `${term.pair[0]}|${term.pair[1]}`;
    pairSelect.appendChild(el("option", { value }, `${term.pair[0]} x ${term.pair[1]}`));
  }
  pairSelect.value = `${state.heatmap.pair[0]}|${state.heatmap.pair[1]}`;
}

async function boot(): Promise<void> {
  try {
    const info = await api.createSession();
    state.sessionId = info.session_id;
    state.baseHash = info.model_hash;
    window.sessionStorage.setItem("glassboost-session", info.session_id);
    state.terms = await api.terms(info.session_id);
    state.evalReport = await api.evalReport(info.session_id);
    populateSelectors();
    renderCurve();
    renderHeatmap();
    renderEval(state.evalReport);
    renderProvenance();
    wireControls();
    setStatus(`session ${info.session_id}`);
  } catch (err) {
    setStatus(`failed to start: ${err instanceof ApiError ? err.message : err}`);
  }
}

void boot();
