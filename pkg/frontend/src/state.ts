/** Session view state and pure reducers.
 *
 * The UI state is a projection of service responses plus transient brush
 * input; nothing numeric is computed here beyond bookkeeping.
 */

import type {
  EvalPayload,
  FitPreviewPayload,
  Interval,
  ReplacementPreviewPayload,
  TermsPayload,
} from "./types.js";

export interface CurveViewState {
  feature: string;
  excluded: Interval[];
  family: "sigmoid" | "step";
  direction: "increasing" | "decreasing" | "free";
  breakpoints: number[];
  levels: number[];
  preview: FitPreviewPayload | null;
  applied: boolean;
  error: string | null;
}

export interface HeatmapViewState {
  pair: [string, string];
  metric: "range" | "relative";
  epsilon: number;
  preview: ReplacementPreviewPayload | null;
  error: string | null;
}

export interface AppState {
  sessionId: string | null;
  baseHash: string | null;
  terms: TermsPayload | null;
  evalReport: EvalPayload | null;
  curve: CurveViewState;
  heatmap: HeatmapViewState;
  pendingEdits: { univariate: object[]; interactions: object[] };
  busy: boolean;
  status: string;
}

export function initialState(): AppState {
  return {
    sessionId: null,
    baseHash: null,
    terms: null,
    evalReport: null,
    curve: {
      feature: "GWD",
      excluded: [],
      family: "sigmoid",
      direction: "free",
      breakpoints: [],
      levels: [],
      preview: null,
      applied: false,
      error: null,
    },
    heatmap: {
      pair: ["GWD", "PGA"],
      metric: "range",
      epsilon: 0.4,
      preview: null,
      error: null,
    },
    pendingEdits: { univariate: [], interactions: [] },
    busy: false,
    status: "connecting",
  };
}

export function epsilonBound(metric: "range" | "relative"): number {
  return metric === "range" ? 2.0 : 20.0;
}

export function withCurveFeature(state: AppState, feature: string): AppState {
  return {
    ...state,
    curve: { ...state.curve, feature, excluded: [], preview: null, error: null, applied: false },
  };
}

export function withCurvePreview(state: AppState, preview: FitPreviewPayload): AppState {
  return { ...state, curve: { ...state.curve, preview, error: null } };
}

export function withCurveError(state: AppState, message: string): AppState {
  return { ...state, curve: { ...state.curve, preview: null, error: message } };
}

export function withHeatmapPair(state: AppState, pair: [string, string]): AppState {
  return { ...state, heatmap: { ...state.heatmap, pair, preview: null, error: null } };
}

export function withHeatmapMetric(state: AppState, metric: "range" | "relative"): AppState {
  const epsilon = metric === "range" ? 0.4 : 6.0;
  return { ...state, heatmap: { ...state.heatmap, metric, epsilon, preview: null } };
}

export function withEpsilon(state: AppState, epsilon: number): AppState {
  const bounded = Math.max(0, Math.min(epsilonBound(state.heatmap.metric), epsilon));
  return { ...state, heatmap: { ...state.heatmap, epsilon: bounded } };
}

/** The declarative edit the current curve view would apply. */
export function curveEditPayload(curve: CurveViewState): object {
  if (curve.family === "step") {
    return {
      feature: curve.feature,
      family: "step",
      breakpoints: curve.breakpoints,
      levels: curve.levels,
    };
  }
  return {
    feature: curve.feature,
    family: "sigmoid",
    direction: curve.direction,
    excluded: curve.excluded.map(([a, b]) => [a, b]),
  };
}

export function heatmapEditPayload(heatmap: HeatmapViewState): object {
  return { pair: heatmap.pair, metric: heatmap.metric, epsilon: heatmap.epsilon };
}

/** Default edits from the published workflow, used by the "apply defaults" button. */
export function defaultEditBundle(): { univariate: object[]; interactions: object[] } {
  return {
    univariate: [
      {
        feature: "GWD",
        family: "sigmoid",
        direction: "decreasing",
        excluded: [
          [0.0, 0.7],
          [1.0, 1.5],
        ],
      },
      { feature: "PGA", family: "sigmoid", direction: "increasing", excluded: [[0.51, 99.0]] },
      { feature: "L", family: "step", breakpoints: [0.1, 0.49], levels: [1.61, 0.5, -0.36] },
    ],
    interactions: [
      { pair: ["GWD", "PGA"], metric: "range", epsilon: 0.4 },
      { pair: ["GWD", "L"], metric: "range", epsilon: 0.4 },
      { pair: ["L", "PGA"], metric: "range", epsilon: 0.4 },
    ],
  };
}
