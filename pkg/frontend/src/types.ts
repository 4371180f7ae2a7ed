/** Payload types mirrored from the editing service's HTTP contract. */

export interface UnivariateTermPayload {
  feature: string;
  cuts: number[];
  scores: number[];
  train_weight: number[];
  train_range: [number, number];
  edited: boolean;
}

export interface InteractionTermPayload {
  pair: [string, string];
  cuts_x: number[];
  cuts_y: number[];
  matrix: number[][];
  train_weight: number[][];
  edited: boolean;
}

export interface TermsPayload {
  intercept: number;
  provenance: string;
  univariate: UnivariateTermPayload[];
  interactions: InteractionTermPayload[];
  model_hash: string;
}

export interface FitPreviewPayload {
  feature: string;
  replacement: Record<string, unknown>;
  sse: number;
  sampled: [number, number][];
  selected: boolean[];
  fitted: number[];
}

export interface ReplacementPreviewPayload {
  pair: [string, string];
  metric: string;
  epsilon: number;
  mask: number[][];
  replaced_fraction: number;
  synth_rescaled: number[][];
  original: number[][];
  delta_stats: {
    min: number | null;
    max: number | null;
    mean: number | null;
    infinite_cells: number;
  };
}

export interface SplitMetrics {
  accuracy: number;
  precision: number;
  recall: number;
  f1: number;
  auc: number;
}

export interface EvalPayload {
  base: Record<string, SplitMetrics>;
  working: Record<string, SplitMetrics>;
  delta: Record<string, SplitMetrics>;
}

export interface ExplanationPayload {
  site_id: number;
  intercept: number;
  contributions: [string, number][];
  score: number;
  probability: number;
  label: number;
}

export interface SessionInfo {
  session_id: string;
  model_hash: string;
  feature_names: string[];
  n_terms: number;
}

export type Interval = [number, number];
