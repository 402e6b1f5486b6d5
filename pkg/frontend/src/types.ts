export type VisType = "bar" | "box" | "heatmap" | "histogram" | "line" | "scatter";
export type Axis = "x" | "y";
export type MatchTag = "x" | "y" | "both" | "none";

export const VIS_TYPES: VisType[] = ["bar", "box", "heatmap", "histogram", "line", "scatter"];

export interface DatasetSummary {
  id: string;
  name: string;
  n_columns: number;
  n_rows: number;
}

export interface TableView {
  id: string;
  columns: string[];
  column_types: string[];
  rows: (string | number | null)[][];
  n_rows: number;
}

export interface Histogram {
  edges: number[];
  counts: number[];
}

export interface RulePayload {
  interval?: [number | null, number | null];
  histogram?: Histogram;
  description?: string;
  feature_id?: string;
}

export interface RuleCard {
  rule_id: string;
  feature_key: string;
  relation_key: string;
  target: string;
  choice: string;
  score: number;
  semantic_text: string;
  kind: "interval" | "categorical";
  payload: RulePayload;
  confidence: Record<string, number>;
}

export interface RulesPayload {
  groups: Record<string, RuleCard[]>;
  per_type: number;
}

export interface Encoding {
  column: number;
  axis: Axis;
}

export interface AppliedRule {
  rule_id: string;
  match: "x" | "y" | "both";
}

export interface Recommendation {
  rank: number;
  vis_type: VisType;
  encodings: Encoding[];
  applied_rules: AppliedRule[];
}

export interface ColumnInferenceView {
  index: number;
  name: string;
  vis_type: VisType;
  axis: Axis;
}

export interface RecommendationsPayload {
  table_id: string;
  recommendations: Recommendation[];
  columns: ColumnInferenceView[];
}
