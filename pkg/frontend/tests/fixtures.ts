import {
  Recommendation,
  RecommendationsPayload,
  RuleCard,
  RulesPayload,
  TableView,
  VIS_TYPES,
} from "../src/types";

export function intervalRule(
  id: string,
  choice: string,
  interval: [number | null, number | null],
  edges?: number[],
): RuleCard {
  const binEdges = edges ?? Array.from({ length: 31 }, (_, i) => i / 10);
  return {
    rule_id: id,
    feature_key: "DF:entropy#1",
    relation_key: "rel:df:entropy",
    target: "vis_type",
    choice,
    score: -1.5,
    semantic_text: `the entropy of values in the column is in the 2nd interval → ${choice}`,
    kind: "interval",
    payload: {
      feature_id: "entropy",
      interval,
      histogram: {
        edges: binEdges,
        counts: Array.from({ length: binEdges.length - 1 }, (_, i) => (i % 7) + 1),
      },
    },
    confidence: { [choice]: 0.75, line: 0.05 },
  };
}

export function categoricalRule(id: string, choice: string): RuleCard {
  return {
    rule_id: id,
    feature_key: "CF:sorted=true",
    relation_key: "rel:cf:sorted",
    target: "vis_type",
    choice,
    score: -2.0,
    semantic_text: `values in the column are sorted → ${choice}`,
    kind: "categorical",
    payload: { description: "values in the column are sorted" },
    confidence: { [choice]: 0.5 },
  };
}

export function rulesFixture(): RulesPayload {
  const groups: Record<string, RuleCard[]> = {};
  VIS_TYPES.forEach((vt, i) => {
    groups[vt] = [
      intervalRule(`rule-df-${vt}`, vt, [0.5, 2.3], Array.from({ length: 31 }, (_, j) => j / 10)),
      categoricalRule(`rule-cf-${vt}`, vt),
    ];
    if (i === 0) {
      groups[vt].push(categoricalRule(`rule-extra-${vt}`, vt));
    }
  });
  return { groups, per_type: 5 };
}

export function tableFixture(): TableView {
  return {
    id: "demo",
    columns: ["date", "price"],
    column_types: ["temporal", "quantitative"],
    rows: [
      ["2021-01-01", 10.5],
      ["2021-01-02", 11.0],
      ["2021-01-03", 12.5],
      ["2021-01-04", 11.75],
    ],
    n_rows: 4,
  };
}

export function recommendationFixture(): Recommendation {
  return {
    rank: 1,
    vis_type: "line",
    encodings: [
      { column: 0, axis: "x" },
      { column: 1, axis: "y" },
    ],
    applied_rules: [
      { rule_id: "rule-df-line", match: "both" },
      { rule_id: "rule-cf-line", match: "x" },
    ],
  };
}

export function recommendationsFixture(): RecommendationsPayload {
  return {
    table_id: "demo",
    recommendations: [
      recommendationFixture(),
      {
        rank: 2,
        vis_type: "histogram",
        encodings: [
          { column: 0, axis: "x" },
          { column: 1, axis: "x" },
        ],
        applied_rules: [{ rule_id: "rule-df-histogram", match: "y" }],
      },
    ],
    columns: [
      { index: 0, name: "date", vis_type: "line", axis: "x" },
      { index: 1, name: "price", vis_type: "line", axis: "y" },
    ],
  };
}
