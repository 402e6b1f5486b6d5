"""End-to-end orchestration shared by the CLI and the HTTP service."""

from __future__ import annotations

import numpy as np

from . import features as feat
from .bundle import ModelBundle
from .corpus import CorpusRecord, Table
from .discretize import MdlpConfig, fit as fit_discretizer
from .embed import TrainConfig, train
from .infer import (
    ChartRecommendation,
    assemble,
    generate_rules,
    infer_table,
    match_rules,
    rule_confidence,
    top_rules,
)
from .kg import build_graph, labeled_feature_vectors


def train_from_records(
    records: list[CorpusRecord],
    cfg: TrainConfig,
    mdlp_cfg: MdlpConfig = MdlpConfig(),
    rng: np.random.Generator | None = None,
    telemetry: list | None = None,
) -> ModelBundle:
    """Winsorize, discretize, build the graph, train, and bundle the result."""
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    cache: dict = {}
    vectors, labels = labeled_feature_vectors(records, cache)
    matrix = feat.feature_matrix(vectors)
    clipped, bounds = feat.winsorize_matrix(matrix)
    disc = fit_discretizer(clipped, [lab.vis_type for lab in labels], mdlp_cfg)
    kg = build_graph(records, disc, bounds, feature_cache=cache)
    model = train(kg, cfg, rng, telemetry=telemetry)
    return ModelBundle.assemble(model, kg, disc)


def rules_payload(bundle: ModelBundle, per_type: int = 5) -> dict:
    """Displayed rules grouped by chart type, with confidence and payloads."""
    groups = top_rules(generate_rules(bundle), per_type)
    out = {}
    for vt, rules in groups.items():
        cards = []
        for rule in rules:
            card = rule.to_json()
            card["confidence"] = rule_confidence(bundle, rule.feature_key, rule.target)
            cards.append(card)
        out[vt] = cards
    return {"groups": out, "per_type": per_type}


def recommend_table(
    bundle: ModelBundle, table: Table, k: int, per_type: int = 5
) -> dict:
    """Recommendation JSON for one table, applied rules included."""
    inferences = infer_table(bundle, table)
    recommendations = assemble(inferences, k)
    displayed = [r for rules in top_rules(generate_rules(bundle), per_type).values() for r in rules]
    payload = []
    for rec in recommendations:
        tags = match_rules(rec, inferences, displayed)
        rec.applied_rules = [
            {"rule_id": rid, "match": tag} for rid, tag in tags.items() if tag != "none"
        ]
        payload.append(rec.to_json())
    return {
        "table_id": table.id,
        "recommendations": payload,
        "columns": [
            {
                "index": i,
                "name": table.columns[i].name,
                "vis_type": inf.vis_type,
                "axis": inf.axis,
                "type_scores": inf.type_scores,
                "axis_scores": inf.axis_scores,
            }
            for i, inf in enumerate(inferences)
        ],
    }


def rule_score_matrix(bundle: ModelBundle) -> dict:
    """Feature x chart-type matrix of min-max normalized rule scores."""
    rules = [r for r in generate_rules(bundle) if r.target == "vis_type"]
    features = sorted({r.feature_key for r in rules})
    by_key = {(r.feature_key, r.choice): r.score for r in rules}
    from .corpus import VIS_TYPES

    raw = np.array([[by_key[(f, vt)] for vt in VIS_TYPES] for f in features])
    lo, hi = raw.min(), raw.max()
    norm = (raw - lo) / (hi - lo) if hi > lo else np.zeros_like(raw)
    return {
        "features": features,
        "vis_types": list(VIS_TYPES),
        "scores": norm.tolist(),
    }
