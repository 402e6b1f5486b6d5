"""Rule extraction and chart recommendation from a trained model.

A rule "feature -> design choice" is scored by translating twice: the
feature entity is moved along its own relation to an imaginary column, then
along the target relation, and the result is compared against the design
choice entity. Per-column recommendation aggregates the rules whose
conditions the column fulfills.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bundle import ModelBundle
from .corpus import AXES, VIS_TYPES, Table
from .embed import EmbeddingModel, _scores, _softmax
from .features import (
    CATEGORICAL_BY_ID,
    CONTINUOUS_BY_ID,
    FeatureVector,
    extract_features,
)
from .kg import (
    REL_AXIS,
    REL_VIS_TYPE,
    axis_entity_key,
    cf_entity_key,
    df_entity_key,
    vis_entity_key,
)

# Chart types that Plotly-style grammars specify on a single axis, and the
# axis each one conventionally uses.
SINGLE_AXIS_TYPES = {"histogram": "x", "box": "y"}

TARGETS = ("vis_type", "axis")


class InferenceError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    rule_id: str
    feature_key: str
    relation_key: str
    target: str  # "vis_type" | "axis"
    choice: str
    score: float
    semantic_text: str
    kind: str  # "interval" | "categorical"
    payload: dict

    def to_json(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "feature_key": self.feature_key,
            "relation_key": self.relation_key,
            "target": self.target,
            "choice": self.choice,
            "score": self.score,
            "semantic_text": self.semantic_text,
            "kind": self.kind,
            "payload": self.payload,
        }


@dataclass
class ColumnInference:
    column_ref: tuple[str, int]
    matched_keys: list[str]
    skipped_keys: list[str]
    type_scores: dict[str, float]
    axis_scores: dict[str, float]
    vis_type: str
    axis: str


@dataclass
class ChartRecommendation:
    rank: int
    vis_type: str
    encodings: list[dict]  # {"column": index, "axis": "x"|"y"}
    applied_rules: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "vis_type": self.vis_type,
            "encodings": self.encodings,
            "applied_rules": self.applied_rules,
        }


# ---------------------------------------------------------------------------
# rule scoring
# ---------------------------------------------------------------------------

def _materialize_imaginary(model: EmbeddingModel, f_vec: np.ndarray, r_vec: np.ndarray) -> np.ndarray:
    """Embedding of the imaginary column reached from a feature entity."""
    if model.scorer == "transe":
        return f_vec + r_vec
    d2 = r_vec.shape[-1]
    fre, fim = f_vec[..., :d2], f_vec[..., d2:]
    c, s = np.cos(r_vec), np.sin(r_vec)
    return np.concatenate([fre * c - fim * s, fre * s + fim * c], axis=-1)


def _score_vec_triple(model: EmbeddingModel, h_vec: np.ndarray, r_id, t_id) -> np.ndarray:
    """score() with an explicit head vector instead of an entity id."""
    E = np.atleast_2d(h_vec)
    h = np.arange(E.shape[0])
    r = np.broadcast_to(np.asarray(r_id), h.shape)
    g = _scores_mixed(E, model.entity_vecs, model.relation_vecs, h, r,
                      np.broadcast_to(np.asarray(t_id), h.shape), model.scorer, model.norm)
    return g


def _scores_mixed(H, E, R, h, r, t, scorer, norm):
    """Triple scores where heads index H while tails index E."""
    if scorer == "transe":
        u = H[h] + R[r] - E[t]
        if norm == "L2":
            return -np.sqrt(np.einsum("...d,...d->...", u, u))
        return -np.abs(u).sum(axis=-1)
    d2 = R.shape[1]
    eh, et = H[h], E[t]
    hre, him = eh[..., :d2], eh[..., d2:]
    theta = R[r]
    c, s = np.cos(theta), np.sin(theta)
    ure = hre * c - him * s - et[..., :d2]
    uim = hre * s + him * c - et[..., d2:]
    if norm == "L2":
        return -np.sqrt(
            np.einsum("...d,...d->...", ure, ure)
            + np.einsum("...d,...d->...", uim, uim)
        )
    return -(np.abs(ure).sum(axis=-1) + np.abs(uim).sum(axis=-1))


def _target_relation_id(bundle: ModelBundle, target: str) -> int:
    if target == "vis_type":
        return bundle.relation_id(REL_VIS_TYPE)
    if target == "axis":
        return bundle.relation_id(REL_AXIS)
    raise InferenceError("unknown target relation %r" % target)


def _choices(target: str) -> tuple[str, ...]:
    return VIS_TYPES if target == "vis_type" else AXES


def _choice_entity_id(bundle: ModelBundle, target: str, choice: str) -> int:
    key = vis_entity_key(choice) if target == "vis_type" else axis_entity_key(choice)
    eid = bundle.entity_id(key)
    if eid is None:
        raise InferenceError("design choice %r missing from the model" % key)
    return eid


def rule_score(bundle: ModelBundle, feature_key: str, target: str, choice: str) -> float:
    """Score of one rule via the double translation."""
    f_id = bundle.entity_id(feature_key)
    if f_id is None or not feature_key.startswith(("CF:", "DF:")):
        raise InferenceError("%r is not a feature entity of this model" % feature_key)
    model = bundle.model
    r_j = bundle.associated_relation_id(feature_key)
    imag = _materialize_imaginary(
        model, model.entity_vecs[f_id], model.relation_vecs[r_j]
    )
    g = _score_vec_triple(
        model, imag, _target_relation_id(bundle, target),
        _choice_entity_id(bundle, target, choice),
    )
    return float(g[0])


# ---------------------------------------------------------------------------
# rule rendering
# ---------------------------------------------------------------------------

_NAME_TOKEN_TEXT = {"digit": "a digit", "whitespace": "whitespace"}

_BOOL_FALSE_TEXT = {
    "sorted": "values in the column are not sorted",
    "monotonic": "values in the column are not monotonic",
    "linear_space": "values in the column are not in linear space",
    "log_space": "values in the column are not in log space",
    "unique": "values in the column are not unique",
    "has_missing": "no missing values are in the column",
    "only_column": "the column is not the only column in the dataset",
}


def _ordinal(n: int) -> str:
    if 10 <= n % 100 <= 20:
        suffix = "th"
    else:
        suffix = {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")
    return "%d%s" % (n, suffix)


def _format_bound(v: float) -> str:
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return "%.6g" % v


def condition_text(feature_key: str, bundle: ModelBundle | None = None) -> str:
    """Human-readable condition of a rule, from the entity key alone."""
    cls, _, rest = feature_key.partition(":")
    if cls == "CF":
        fid, _, token = rest.partition("=")
        feat = CATEGORICAL_BY_ID[fid]
        if feat.kind == "boolean":
            return feat.description if token == "true" else _BOOL_FALSE_TEXT[fid]
        if fid == "name_contains":
            shown = _NAME_TOKEN_TEXT.get(token, '"%s"' % token)
            return feat.description.format(v=shown)
        if fid == "starts_with":
            return feat.description.format(v="an upper" if token == "upper" else "a lower")
        return feat.description.format(v=token)
    if cls == "DF":
        fid, _, idx = rest.rpartition("#")
        k = int(idx)
        desc = CONTINUOUS_BY_ID[fid].description
        if bundle is not None:
            lo, hi = bundle.discretizer.interval_bounds(fid, k)
            return "%s is in the %s interval [%s, %s)" % (
                desc, _ordinal(k + 1), _format_bound(lo), _format_bound(hi),
            )
        return "%s is in the %s interval" % (desc, _ordinal(k + 1))
    raise InferenceError("%r is not a feature entity key" % feature_key)


def _choice_text(target: str, choice: str) -> str:
    return choice if target == "vis_type" else "%s-axis" % choice


def _rule_payload(bundle: ModelBundle, feature_key: str) -> tuple[str, dict]:
    cls, _, rest = feature_key.partition(":")
    if cls == "DF":
        fid, _, idx = rest.rpartition("#")
        k = int(idx)
        lo, hi = bundle.discretizer.interval_bounds(fid, k)
        hist = bundle.histograms.get(fid, {"edges": [], "counts": []})
        return "interval", {
            "feature_id": fid,
            "interval": [None if math.isinf(lo) else lo, None if math.isinf(hi) else hi],
            "histogram": hist,
        }
    return "categorical", {"description": condition_text(feature_key)}


def generate_rules(bundle: ModelBundle) -> list[Rule]:
    """Every (feature entity) x (target relation) x (compatible choice) rule."""
    rules: list[Rule] = []
    model = bundle.model
    feature_keys = bundle.feature_entity_keys()
    if not feature_keys:
        return rules
    f_ids = np.asarray([bundle.entity_id(k) for k in feature_keys])
    r_ids = np.asarray([bundle.associated_relation_id(k) for k in feature_keys])
    imag = _materialize_imaginary(
        model, model.entity_vecs[f_ids], model.relation_vecs[r_ids]
    )
    payloads = {key: _rule_payload(bundle, key) for key in feature_keys}
    conditions = {key: condition_text(key, bundle) for key in feature_keys}
    for target in TARGETS:
        rt = _target_relation_id(bundle, target)
        for choice in _choices(target):
            v_id = _choice_entity_id(bundle, target, choice)
            scores = _score_vec_triple(model, imag, rt, v_id)
            for key, s in zip(feature_keys, scores):
                kind, payload = payloads[key]
                rules.append(
                    Rule(
                        rule_id="%s|%s|%s" % (key, target, choice),
                        feature_key=key,
                        relation_key=bundle.relation_keys[bundle.associated_relation_id(key)],
                        target=target,
                        choice=choice,
                        score=float(s),
                        semantic_text="%s → %s"
                        % (conditions[key], _choice_text(target, choice)),
                        kind=kind,
                        payload=payload,
                    )
                )
    return rules


def rule_confidence(bundle: ModelBundle, feature_key: str, target: str) -> dict[str, float]:
    """Softmax over one feature's rule scores across compatible choices."""
    choices = _choices(target)
    scores = np.asarray([rule_score(bundle, feature_key, target, c) for c in choices])
    probs = _softmax(scores)
    return {c: float(p) for c, p in zip(choices, probs)}


def top_rules(rules: list[Rule], per_type: int) -> dict[str, list[Rule]]:
    """Keep each feature's single best chart-type rule, then the strongest
    per_type survivors of every chart type."""
    if per_type < 1:
        raise InferenceError("per_type must be >= 1")
    best: dict[str, Rule] = {}
    for rule in rules:
        if rule.target != "vis_type":
            continue
        cur = best.get(rule.feature_key)
        if cur is None or rule.score > cur.score:
            best[rule.feature_key] = rule
    groups: dict[str, list[Rule]] = {vt: [] for vt in VIS_TYPES}
    for rule in best.values():
        groups[rule.choice].append(rule)
    for vt in VIS_TYPES:
        groups[vt].sort(key=lambda r: (-r.score, r.rule_id))
        groups[vt] = groups[vt][:per_type]
    return groups


# ---------------------------------------------------------------------------
# per-column inference
# ---------------------------------------------------------------------------

def aggregate_score(rule_scores) -> float:
    """Mean rule score over the features a column fulfills."""
    arr = np.asarray(list(rule_scores), dtype=float)
    if arr.size == 0:
        raise InferenceError("no features matched")
    return float(arr.mean())


def _argmax_choice(scores: dict[str, float], order) -> str:
    return max(order, key=lambda c: (scores[c], -order.index(c)))


def matched_entity_keys(fv: FeatureVector, bundle: ModelBundle) -> tuple[list[str], list[str]]:
    """Winsorize, discretize and match one column's features to the model.

    Returns (matched keys, skipped keys); skipped keys were never seen in
    training so they have no embedding.
    """
    keys = [cf_entity_key(cv.feature_id, cv.value) for cv in fv.categoricals]
    disc = bundle.discretizer
    for cv in fv.continuous:
        bound = bundle.bounds.get(cv.feature_id)
        value = cv.value if bound is None else min(max(cv.value, bound[0]), bound[1])
        keys.append(df_entity_key(cv.feature_id, disc.assign(value, cv.feature_id)))
    matched = [k for k in keys if bundle.entity_id(k) is not None]
    skipped = [k for k in keys if bundle.entity_id(k) is None]
    return matched, skipped


def infer_column(bundle: ModelBundle, fv: FeatureVector) -> ColumnInference:
    """Design-choice scores and argmax picks for one new column."""
    matched, skipped = matched_entity_keys(fv, bundle)
    if not matched:
        raise InferenceError(
            "no features of column %s matched the training graph" % (fv.column_ref,)
        )
    if skipped:
        warnings.warn(
            "column %s: %d features unseen in training were skipped"
            % (fv.column_ref, len(skipped)),
            stacklevel=2,
        )
    model = bundle.model
    f_ids = np.asarray([bundle.entity_id(k) for k in matched])
    r_ids = np.asarray([bundle.associated_relation_id(k) for k in matched])
    imag = _materialize_imaginary(model, model.entity_vecs[f_ids], model.relation_vecs[r_ids])

    all_scores: dict[str, dict[str, float]] = {}
    for target in TARGETS:
        rt = _target_relation_id(bundle, target)
        per_choice = {}
        for choice in _choices(target):
            v_id = _choice_entity_id(bundle, target, choice)
            g = _score_vec_triple(model, imag, rt, v_id)
            per_choice[choice] = aggregate_score(g)
        all_scores[target] = per_choice

    return ColumnInference(
        column_ref=fv.column_ref,
        matched_keys=matched,
        skipped_keys=skipped,
        type_scores=all_scores["vis_type"],
        axis_scores=all_scores["axis"],
        vis_type=_argmax_choice(all_scores["vis_type"], VIS_TYPES),
        axis=_argmax_choice(all_scores["axis"], AXES),
    )


def infer_table(bundle: ModelBundle, table: Table) -> list[ColumnInference]:
    out = []
    for idx, col in enumerate(table.columns):
        fv = extract_features(col, table, idx)
        out.append(infer_column(bundle, fv))
    return out


# ---------------------------------------------------------------------------
# assembling recommendations
# ---------------------------------------------------------------------------

def assemble(inferences: list[ColumnInference], k: int) -> list[ChartRecommendation]:
    """Top-k dataset-level chart types with valid axis placements.

    Single-axis chart types place every column on their one axis. Two-axis
    types use the per-column inferred axes; when a multi-column table ends up
    entirely on one axis, the column with the weakest winning margin flips so
    both axes are populated.
    """
    if not inferences:
        raise InferenceError("no column inferences to assemble")
    if k < 1:
        raise InferenceError("k must be >= 1")
    if k > len(VIS_TYPES):
        warnings.warn("k=%d clamped to %d chart types" % (k, len(VIS_TYPES)), stacklevel=2)
        k = len(VIS_TYPES)

    dataset_scores = {
        vt: float(np.mean([inf.type_scores[vt] for inf in inferences]))
        for vt in VIS_TYPES
    }
    ranked = sorted(VIS_TYPES, key=lambda vt: (-dataset_scores[vt], VIS_TYPES.index(vt)))

    recs = []
    for rank, vt in enumerate(ranked[:k], start=1):
        if vt in SINGLE_AXIS_TYPES:
            axis = SINGLE_AXIS_TYPES[vt]
            encodings = [{"column": i, "axis": axis} for i in range(len(inferences))]
        else:
            axes = [inf.axis for inf in inferences]
            if len(inferences) > 1 and len(set(axes)) == 1:
                margins = [
                    abs(inf.axis_scores["x"] - inf.axis_scores["y"]) for inf in inferences
                ]
                weakest = int(np.argmin(margins))
                axes[weakest] = "y" if axes[weakest] == "x" else "x"
            encodings = [{"column": i, "axis": ax} for i, ax in enumerate(axes)]
        recs.append(ChartRecommendation(rank=rank, vis_type=vt, encodings=encodings))
    return recs


def match_rules(
    recommendation: ChartRecommendation,
    inferences: list[ColumnInference],
    displayed_rules: list[Rule],
) -> dict[str, str]:
    """Tag each displayed rule with the axes whose columns fulfill it."""
    matched_by_col = [set(inf.matched_keys) for inf in inferences]
    col_axis = {enc["column"]: enc["axis"] for enc in recommendation.encodings}
    tags: dict[str, str] = {}
    for rule in displayed_rules:
        if rule.choice != recommendation.vis_type or rule.target != "vis_type":
            tags[rule.rule_id] = "none"
            continue
        axes = {
            col_axis[i]
            for i in col_axis
            if rule.feature_key in matched_by_col[i]
        }
        if axes == {"x", "y"}:
            tags[rule.rule_id] = "both"
        elif axes == {"y"}:
            tags[rule.rule_id] = "y"
        elif axes == {"x"}:
            tags[rule.rule_id] = "x"
        else:
            tags[rule.rule_id] = "none"
    return tags
