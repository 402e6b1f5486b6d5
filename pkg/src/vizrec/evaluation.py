"""Cross-validated evaluation: mean rank, Hits@2 and axis accuracy."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .corpus import VIS_TYPES, CorpusRecord
from .embed import TrainConfig
from .discretize import MdlpConfig
from .infer import infer_column
from .kg import labeled_feature_vectors
from .pipeline import train_from_records


class EvaluationError(ValueError):
    pass


@dataclass
class FoldResult:
    fold: int
    mr: float
    hits_at_2: float
    axis_accuracy: float
    n_columns: int


@dataclass
class EvalReport:
    mr: float
    hits_at_2: float
    axis_accuracy: float
    mr_fold_mean: float
    folds: list[FoldResult] = field(default_factory=list)
    config_fingerprint: str = ""

    def to_json(self) -> dict:
        return asdict(self)

    def per_fold_csv(self) -> str:
        lines = ["fold,mr,hits2,axis_acc"]
        for f in self.folds:
            lines.append("%d,%r,%r,%r" % (f.fold, f.mr, f.hits_at_2, f.axis_accuracy))
        return "\n".join(lines) + "\n"


def rank_of_truth(scores: dict[str, float], truth: str) -> float:
    """1-based descending rank; a tied block shares its mean rank."""
    missing = [vt for vt in VIS_TYPES if vt not in scores]
    if missing:
        raise EvaluationError("scores missing chart types %s" % missing)
    if truth not in scores:
        raise EvaluationError("true chart type %r absent from scores" % truth)
    s = scores[truth]
    greater = sum(1 for vt in VIS_TYPES if scores[vt] > s)
    tied = sum(1 for vt in VIS_TYPES if scores[vt] == s)
    return greater + (tied + 1) / 2.0


def metrics(ranks, axis_hits) -> dict:
    """MR, Hits@2 and axis accuracy over pooled per-column results."""
    ranks = list(ranks)
    axis_hits = list(axis_hits)
    if not ranks or not axis_hits:
        raise EvaluationError("empty evaluation inputs")
    return {
        "mr": float(np.mean(ranks)),
        "hits_at_2": float(np.mean([r <= 2 for r in ranks])),
        "axis_accuracy": float(np.mean([bool(h) for h in axis_hits])),
    }


def _config_fingerprint(cfg: TrainConfig, mdlp_cfg: MdlpConfig, folds: int) -> str:
    blob = json.dumps(
        {"train": asdict(cfg), "mdlp": asdict(mdlp_cfg), "folds": folds},
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def evaluate_records(bundle, records: list[CorpusRecord]) -> tuple[list[float], list[bool]]:
    """Ranks and axis hits for every labeled column of the given records."""
    vectors, labels = labeled_feature_vectors(records)
    ranks: list[float] = []
    hits: list[bool] = []
    for fv, label in zip(vectors, labels):
        inference = infer_column(bundle, fv)
        ranks.append(rank_of_truth(inference.type_scores, label.vis_type))
        hits.append(inference.axis == label.axis)
    return ranks, hits


def cross_validate(
    records: list[CorpusRecord],
    cfg: TrainConfig,
    folds: int = 5,
    rng: np.random.Generator | None = None,
    mdlp_cfg: MdlpConfig = MdlpConfig(),
) -> EvalReport:
    """Record-level k-fold cross-validation (no table leaks columns across folds)."""
    if len(records) < folds:
        raise EvaluationError(
            "need at least %d records for %d folds, got %d" % (folds, folds, len(records))
        )
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    order = rng.permutation(len(records))
    assignments = np.array_split(order, folds)

    all_ranks: list[float] = []
    all_hits: list[bool] = []
    fold_results: list[FoldResult] = []
    for fold, test_idx in enumerate(assignments):
        test_set = set(int(i) for i in test_idx)
        train_records = [r for i, r in enumerate(records) if i not in test_set]
        test_records = [records[int(i)] for i in test_idx]
        bundle = train_from_records(
            train_records, cfg, mdlp_cfg, np.random.default_rng(cfg.seed + fold)
        )
        ranks, hits = evaluate_records(bundle, test_records)
        if not ranks:
            raise EvaluationError("fold %d has no valid columns" % fold)
        m = metrics(ranks, hits)
        fold_results.append(
            FoldResult(fold, m["mr"], m["hits_at_2"], m["axis_accuracy"], len(ranks))
        )
        all_ranks.extend(ranks)
        all_hits.extend(hits)

    pooled = metrics(all_ranks, all_hits)
    return EvalReport(
        mr=pooled["mr"],
        hits_at_2=pooled["hits_at_2"],
        axis_accuracy=pooled["axis_accuracy"],
        mr_fold_mean=float(np.mean([f.mr for f in fold_results])),
        folds=fold_results,
        config_fingerprint=_config_fingerprint(cfg, mdlp_cfg, folds),
    )
