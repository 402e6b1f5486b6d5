"""Supervised discretization of continuous features (Fayyad-Irani MDLP).

Each continuous feature is cut into intervals by recursive binary splitting.
Candidate cuts are midpoints between adjacent sorted distinct values whose
label sets differ; the best candidate (minimum class-weighted entropy, ties
to the smallest cut) is kept only when its information gain clears the MDL
stopping criterion and both proportion constraints hold. Intervals are
half-open, lower-inclusive, and extend to +-infinity so every real maps to
an interval.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .corpus import VIS_TYPES

# Makes "child holds exactly the minimum fraction" inclusive under float
# rounding (e.g. 0.05 * 600 evaluates slightly above 30).
_FRACTION_EPS = 1e-9


@dataclass(frozen=True)
class MdlpConfig:
    min_split_fraction: float = 0.1
    min_interval_fraction: float = 0.05

    def __post_init__(self):
        if not 0 < self.min_interval_fraction <= self.min_split_fraction < 1:
            raise ValueError(
                "need 0 < min_interval_fraction <= min_split_fraction < 1, got %r"
                % (self,)
            )


@dataclass
class Discretizer:
    """Fitted per-feature cut points. Interval count m = len(cuts) + 1.

    m is bounded by floor(1 / min_interval_fraction) through the child-size
    constraint (20 under the default configuration).
    """

    cuts: dict[str, tuple[float, ...]] = field(default_factory=dict)
    label_domain: tuple[str, ...] = VIS_TYPES

    def feature_ids(self) -> list[str]:
        return list(self.cuts)

    def n_intervals(self, feature_id: str) -> int:
        return len(self._cuts_for(feature_id)) + 1

    def assign(self, value: float, feature_id: str) -> int:
        """Interval index of ``value``: count of cut points <= value."""
        return bisect_right(self._cuts_for(feature_id), value)

    def interval_bounds(self, feature_id: str, index: int) -> tuple[float, float]:
        """[lo, hi) of one interval, using +-inf at the open ends."""
        cuts = self._cuts_for(feature_id)
        if not 0 <= index <= len(cuts):
            raise KeyError(
                "interval %d out of range for %s (m=%d)"
                % (index, feature_id, len(cuts) + 1)
            )
        lo = cuts[index - 1] if index > 0 else -math.inf
        hi = cuts[index] if index < len(cuts) else math.inf
        return lo, hi

    def _cuts_for(self, feature_id: str) -> tuple[float, ...]:
        try:
            return self.cuts[feature_id]
        except KeyError:
            raise KeyError("discretizer not fitted for feature %r" % feature_id) from None

    def to_json(self) -> dict:
        return {fid: {"cuts": list(c)} for fid, c in self.cuts.items()}

    @classmethod
    def from_json(cls, obj: dict) -> "Discretizer":
        return cls(cuts={fid: tuple(spec["cuts"]) for fid, spec in obj.items()})


def _entropy(counts: np.ndarray) -> float:
    """Class entropy in bits."""
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def _mdl_accepts(seg: np.ndarray, left: np.ndarray, right: np.ndarray) -> bool:
    n = int(seg.sum())
    ent = _entropy(seg)
    ent_l, ent_r = _entropy(left), _entropy(right)
    n_l, n_r = int(left.sum()), int(right.sum())
    gain = ent - (n_l * ent_l + n_r * ent_r) / n
    k = int((seg > 0).sum())
    k_l = int((left > 0).sum())
    k_r = int((right > 0).sum())
    delta = math.log2(3**k - 2) - (k * ent - k_l * ent_l - k_r * ent_r)
    return gain > (math.log2(n - 1) + delta) / n


def mdlp_cuts(values, labels, cfg: MdlpConfig = MdlpConfig()) -> list[float]:
    """Cut points for one feature given per-sample class labels."""
    values = np.asarray(values, dtype=float)
    label_ids, _ = _encode_labels(labels)
    if values.size != label_ids.size:
        raise ValueError(
            "values/labels length mismatch: %d vs %d" % (values.size, label_ids.size)
        )
    if values.size == 0:
        raise ValueError("empty input")

    order = np.argsort(values, kind="stable")
    sv = values[order]
    sl = label_ids[order]
    n_total = sv.size
    n_classes = int(sl.max()) + 1

    # prefix[i] = class counts of the first i sorted samples
    prefix = np.zeros((n_total + 1, n_classes), dtype=np.int64)
    np.add.at(prefix, (np.arange(1, n_total + 1), sl), 1)
    prefix = np.cumsum(prefix, axis=0)

    # distinct-value group starts and each group's label set
    starts = np.flatnonzero(np.r_[True, sv[1:] != sv[:-1]])
    group_ends = np.r_[starts[1:], n_total]
    group_sets = [
        frozenset(sl[s:e].tolist()) for s, e in zip(starts, group_ends)
    ]

    min_split = cfg.min_split_fraction * n_total - _FRACTION_EPS
    min_child = cfg.min_interval_fraction * n_total - _FRACTION_EPS

    cuts: list[float] = []
    stack = [(0, n_total)]
    while stack:
        lo, hi = stack.pop()
        size = hi - lo
        if size < min_split:
            continue
        seg = prefix[hi] - prefix[lo]
        best = None  # (weighted_entropy, cut_value, split_index)
        gi_lo = int(np.searchsorted(starts, lo))
        gi_hi = int(np.searchsorted(starts, hi))
        for gi in range(gi_lo, gi_hi - 1):
            if group_sets[gi] == group_sets[gi + 1]:
                continue
            split = int(starts[gi + 1])
            left = prefix[split] - prefix[lo]
            right = seg - left
            weighted = (
                left.sum() * _entropy(left) + right.sum() * _entropy(right)
            ) / size
            cut_value = (sv[split - 1] + sv[split]) / 2.0
            if best is None or weighted < best[0] or (
                weighted == best[0] and cut_value < best[1]
            ):
                best = (weighted, cut_value, split)
        if best is None:
            continue
        _, cut_value, split = best
        left = prefix[split] - prefix[lo]
        right = seg - left
        if left.sum() < min_child or right.sum() < min_child:
            continue
        if not _mdl_accepts(seg, left, right):
            continue
        cuts.append(cut_value)
        stack.append((lo, split))
        stack.append((split, hi))
    return sorted(cuts)


def fit(
    matrix: dict[str, np.ndarray],
    labels,
    cfg: MdlpConfig = MdlpConfig(),
) -> Discretizer:
    """Independent mdlp_cuts per feature over the winsorized training matrix."""
    labels = list(labels)
    cuts: dict[str, tuple[float, ...]] = {}
    for fid, vals in matrix.items():
        vals = np.asarray(vals, dtype=float)
        if vals.size != len(labels):
            raise ValueError(
                "feature %r has %d rows, labels have %d" % (fid, vals.size, len(labels))
            )
        cuts[fid] = tuple(mdlp_cuts(vals, labels, cfg))
    return Discretizer(cuts=cuts)


def _encode_labels(labels) -> tuple[np.ndarray, list]:
    seen: dict = {}
    ids = []
    for lab in labels:
        if lab not in seen:
            seen[lab] = len(seen)
        ids.append(seen[lab])
    return np.asarray(ids, dtype=np.int64), list(seen)
