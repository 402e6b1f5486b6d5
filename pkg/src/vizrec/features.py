"""Per-column feature extraction and training-set winsorization.

Two families of features are produced for every typed column: categorical
tokens (type flags, name substrings, outlier criteria, normality levels,
boolean properties) and 50 continuous statistics. The continuous registry is
versioned; entity keys derived from it are only comparable across runs that
share the registry version.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .corpus import DataColumn, Table, epoch_to_iso

REGISTRY_VERSION = "reg-v1"

NAME_TOKENS = ("x", "y", "time", "digit", "whitespace", "$", "€", "£", "¥")
OUTLIER_CRITERIA = ("1.5IQR", "3IQR", "3Std", "(1%,99%)")
NORMALITY_LEVELS = ("p<0.01", "p<0.05")
BOOLEAN_FEATURES = (
    "sorted",
    "monotonic",
    "linear_space",
    "log_space",
    "unique",
    "has_missing",
    "only_column",
)

# Distinguishes a fit so close to exact that float noise is the only residual.
_EXACT_FIT_TOL = 1e-9


@dataclass(frozen=True)
class CategoricalFeature:
    feature_id: str
    kind: str  # "closed" | "boolean" | "presence"
    tokens: tuple[str, ...]
    description: str


@dataclass(frozen=True)
class ContinuousFeature:
    feature_id: str
    description: str
    numeric_only: bool = False


CATEGORICAL_FEATURES: tuple[CategoricalFeature, ...] = (
    CategoricalFeature("general_type", "closed", ("categorical", "quantitative", "temporal"),
                       "the general type of values in the column is {v}"),
    CategoricalFeature("specific_type", "closed", ("string", "integer", "decimal", "datetime"),
                       "the specific type of values in the column is {v}"),
    CategoricalFeature("name_contains", "presence", NAME_TOKENS,
                       "the column name contains {v}"),
    CategoricalFeature("outlier_by", "presence", OUTLIER_CRITERIA,
                       "outliers exist in the column by the {v} rule"),
    CategoricalFeature("normal_at", "presence", NORMALITY_LEVELS,
                       "values in the column are normal at {v}"),
    CategoricalFeature("sorted", "boolean", ("true", "false"),
                       "values in the column are sorted"),
    CategoricalFeature("monotonic", "boolean", ("true", "false"),
                       "values in the column are monotonic"),
    CategoricalFeature("linear_space", "boolean", ("true", "false"),
                       "values in the column are in linear space"),
    CategoricalFeature("log_space", "boolean", ("true", "false"),
                       "values in the column are in log space"),
    CategoricalFeature("unique", "boolean", ("true", "false"),
                       "values in the column are unique"),
    CategoricalFeature("has_missing", "boolean", ("true", "false"),
                       "missing values are in the column"),
    CategoricalFeature("only_column", "boolean", ("true", "false"),
                       "the column is the only column in the dataset"),
    CategoricalFeature("starts_with", "closed", ("upper", "lower"),
                       "the column name starts with {v} case"),
)

CONTINUOUS_FEATURES: tuple[ContinuousFeature, ...] = (
    ContinuousFeature("length", "the number of rows in the column"),
    ContinuousFeature("n_values", "the number of present values in the column"),
    ContinuousFeature("n_unique", "the number of unique values in the column"),
    ContinuousFeature("pct_unique", "the share of unique values in the column"),
    ContinuousFeature("pct_missing", "the share of missing values in the column"),
    ContinuousFeature("mean", "the mean of values in the column", True),
    ContinuousFeature("median", "the median of values in the column", True),
    ContinuousFeature("min", "the minimum of values in the column", True),
    ContinuousFeature("max", "the maximum of values in the column", True),
    ContinuousFeature("range", "the range of values in the column", True),
    ContinuousFeature("variance", "the variance of values in the column", True),
    ContinuousFeature("std", "the standard deviation of values in the column", True),
    ContinuousFeature("skewness", "the skewness of values in the column", True),
    ContinuousFeature("kurtosis", "the kurtosis of values in the column", True),
    ContinuousFeature("moment_5", "the 5th central moment of values in the column", True),
    ContinuousFeature("moment_6", "the 6th central moment of values in the column", True),
    ContinuousFeature("moment_7", "the 7th central moment of values in the column", True),
    ContinuousFeature("moment_8", "the 8th central moment of values in the column", True),
    ContinuousFeature("moment_9", "the 9th central moment of values in the column", True),
    ContinuousFeature("moment_10", "the 10th central moment of values in the column", True),
    ContinuousFeature("percentile_10", "the 10th percentile of values in the column", True),
    ContinuousFeature("percentile_25", "the 25th percentile of values in the column", True),
    ContinuousFeature("percentile_75", "the 75th percentile of values in the column", True),
    ContinuousFeature("percentile_90", "the 90th percentile of values in the column", True),
    ContinuousFeature("iqr", "the interquartile range of values in the column", True),
    ContinuousFeature("entropy", "the entropy of values in the column"),
    ContinuousFeature("gini", "the concentration (Gini impurity) of values in the column"),
    ContinuousFeature("normality_statistic", "the normality test statistic of values in the column", True),
    ContinuousFeature("outlier_pct_1_5iqr", "the share of values outside the 1.5IQR fences", True),
    ContinuousFeature("outlier_pct_3iqr", "the share of values outside the 3IQR fences", True),
    ContinuousFeature("outlier_pct_3std", "the share of values outside mean±3 std", True),
    ContinuousFeature("outlier_pct_1_99", "the share of values outside the 1%/99% quantiles", True),
    ContinuousFeature("sortedness", "the sortedness of values in the column"),
    ContinuousFeature("linear_fit_error", "the linear-space fit error of values in the column", True),
    ContinuousFeature("log_fit_error", "the log-space fit error of values in the column", True),
    ContinuousFeature("mean_abs_dev", "the mean absolute deviation of values in the column", True),
    ContinuousFeature("median_abs_dev", "the median absolute deviation of values in the column", True),
    ContinuousFeature("coeff_variation", "the coefficient of variation of values in the column", True),
    ContinuousFeature("value_len_min", "the minimum text length of values in the column"),
    ContinuousFeature("value_len_max", "the maximum text length of values in the column"),
    ContinuousFeature("value_len_mean", "the mean text length of values in the column"),
    ContinuousFeature("value_len_std", "the text-length spread of values in the column"),
    ContinuousFeature("name_length", "the number of characters in the column name"),
    ContinuousFeature("name_word_count", "the number of words in the column name"),
    ContinuousFeature("name_digit_count", "the number of digits in the column name"),
    ContinuousFeature("name_upper_ratio", "the share of upper-case characters in the column name"),
    ContinuousFeature("sorted_gap_mean", "the mean gap between consecutive sorted unique values", True),
    ContinuousFeature("pct_mode", "the share of values equal to the most common value"),
    ContinuousFeature("mode_freq", "the count of the most common value in the column"),
    ContinuousFeature("n_distinct_value_lengths", "the number of distinct text lengths in the column"),
)

assert len(CONTINUOUS_FEATURES) == 50

CONTINUOUS_IDS = tuple(f.feature_id for f in CONTINUOUS_FEATURES)
CONTINUOUS_BY_ID = {f.feature_id: f for f in CONTINUOUS_FEATURES}
CATEGORICAL_BY_ID = {f.feature_id: f for f in CATEGORICAL_FEATURES}


@dataclass(frozen=True)
class CategoricalFeatureValue:
    feature_id: str
    value: str

    def __post_init__(self):
        feat = CATEGORICAL_BY_ID.get(self.feature_id)
        if feat is None:
            raise ValueError("unknown categorical feature %r" % self.feature_id)
        if self.value not in feat.tokens:
            raise ValueError(
                "token %r not in %s's vocabulary" % (self.value, self.feature_id)
            )


@dataclass(frozen=True)
class ContinuousFeatureValue:
    feature_id: str
    value: float
    neutral: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.feature_id not in CONTINUOUS_BY_ID:
            raise ValueError("unknown continuous feature %r" % self.feature_id)
        if not math.isfinite(self.value):
            raise ValueError("non-finite value for %s" % self.feature_id)


@dataclass(frozen=True)
class FeatureVector:
    column_ref: tuple[str, int]
    categoricals: tuple[CategoricalFeatureValue, ...]
    continuous: tuple[ContinuousFeatureValue, ...]

    @property
    def neutral_ids(self) -> frozenset[str]:
        """Continuous entries that were undefined and neutral-filled with 0."""
        return frozenset(v.feature_id for v in self.continuous if v.neutral)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _cell_text(cell) -> str:
    if cell.kind == "text":
        return cell.value
    if cell.raw is not None:
        return cell.raw
    if cell.kind == "integer":
        return str(cell.value)
    if cell.kind == "decimal":
        return repr(cell.value)
    return epoch_to_iso(cell.value)


def numeric_values(col: DataColumn) -> np.ndarray | None:
    """Float view of the column: numbers, or epoch seconds for temporal."""
    if col.general_type == "categorical":
        return None
    vals = [float(c.value) for c in col.values if not c.is_missing]
    return np.asarray(vals, dtype=float)


def comparable_values(col: DataColumn) -> list:
    """Non-missing values under the column's natural ordering."""
    if col.general_type == "categorical":
        return [c.value for c in col.values if not c.is_missing]
    return [float(c.value) for c in col.values if not c.is_missing]


def _outlier_mask(vals: np.ndarray, criterion: str) -> np.ndarray:
    if criterion in ("1.5IQR", "3IQR"):
        mult = 1.5 if criterion == "1.5IQR" else 3.0
        q25, q75 = np.quantile(vals, [0.25, 0.75])
        iqr = q75 - q25
        lo, hi = q25 - mult * iqr, q75 + mult * iqr
    elif criterion == "3Std":
        mu, sd = vals.mean(), vals.std()
        lo, hi = mu - 3 * sd, mu + 3 * sd
    elif criterion == "(1%,99%)":
        lo, hi = np.quantile(vals, [0.01, 0.99])
    else:
        raise ValueError("unknown outlier criterion %r" % criterion)
    return (vals < lo) | (vals > hi)


def _normality_test(vals: np.ndarray) -> tuple[float, float] | None:
    """D'Agostino-Pearson omnibus (statistic, pvalue); None when undefined."""
    if vals.size < 8 or np.ptp(vals) == 0:
        return None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            stat, pval = stats.normaltest(vals)
        except Exception:
            return None
    if not (math.isfinite(stat) and math.isfinite(pval)):
        return None
    return float(stat), float(pval)


def _direction_fractions(seq: list) -> tuple[float, float]:
    """(non-decreasing, non-increasing) adjacent-pair fractions; 1.0 for n<=1."""
    if len(seq) <= 1:
        return 1.0, 1.0
    asc = sum(1 for a, b in zip(seq, seq[1:]) if not b < a)
    desc = sum(1 for a, b in zip(seq, seq[1:]) if not b > a)
    pairs = len(seq) - 1
    return asc / pairs, desc / pairs


def _strictly_monotonic(seq: list) -> bool:
    if len(seq) <= 1:
        return True
    return all(b > a for a, b in zip(seq, seq[1:])) or all(
        b < a for a, b in zip(seq, seq[1:])
    )


def _fit_error(y: np.ndarray) -> float:
    """Normalized RMSE of the least-squares line over the row index."""
    if y.size <= 1:
        return 0.0
    x = np.arange(y.size, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rmse = math.sqrt(float(np.mean(resid**2)))
    spread = float(np.ptp(y))
    if spread == 0.0:
        return 0.0
    return rmse / spread


# ---------------------------------------------------------------------------
# categorical extraction
# ---------------------------------------------------------------------------

def extract_categorical(col: DataColumn, table_ctx: Table) -> list[CategoricalFeatureValue]:
    """All categorical tokens of one column within its table context."""
    out: list[CategoricalFeatureValue] = []
    add = lambda fid, tok: out.append(CategoricalFeatureValue(fid, tok))

    add("general_type", col.general_type)
    add("specific_type", col.specific_type)

    name = col.name
    if name and name[0].isupper():
        add("starts_with", "upper")
    elif name and name[0].islower():
        add("starts_with", "lower")

    lower_name = name.lower()
    for token in NAME_TOKENS:
        if token == "digit":
            hit = any(ch.isdigit() for ch in name)
        elif token == "whitespace":
            hit = any(ch.isspace() for ch in name)
        elif token in ("x", "y", "time"):
            hit = token in lower_name
        else:
            hit = token in name
        if hit:
            add("name_contains", token)

    nums = numeric_values(col)
    if nums is not None and nums.size:
        for criterion in OUTLIER_CRITERIA:
            if bool(_outlier_mask(nums, criterion).any()):
                add("outlier_by", criterion)

    if col.general_type == "quantitative" and nums is not None:
        result = _normality_test(nums)
        if result is not None:
            _, pval = result
            for level, alpha in (("p<0.01", 0.01), ("p<0.05", 0.05)):
                if pval < alpha:
                    add("normal_at", level)

    seq = comparable_values(col)
    asc, desc = _direction_fractions(seq)
    flags = {
        "sorted": max(asc, desc) == 1.0,
        "monotonic": _strictly_monotonic(seq),
        "linear_space": False,
        "log_space": False,
        "unique": len(set(seq)) == len(seq),
        "has_missing": any(c.is_missing for c in col.values),
        "only_column": len(table_ctx.columns) == 1,
    }
    if nums is not None and nums.size:
        flags["linear_space"] = _fit_error(nums) <= _EXACT_FIT_TOL
        if np.all(nums > 0):
            flags["log_space"] = _fit_error(np.log(nums)) <= _EXACT_FIT_TOL
    for fid in BOOLEAN_FEATURES:
        add(fid, "true" if flags[fid] else "false")
    return out


# ---------------------------------------------------------------------------
# continuous extraction
# ---------------------------------------------------------------------------

def extract_continuous(col: DataColumn) -> list[ContinuousFeatureValue]:
    """One value per registry entry; undefined entries are 0 and flagged."""
    values: dict[str, float] = {}
    neutral: set[str] = set()

    def put(fid: str, v) -> None:
        v = float(v)
        if not math.isfinite(v):
            neutral.add(fid)
            values[fid] = 0.0
        else:
            values[fid] = v

    total = len(col.values)
    present_cells = col.non_missing()
    n = len(present_cells)
    texts = [_cell_text(c) for c in present_cells]
    seq = comparable_values(col)
    counts = Counter(seq)

    put("length", total)
    put("n_values", n)
    put("n_unique", len(counts))
    put("pct_unique", len(counts) / n)
    put("pct_missing", (total - n) / total)

    probs = np.array([c / n for c in counts.values()])
    put("entropy", float(-(probs * np.log(probs)).sum()))
    put("gini", float(1.0 - (probs**2).sum()))

    mode_count = max(counts.values())
    put("pct_mode", mode_count / n)
    put("mode_freq", mode_count)

    asc, desc = _direction_fractions(seq)
    put("sortedness", max(asc, desc))

    lens = np.array([len(t) for t in texts], dtype=float)
    put("value_len_min", lens.min())
    put("value_len_max", lens.max())
    put("value_len_mean", lens.mean())
    put("value_len_std", lens.std())
    put("n_distinct_value_lengths", len(set(lens.tolist())))

    name = col.name
    put("name_length", len(name))
    put("name_word_count", len(name.split()))
    put("name_digit_count", sum(ch.isdigit() for ch in name))
    put("name_upper_ratio", sum(ch.isupper() for ch in name) / len(name) if name else 0.0)

    nums = numeric_values(col)
    if nums is None or nums.size == 0:
        for feat in CONTINUOUS_FEATURES:
            if feat.numeric_only:
                neutral.add(feat.feature_id)
                values[feat.feature_id] = 0.0
    else:
        put("mean", nums.mean())
        put("median", float(np.median(nums)))
        put("min", nums.min())
        put("max", nums.max())
        put("range", float(np.ptp(nums)))
        put("variance", nums.var())
        put("std", nums.std())
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            put("skewness", stats.skew(nums))
            put("kurtosis", stats.kurtosis(nums))
            for k in range(5, 11):
                put("moment_%d" % k, stats.moment(nums, k))
        q10, q25, q75, q90 = np.quantile(nums, [0.10, 0.25, 0.75, 0.90])
        put("percentile_10", q10)
        put("percentile_25", q25)
        put("percentile_75", q75)
        put("percentile_90", q90)
        put("iqr", q75 - q25)
        result = _normality_test(nums)
        if result is None:
            neutral.add("normality_statistic")
            values["normality_statistic"] = 0.0
        else:
            put("normality_statistic", result[0])
        for fid, criterion in (
            ("outlier_pct_1_5iqr", "1.5IQR"),
            ("outlier_pct_3iqr", "3IQR"),
            ("outlier_pct_3std", "3Std"),
            ("outlier_pct_1_99", "(1%,99%)"),
        ):
            put(fid, _outlier_mask(nums, criterion).mean())
        put("linear_fit_error", _fit_error(nums))
        if np.all(nums > 0):
            put("log_fit_error", _fit_error(np.log(nums)))
        else:
            neutral.add("log_fit_error")
            values["log_fit_error"] = 0.0
        put("mean_abs_dev", np.abs(nums - nums.mean()).mean())
        med = float(np.median(nums))
        put("median_abs_dev", float(np.median(np.abs(nums - med))))
        if nums.mean() == 0.0:
            neutral.add("coeff_variation")
            values["coeff_variation"] = 0.0
        else:
            put("coeff_variation", nums.std() / abs(nums.mean()))
        uniq = np.unique(nums)
        put("sorted_gap_mean", float(np.diff(uniq).mean()) if uniq.size > 1 else 0.0)

    return [
        ContinuousFeatureValue(fid, values[fid], neutral=fid in neutral)
        for fid in CONTINUOUS_IDS
    ]


def extract_features(col: DataColumn, table_ctx: Table, column_index: int) -> FeatureVector:
    return FeatureVector(
        column_ref=(table_ctx.id, column_index),
        categoricals=tuple(extract_categorical(col, table_ctx)),
        continuous=tuple(extract_continuous(col)),
    )


# ---------------------------------------------------------------------------
# winsorization
# ---------------------------------------------------------------------------

def winsorize_matrix(
    matrix: dict[str, np.ndarray],
) -> tuple[dict[str, np.ndarray], dict[str, tuple[float, float]]]:
    """Clip each feature's values to its own 5%/95% quantiles.

    Returns the clipped matrix and the per-feature (q05, q95) bounds so the
    same clipping can be replayed on columns seen at inference time.
    """
    clipped: dict[str, np.ndarray] = {}
    bounds: dict[str, tuple[float, float]] = {}
    for fid, raw in matrix.items():
        vals = np.asarray(raw, dtype=float)
        if vals.size == 0:
            raise ValueError("feature %r has no training values" % fid)
        lo, hi = np.quantile(vals, [0.05, 0.95])
        clipped[fid] = np.clip(vals, lo, hi)
        bounds[fid] = (float(lo), float(hi))
    return clipped, bounds


def winsorize_value(value: float, bound: tuple[float, float]) -> float:
    lo, hi = bound
    return min(max(value, lo), hi)


def feature_matrix(vectors: list[FeatureVector]) -> dict[str, np.ndarray]:
    """Stack continuous features into per-feature arrays, vector order kept."""
    cols = {fid: np.empty(len(vectors)) for fid in CONTINUOUS_IDS}
    for row, fv in enumerate(vectors):
        for cv in fv.continuous:
            cols[cv.feature_id][row] = cv.value
    return cols


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------

def export_continuous_csv(vectors: list[FeatureVector], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("table_id,column_index,feature_id,value\n")
        for fv in vectors:
            tid, idx = fv.column_ref
            for cv in fv.continuous:
                fh.write("%s,%d,%s,%r\n" % (tid, idx, cv.feature_id, cv.value))


def export_categorical_jsonl(vectors: list[FeatureVector], path) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for fv in vectors:
            tid, idx = fv.column_ref
            obj = {
                "table_id": tid,
                "column_index": idx,
                "tokens": [
                    {"feature_id": cv.feature_id, "value": cv.value}
                    for cv in fv.categoricals
                ],
            }
            fh.write(json.dumps(obj) + "\n")
