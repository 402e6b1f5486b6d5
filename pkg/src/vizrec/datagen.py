"""Deterministic synthetic corpora for demos and end-to-end tests.

Three perfectly separable table families:

  line:    a monotonic datetime column (x) plus a smooth positive decimal
           series (y)
  bar:     unique category strings (x) plus unsorted integers in the
           thousands (y)
  scatter: two noisy, non-monotonic decimal columns with injected 1.5IQR
           outliers; the x column lives in a positive band, the y column in
           a negative one, and the names carry x/y hints

Each family occupies its own numeric band, so value statistics separate the
families (and the two scatter roles) cleanly.
"""

from __future__ import annotations

import json
from datetime import date, timedelta
from pathlib import Path

import numpy as np

_TIME_NAMES = ("date", "time", "timestamp", "day")
_SERIES_NAMES = ("value", "price", "level", "reading")
_CATEGORY_NAMES = ("category", "label", "group", "name")
_COUNT_NAMES = ("count", "total", "amount", "units")
_WORDS = (
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
    "iota", "kappa", "lam", "mu", "nu", "xi", "omicron", "pi", "rho",
    "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega",
)


def _line_table(rng: np.random.Generator, rows: int) -> tuple[list, list]:
    start = date(2015, 1, 1) + timedelta(days=int(rng.integers(0, 2000)))
    step = int(rng.integers(1, 8))
    dates = [(start + timedelta(days=step * i)).isoformat() for i in range(rows)]
    phase = rng.uniform(0, 2 * np.pi)
    amp = rng.uniform(5, 50)
    base = rng.uniform(60, 160)
    t = np.arange(rows)
    series = base + amp * np.sin(t / 6.0 + phase) + rng.normal(0, amp * 0.05, rows)
    values = [round(float(v), 3) for v in series]
    cols = [
        {"name": str(rng.choice(_TIME_NAMES)), "values": dates},
        {"name": str(rng.choice(_SERIES_NAMES)), "values": values},
    ]
    labels = [
        {"column": 0, "vis_type": "line", "axis": "x"},
        {"column": 1, "vis_type": "line", "axis": "y"},
    ]
    return cols, labels


def _bar_table(rng: np.random.Generator, rows: int) -> tuple[list, list]:
    words = rng.permutation(len(_WORDS))[: min(rows, len(_WORDS))]
    cats = ["%s_%d" % (_WORDS[w], i) for i, w in enumerate(words)]
    while len(cats) < rows:
        cats.append("item_%d" % len(cats))
    counts = rng.integers(5000, 9000, size=rows)
    while rows > 2 and (np.all(np.diff(counts) >= 0) or np.all(np.diff(counts) <= 0)):
        counts = rng.integers(5000, 9000, size=rows)
    cols = [
        {"name": str(rng.choice(_CATEGORY_NAMES)), "values": cats[:rows]},
        {"name": str(rng.choice(_COUNT_NAMES)), "values": [int(c) for c in counts]},
    ]
    labels = [
        {"column": 0, "vis_type": "bar", "axis": "x"},
        {"column": 1, "vis_type": "bar", "axis": "y"},
    ]
    return cols, labels


def _scatter_column(rng: np.random.Generator, rows: int, center: float, sign: float) -> list[float]:
    bulk = rng.normal(center, rng.uniform(20.0, 45.0), rows)
    n_out = max(2, rows // 12)
    spread = bulk.std()
    idx = rng.choice(rows, size=n_out, replace=False)
    bulk[idx] += sign * spread * rng.uniform(15, 25, n_out)
    while rows > 2 and (np.all(np.diff(bulk) > 0) or np.all(np.diff(bulk) < 0)):
        rng.shuffle(bulk)
    return [round(float(v), 4) for v in bulk]


def _scatter_table(rng: np.random.Generator, rows: int) -> tuple[list, list]:
    cols = [
        {
            "name": "x_%s" % rng.choice(_SERIES_NAMES),
            "values": _scatter_column(rng, rows, rng.uniform(900, 1100), 1.0),
        },
        {
            "name": "y_%s" % rng.choice(_SERIES_NAMES),
            "values": _scatter_column(rng, rows, rng.uniform(-1100, -900), -1.0),
        },
    ]
    labels = [
        {"column": 0, "vis_type": "scatter", "axis": "x"},
        {"column": 1, "vis_type": "scatter", "axis": "y"},
    ]
    return cols, labels


_MAKERS = {"line": _line_table, "bar": _bar_table, "scatter": _scatter_table}


def generate_corpus_objects(
    tables_per_family: int = 100, rows: int = 36, seed: int = 7
) -> list[dict]:
    """Corpus record dicts in the JSONL schema; deterministic for a seed."""
    rng = np.random.default_rng(seed)
    out = []
    n = 0
    for family in ("line", "bar", "scatter"):
        maker = _MAKERS[family]
        for _ in range(tables_per_family):
            columns, labels = maker(rng, rows)
            out.append({"id": "%s-%04d" % (family, n), "columns": columns, "labels": labels})
            n += 1
    return out


def write_corpus(path: str | Path, tables_per_family: int = 100, rows: int = 36, seed: int = 7) -> int:
    objs = generate_corpus_objects(tables_per_family, rows, seed)
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj) + "\n")
    return len(objs)
