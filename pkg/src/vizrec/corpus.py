"""Corpus ingestion: typed tables, visualization labels and JSONL parsing.

A corpus is a JSONL file, one record per line:

    {"id": str,
     "columns": [{"name": str, "values": [cell, ...]}, ...],
     "labels":  [{"column": int, "vis_type": str, "axis": "x"|"y"}, ...]}

Cells are JSON strings, numbers or null (null = missing). Empty strings are
treated as missing as well.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

VIS_TYPES = ("bar", "box", "heatmap", "histogram", "line", "scatter")
AXES = ("x", "y")

GENERAL_TYPES = ("categorical", "quantitative", "temporal")
SPECIFIC_TYPES = ("string", "integer", "decimal", "datetime")

# specific -> general
_GENERAL_OF = {
    "string": "categorical",
    "integer": "quantitative",
    "decimal": "quantitative",
    "datetime": "temporal",
}

# Epoch-second cells are only recognized inside this window (1973..2100);
# outside it a bare integer is just an integer.
_EPOCH_MIN = 100_000_000
_EPOCH_MAX = 4_102_444_800


class CorpusError(ValueError):
    """Raised for unusable corpus inputs (unreadable file, empty column...)."""


@dataclass(frozen=True)
class CellValue:
    """One table cell: exactly one of integer/decimal/text/datetime/missing.

    ``value`` holds the parsed payload (epoch seconds for datetime); ``raw``
    keeps the original text for display and is excluded from equality.
    """

    kind: str
    value: int | float | str | None = None
    raw: str | None = field(default=None, compare=False)

    MISSING = "missing"

    @property
    def is_missing(self) -> bool:
        return self.kind == "missing"

    def display(self):
        """JSON-friendly rendering: native numbers, original datetime text."""
        if self.is_missing:
            return None
        if self.kind == "datetime":
            return self.raw if self.raw is not None else epoch_to_iso(self.value)
        return self.value


def missing_cell() -> CellValue:
    return CellValue("missing")


@dataclass(frozen=True)
class DataColumn:
    name: str
    values: tuple[CellValue, ...]
    general_type: str
    specific_type: str

    def __post_init__(self):
        if not self.values:
            raise CorpusError("column %r has no values" % self.name)
        if _GENERAL_OF[self.specific_type] != self.general_type:
            raise CorpusError(
                "column %r: general type %r inconsistent with specific type %r"
                % (self.name, self.general_type, self.specific_type)
            )

    def non_missing(self) -> list[CellValue]:
        return [c for c in self.values if not c.is_missing]


@dataclass(frozen=True)
class Table:
    id: str
    columns: tuple[DataColumn, ...]

    def __post_init__(self):
        if not self.columns:
            raise CorpusError("table %r has no columns" % self.id)


@dataclass(frozen=True)
class VisLabel:
    vis_type: str
    axis: str

    def __post_init__(self):
        if self.vis_type not in VIS_TYPES:
            raise CorpusError("unknown vis_type %r" % self.vis_type)
        if self.axis not in AXES:
            raise CorpusError("unknown axis %r" % self.axis)


@dataclass(frozen=True)
class CorpusRecord:
    table: Table
    labels: dict[int, VisLabel]

    def __post_init__(self):
        for idx in self.labels:
            if not 0 <= idx < len(self.table.columns):
                raise CorpusError(
                    "label index %d out of range for table %r" % (idx, self.table.id)
                )
        types = {lab.vis_type for lab in self.labels.values()}
        if len(types) > 1:
            raise CorpusError(
                "table %r mixes vis types %s in one record" % (self.table.id, sorted(types))
            )


@dataclass
class ParseReport:
    diagnostics: list[tuple[int, str]] = field(default_factory=list)

    def add(self, line_no: int, message: str) -> None:
        self.diagnostics.append((line_no, message))

    @property
    def ok(self) -> bool:
        return not self.diagnostics


# ---------------------------------------------------------------------------
# cell / datetime parsing
# ---------------------------------------------------------------------------

def _parse_int(text: str) -> int | None:
    t = text.strip()
    if not t:
        return None
    try:
        return int(t)
    except ValueError:
        return None


def _parse_decimal(text: str) -> float | None:
    t = text.strip()
    if not t:
        return None
    try:
        v = float(t)
    except ValueError:
        return None
    if math.isnan(v) or math.isinf(v):
        return None
    return v


def parse_datetime_text(text: str) -> float | None:
    """Parse one of the supported datetime shapes to epoch seconds (UTC).

    Supported: ISO date (2020-01-31), ISO datetime (2020-01-31T12:00:00,
    fractional seconds and offsets allowed), slash date (2020/01/31) and
    epoch seconds inside the 1973..2100 window. Anything else is not a
    datetime.
    """
    t = text.strip()
    if not t:
        return None
    iv = _parse_int(t)
    if iv is not None:
        if _EPOCH_MIN <= iv <= _EPOCH_MAX:
            return float(iv)
        return None
    candidate = t
    if "/" in t:
        parts = t.split("/")
        if len(parts) != 3:
            return None
        candidate = "-".join(parts)
    try:
        dt = datetime.fromisoformat(candidate)
    except ValueError:
        return None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def epoch_to_iso(epoch: float) -> str:
    dt = datetime.fromtimestamp(epoch, tz=timezone.utc)
    if dt.hour == dt.minute == dt.second == dt.microsecond == 0:
        return dt.date().isoformat()
    return dt.replace(tzinfo=None).isoformat()


def _is_missing_text(raw: str | None) -> bool:
    return raw is None or raw.strip() == ""


def infer_column_types(raw: list[str | None], name: str) -> DataColumn:
    """Type a column of raw text cells.

    integer if every non-missing cell parses as an integer; decimal if all
    parse as numbers with at least one non-integer; datetime if all parse
    under the supported datetime shapes; string otherwise.
    """
    if not raw:
        raise CorpusError("column %r has no values" % name)
    present = [t for t in raw if not _is_missing_text(t)]
    if not present:
        raise CorpusError("empty column %r: all values missing" % name)

    ints = [_parse_int(t) for t in present]
    if all(v is not None for v in ints):
        specific = "integer"
    else:
        # at least one cell is not an integer, so all-numeric means decimal
        decs = [_parse_decimal(t) for t in present]
        if all(v is not None for v in decs):
            specific = "decimal"
        elif all(parse_datetime_text(t) is not None for t in present):
            specific = "datetime"
        else:
            specific = "string"

    cells = []
    for t in raw:
        if _is_missing_text(t):
            cells.append(missing_cell())
        elif specific == "integer":
            cells.append(CellValue("integer", _parse_int(t), raw=t))
        elif specific == "decimal":
            cells.append(CellValue("decimal", _parse_decimal(t), raw=t))
        elif specific == "datetime":
            cells.append(CellValue("datetime", parse_datetime_text(t), raw=t))
        else:
            cells.append(CellValue("text", t, raw=t))
    return DataColumn(
        name=name,
        values=tuple(cells),
        general_type=_GENERAL_OF[specific],
        specific_type=specific,
    )


def _cell_to_text(cell) -> str | None:
    """Normalize a JSON cell (str/number/null) to raw text or missing."""
    if cell is None:
        return None
    if isinstance(cell, bool):
        return str(cell)
    if isinstance(cell, (int, float)):
        if isinstance(cell, float) and (math.isnan(cell) or math.isinf(cell)):
            return None
        return repr(cell) if isinstance(cell, float) else str(cell)
    if isinstance(cell, str):
        return cell
    raise CorpusError("unsupported cell %r" % (cell,))


# ---------------------------------------------------------------------------
# JSONL parsing
# ---------------------------------------------------------------------------

def _record_from_obj(obj: dict) -> CorpusRecord:
    if not isinstance(obj, dict):
        raise CorpusError("record is not an object")
    table_id = obj.get("id")
    if not isinstance(table_id, str) or not table_id:
        raise CorpusError("missing or invalid 'id'")
    raw_cols = obj.get("columns")
    if not isinstance(raw_cols, list) or not raw_cols:
        raise CorpusError("missing or empty 'columns'")
    columns = []
    for pos, col in enumerate(raw_cols):
        if not isinstance(col, dict) or not isinstance(col.get("name"), str):
            raise CorpusError("column %d lacks a name" % pos)
        vals = col.get("values")
        if not isinstance(vals, list) or not vals:
            raise CorpusError("column %d has no values" % pos)
        texts = [_cell_to_text(c) for c in vals]
        columns.append(infer_column_types(texts, col["name"]))
    lengths = {len(c.values) for c in columns}
    if len(lengths) > 1:
        raise CorpusError("columns have differing lengths %s" % sorted(lengths))

    raw_labels = obj.get("labels")
    if not isinstance(raw_labels, list):
        raise CorpusError("missing 'labels'")
    labels: dict[int, VisLabel] = {}
    for lab in raw_labels:
        if not isinstance(lab, dict) or not isinstance(lab.get("column"), int):
            raise CorpusError("label lacks a column index")
        idx = lab["column"]
        if idx in labels:
            raise CorpusError("duplicate label for column %d" % idx)
        labels[idx] = VisLabel(str(lab.get("vis_type")), str(lab.get("axis")))
    return CorpusRecord(table=Table(id=table_id, columns=tuple(columns)), labels=labels)


def parse_corpus(path: str | Path, format: str = "jsonl") -> tuple[list[CorpusRecord], ParseReport]:
    """Parse a JSONL corpus file.

    Returns records in file order plus a report of skipped lines. Unreadable
    files raise; malformed lines are skipped with a line-numbered diagnostic.
    """
    if format != "jsonl":
        raise CorpusError("unsupported corpus format %r" % format)
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError("cannot read corpus %s: %s" % (p, exc)) from exc

    records: list[CorpusRecord] = []
    report = ParseReport()
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            records.append(_record_from_obj(obj))
        except (json.JSONDecodeError, CorpusError) as exc:
            report.add(line_no, str(exc))
    return records, report


def _cell_to_json(cell: CellValue):
    if cell.is_missing:
        return None
    if cell.kind == "text":
        return cell.value
    if cell.kind == "datetime":
        return cell.raw if cell.raw is not None else epoch_to_iso(cell.value)
    return cell.value


def serialize_records(records: list[CorpusRecord], path: str | Path) -> None:
    """Write records back to the JSONL schema (inverse of parse_corpus)."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj = {
                "id": rec.table.id,
                "columns": [
                    {"name": c.name, "values": [_cell_to_json(v) for v in c.values]}
                    for c in rec.table.columns
                ],
                "labels": [
                    {"column": idx, "vis_type": lab.vis_type, "axis": lab.axis}
                    for idx, lab in sorted(rec.labels.items())
                ],
            }
            fh.write(json.dumps(obj) + "\n")


def clean_records(records: list[CorpusRecord]) -> list[CorpusRecord]:
    """Drop unlabeled columns, then drop records left without columns."""
    cleaned: list[CorpusRecord] = []
    for rec in records:
        kept = [i for i in range(len(rec.table.columns)) if i in rec.labels]
        if not kept:
            continue
        columns = tuple(rec.table.columns[i] for i in kept)
        labels = {new: rec.labels[old] for new, old in enumerate(kept)}
        cleaned.append(CorpusRecord(table=Table(rec.table.id, columns), labels=labels))
    return cleaned
