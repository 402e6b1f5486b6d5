"""Knowledge-graph construction: entities, relations, triples, persistence.

Entity classes:
  V  - design choices (six chart types, two axes); always registered
  CF - categorical feature tokens
  DF - discretized continuous feature intervals
  D  - data columns

Relations: 2 column->design slots, 13 categorical-feature slots and 50
continuous-feature slots (65 schema slots total); only instantiated
relations are stored.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import features as feat
from .corpus import AXES, VIS_TYPES, CorpusRecord
from .discretize import Discretizer
from .features import (
    CATEGORICAL_FEATURES,
    CONTINUOUS_IDS,
    REGISTRY_VERSION,
    FeatureVector,
)

log = logging.getLogger(__name__)

_MAGIC = b"KG4V"
_CONTAINER_VERSION = 1
HISTOGRAM_BINS = 30


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Entity:
    id: int
    cls: str  # "V" | "DF" | "CF" | "D"
    key: str


@dataclass(frozen=True)
class Relation:
    id: int
    cls: str  # "D->V" | "CF->D" | "DF->D"
    key: str


@dataclass(frozen=True)
class Triple:
    head: int
    relation: int
    tail: int


# legal (head class, relation class, tail class) shapes
_LEGAL_SHAPES = {("CF", "CF->D", "D"), ("DF", "DF->D", "D"), ("D", "D->V", "V")}

REL_VIS_TYPE = "rel:vis_type"
REL_AXIS = "rel:axis"


def vis_entity_key(vis_type: str) -> str:
    return "V:vis_type=%s" % vis_type


def axis_entity_key(axis: str) -> str:
    return "V:axis=%s" % axis


def cf_entity_key(feature_id: str, token: str) -> str:
    return "CF:%s=%s" % (feature_id, token)


def df_entity_key(feature_id: str, interval: int) -> str:
    return "DF:%s#%d" % (feature_id, interval)


def column_entity_key(table_id: str, column_index: int) -> str:
    return "D:%s#%d" % (table_id, column_index)


def cf_relation_key(feature_id: str) -> str:
    return "rel:cf:%s" % feature_id


def df_relation_key(feature_id: str) -> str:
    return "rel:df:%s" % feature_id


def relation_for_feature_key(entity_key: str) -> str:
    """The unique relation owning a CF/DF entity key."""
    cls, _, rest = entity_key.partition(":")
    if cls == "CF":
        return cf_relation_key(rest.split("=", 1)[0])
    if cls == "DF":
        return df_relation_key(rest.rsplit("#", 1)[0])
    raise GraphError("%r is not a feature entity key" % entity_key)


RELATION_SLOTS: tuple[tuple[str, str], ...] = (
    (REL_VIS_TYPE, "D->V"),
    (REL_AXIS, "D->V"),
    *((cf_relation_key(f.feature_id), "CF->D") for f in CATEGORICAL_FEATURES),
    *((df_relation_key(fid), "DF->D") for fid in CONTINUOUS_IDS),
)

_SLOT_CLASS = dict(RELATION_SLOTS)


@dataclass
class KnowledgeGraph:
    entities: list[Entity]
    relations: list[Relation]
    triples: np.ndarray  # (n, 3) int64: head id, relation id, tail id
    histograms: dict[str, dict]  # feature_id -> {"edges": [...], "counts": [...]}
    bounds: dict[str, tuple[float, float]]
    registry_version: str = REGISTRY_VERSION
    entity_ids: dict[str, int] = field(default_factory=dict)
    relation_ids: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.entity_ids:
            self.entity_ids = {e.key: e.id for e in self.entities}
        if not self.relation_ids:
            self.relation_ids = {r.key: r.id for r in self.relations}

    @property
    def n_entities(self) -> int:
        return len(self.entities)

    @property
    def n_relations(self) -> int:
        return len(self.relations)

    def feature_entities(self) -> list[Entity]:
        return [e for e in self.entities if e.cls in ("CF", "DF")]

    def associated_relation(self, entity_id: int) -> int:
        ent = self.entities[entity_id]
        return self.relation_ids[relation_for_feature_key(ent.key)]

    def validate(self) -> None:
        for h, r, t in self.triples:
            shape = (
                self.entities[h].cls,
                self.relations[r].cls,
                self.entities[t].cls,
            )
            if shape not in _LEGAL_SHAPES:
                raise GraphError("illegal triple shape %s" % (shape,))


def column_triples(
    fv: FeatureVector, label, disc: Discretizer
) -> list[tuple[str, str, str]]:
    """Key-level triples of one labeled column.

    One (CF, rel, column) triple per categorical token, one (DF, rel, column)
    triple per continuous feature through interval assignment, and the two
    (column, rel, design-choice) triples for the label.
    """
    col_key = column_entity_key(*fv.column_ref)
    out: list[tuple[str, str, str]] = []
    for cv in fv.categoricals:
        out.append((cf_entity_key(cv.feature_id, cv.value), cf_relation_key(cv.feature_id), col_key))
    for cv in fv.continuous:
        interval = disc.assign(cv.value, cv.feature_id)
        out.append((df_entity_key(cv.feature_id, interval), df_relation_key(cv.feature_id), col_key))
    out.append((col_key, REL_VIS_TYPE, vis_entity_key(label.vis_type)))
    out.append((col_key, REL_AXIS, axis_entity_key(label.axis)))
    return out


def labeled_feature_vectors(
    records: list[CorpusRecord], feature_cache: dict | None = None
) -> tuple[list[FeatureVector], list]:
    """Feature vectors and labels of every labeled column, corpus order."""
    vectors: list[FeatureVector] = []
    labels = []
    for rec in records:
        for idx in sorted(rec.labels):
            key = (rec.table.id, idx)
            if feature_cache is not None and key in feature_cache:
                fv = feature_cache[key]
            else:
                fv = feat.extract_features(rec.table.columns[idx], rec.table, idx)
                if feature_cache is not None:
                    feature_cache[key] = fv
            vectors.append(fv)
            labels.append(rec.labels[idx])
    return vectors, labels


def winsorize_vector(fv: FeatureVector, bounds: dict[str, tuple[float, float]]) -> FeatureVector:
    clipped = tuple(
        feat.ContinuousFeatureValue(
            cv.feature_id,
            feat.winsorize_value(cv.value, bounds[cv.feature_id]),
            neutral=cv.neutral,
        )
        for cv in fv.continuous
    )
    return FeatureVector(fv.column_ref, fv.categoricals, clipped)


def _histograms(clipped: dict[str, np.ndarray], bounds) -> dict[str, dict]:
    out = {}
    for fid, vals in clipped.items():
        lo, hi = bounds[fid]
        if hi <= lo:
            lo, hi = lo - 0.5, lo + 0.5
        counts, edges = np.histogram(vals, bins=HISTOGRAM_BINS, range=(lo, hi))
        out[fid] = {"edges": edges.tolist(), "counts": counts.tolist()}
    return out


class _Interner:
    def __init__(self):
        self.entities: list[Entity] = []
        self.relations: list[Relation] = []
        self._ent: dict[str, int] = {}
        self._rel: dict[str, int] = {}

    def entity(self, key: str) -> int:
        if key not in self._ent:
            self._ent[key] = len(self.entities)
            self.entities.append(Entity(len(self.entities), key.split(":", 1)[0], key))
        return self._ent[key]

    def relation(self, key: str) -> int:
        if key not in self._rel:
            cls = _SLOT_CLASS.get(key)
            if cls is None:
                raise GraphError("unknown relation slot %r" % key)
            self._rel[key] = len(self.relations)
            self.relations.append(Relation(len(self.relations), cls, key))
        return self._rel[key]


def build_graph(
    records: list[CorpusRecord],
    disc: Discretizer,
    bounds: dict[str, tuple[float, float]] | None = None,
    feature_cache: dict | None = None,
) -> KnowledgeGraph:
    """Union of column_triples over all labeled columns of the training split.

    Bounds may be passed in when the caller already winsorized (they must be
    the training bounds); otherwise they are recomputed here.
    """
    vectors, labels = labeled_feature_vectors(records, feature_cache)
    if not vectors:
        raise GraphError("empty training split: no labeled columns")
    matrix = feat.feature_matrix(vectors)
    if bounds is None:
        clipped, bounds = feat.winsorize_matrix(matrix)
    else:
        clipped = {
            fid: np.clip(vals, bounds[fid][0], bounds[fid][1])
            for fid, vals in matrix.items()
        }
    histograms = _histograms(clipped, bounds)

    interner = _Interner()
    for vt in VIS_TYPES:
        interner.entity(vis_entity_key(vt))
    for ax in AXES:
        interner.entity(axis_entity_key(ax))

    triple_keys: dict[tuple[str, str, str], None] = {}
    for fv, label in zip(vectors, labels):
        for tri in column_triples(winsorize_vector(fv, bounds), label, disc):
            triple_keys.setdefault(tri, None)

    rows = np.empty((len(triple_keys), 3), dtype=np.int64)
    for i, (h, r, t) in enumerate(triple_keys):
        rows[i, 0] = interner.entity(h)
        rows[i, 1] = interner.relation(r)
        rows[i, 2] = interner.entity(t)

    log.info(
        "graph built: %d entities, %d of %d relation slots instantiated, %d triples",
        len(interner.entities),
        len(interner.relations),
        len(RELATION_SLOTS),
        len(rows),
    )
    return KnowledgeGraph(
        entities=interner.entities,
        relations=interner.relations,
        triples=rows,
        histograms=histograms,
        bounds=dict(bounds),
    )


# ---------------------------------------------------------------------------
# persistence: magic, container version, JSON header, int64 LE triple block
# ---------------------------------------------------------------------------

def save_graph(kg: KnowledgeGraph, path: str | Path) -> None:
    header = {
        "registry_version": kg.registry_version,
        "n_triples": int(kg.triples.shape[0]),
        "entities": [[e.cls, e.key] for e in kg.entities],
        "relations": [[r.cls, r.key] for r in kg.relations],
        "histograms": kg.histograms,
        "bounds": {fid: list(b) for fid, b in kg.bounds.items()},
    }
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _CONTAINER_VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(kg.triples.astype("<i8").tobytes())


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise GraphError("truncated graph file while reading %s" % what)
    return data


def load_graph(path: str | Path) -> KnowledgeGraph:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != _MAGIC:
            raise GraphError("not a graph container (bad magic)")
        (container_version,) = struct.unpack("<I", _read_exact(fh, 4, "container version"))
        if container_version != _CONTAINER_VERSION:
            raise GraphError(
                "unsupported container version: expected %d, found %d"
                % (_CONTAINER_VERSION, container_version)
            )
        (hlen,) = struct.unpack("<I", _read_exact(fh, 4, "header length"))
        header = json.loads(_read_exact(fh, hlen, "header"))
        if header["registry_version"] != REGISTRY_VERSION:
            raise GraphError(
                "registry version mismatch: expected %s, found %s"
                % (REGISTRY_VERSION, header["registry_version"])
            )
        n = header["n_triples"]
        raw = _read_exact(fh, n * 3 * 8, "triples")
        trailing = fh.read(1)
    if trailing:
        raise GraphError("trailing bytes after triple block")
    triples = np.frombuffer(raw, dtype="<i8").reshape(n, 3).astype(np.int64)
    kg = KnowledgeGraph(
        entities=[Entity(i, cls, key) for i, (cls, key) in enumerate(header["entities"])],
        relations=[Relation(i, cls, key) for i, (cls, key) in enumerate(header["relations"])],
        triples=triples,
        histograms=header["histograms"],
        bounds={fid: tuple(b) for fid, b in header["bounds"].items()},
        registry_version=header["registry_version"],
    )
    kg.validate()
    return kg
