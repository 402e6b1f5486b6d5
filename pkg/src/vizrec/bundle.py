"""Self-contained model artifact: everything recommendation needs.

File layout: magic, container version, JSON header (scorer, dimension, norm,
registry version, discretizer cuts, winsorize bounds, entity/relation key
tables, training histograms), then the entity and relation matrices as
little-endian float32.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .discretize import Discretizer
from .embed import EmbeddingModel
from .features import REGISTRY_VERSION
from .kg import KnowledgeGraph, relation_for_feature_key

_MAGIC = b"VREC"
_CONTAINER_VERSION = 1


class BundleError(ValueError):
    pass


@dataclass
class ModelBundle:
    model: EmbeddingModel
    entity_keys: list[str]
    relation_keys: list[str]
    discretizer: Discretizer
    bounds: dict[str, tuple[float, float]]
    histograms: dict[str, dict]
    registry_version: str = REGISTRY_VERSION
    fingerprint: str = ""
    entity_ids: dict[str, int] = field(default_factory=dict)
    relation_ids: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.entity_ids:
            self.entity_ids = {k: i for i, k in enumerate(self.entity_keys)}
        if not self.relation_ids:
            self.relation_ids = {k: i for i, k in enumerate(self.relation_keys)}

    @classmethod
    def assemble(cls, model: EmbeddingModel, kg: KnowledgeGraph, disc: Discretizer) -> "ModelBundle":
        return cls(
            model=model,
            entity_keys=[e.key for e in kg.entities],
            relation_keys=[r.key for r in kg.relations],
            discretizer=disc,
            bounds=dict(kg.bounds),
            histograms=dict(kg.histograms),
            registry_version=kg.registry_version,
        )

    def entity_id(self, key: str) -> int | None:
        return self.entity_ids.get(key)

    def relation_id(self, key: str) -> int:
        try:
            return self.relation_ids[key]
        except KeyError:
            raise BundleError("relation %r missing from the model" % key) from None

    def feature_entity_keys(self) -> list[str]:
        return [k for k in self.entity_keys if k.startswith(("CF:", "DF:"))]

    def associated_relation_id(self, entity_key: str) -> int:
        return self.relation_id(relation_for_feature_key(entity_key))


def save_bundle(bundle: ModelBundle, path: str | Path) -> None:
    E = bundle.model.entity_vecs.astype("<f4")
    R = bundle.model.relation_vecs.astype("<f4")
    header = {
        "scorer": bundle.model.scorer,
        "dim": int(E.shape[1]),
        "norm": bundle.model.norm,
        "registry_version": bundle.registry_version,
        "discretizer": bundle.discretizer.to_json(),
        "bounds": {fid: list(b) for fid, b in bundle.bounds.items()},
        "entities": bundle.entity_keys,
        "relations": bundle.relation_keys,
        "histograms": bundle.histograms,
        "relation_dim": int(R.shape[1]),
    }
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _CONTAINER_VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(E.tobytes())
        fh.write(R.tobytes())


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise BundleError("truncated model file while reading %s" % what)
    return data


def load_bundle(path: str | Path) -> ModelBundle:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != _MAGIC:
            raise BundleError("not a model file (bad magic)")
        (version,) = struct.unpack("<I", _read_exact(fh, 4, "container version"))
        if version != _CONTAINER_VERSION:
            raise BundleError(
                "unsupported model container version: expected %d, found %d"
                % (_CONTAINER_VERSION, version)
            )
        (hlen,) = struct.unpack("<I", _read_exact(fh, 4, "header length"))
        blob = _read_exact(fh, hlen, "header")
        header = json.loads(blob)
        if header["registry_version"] != REGISTRY_VERSION:
            raise BundleError(
                "registry version mismatch: expected %s, found %s"
                % (REGISTRY_VERSION, header["registry_version"])
            )
        n_ent = len(header["entities"])
        n_rel = len(header["relations"])
        d = header["dim"]
        rd = header["relation_dim"]
        eraw = _read_exact(fh, n_ent * d * 4, "entity matrix")
        rraw = _read_exact(fh, n_rel * rd * 4, "relation matrix")
    for part in (_MAGIC, struct.pack("<I", version), struct.pack("<I", hlen), blob, eraw, rraw):
        digest.update(part)
    model = EmbeddingModel(
        entity_vecs=np.frombuffer(eraw, dtype="<f4").reshape(n_ent, d).astype(np.float64),
        relation_vecs=np.frombuffer(rraw, dtype="<f4").reshape(n_rel, rd).astype(np.float64),
        scorer=header["scorer"],
        norm=header["norm"],
    )
    return ModelBundle(
        model=model,
        entity_keys=list(header["entities"]),
        relation_keys=list(header["relations"]),
        discretizer=Discretizer.from_json(header["discretizer"]),
        bounds={fid: tuple(b) for fid, b in header["bounds"].items()},
        histograms=header["histograms"],
        registry_version=header["registry_version"],
        fingerprint=digest.hexdigest()[:16],
    )
