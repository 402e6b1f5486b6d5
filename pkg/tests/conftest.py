import json
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from vizrec import datagen
from vizrec.corpus import clean_records, parse_corpus
from vizrec.embed import TrainConfig
from vizrec.pipeline import train_from_records

# Small, fast config shared by the tests that need a real trained model.
SMALL_CFG = TrainConfig(
    dim=32, batch_size=128, steps=600, n_neg=8, seed=5, learning_rate=0.01
)


def write_corpus_file(tmp_path, tables_per_family=10, rows=24, seed=3, name="corpus.jsonl"):
    path = tmp_path / name
    objs = datagen.generate_corpus_objects(tables_per_family, rows, seed)
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj) + "\n")
    return path


@pytest.fixture(scope="session")
def small_corpus_path(tmp_path_factory):
    return write_corpus_file(tmp_path_factory.mktemp("corpus"), tables_per_family=10)


@pytest.fixture(scope="session")
def small_records(small_corpus_path):
    records, report = parse_corpus(small_corpus_path)
    assert report.ok
    return clean_records(records)


@pytest.fixture(scope="session")
def small_bundle(small_records):
    return train_from_records(
        small_records, SMALL_CFG, rng=np.random.default_rng(SMALL_CFG.seed)
    )
