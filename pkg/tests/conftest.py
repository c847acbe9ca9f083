from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from cuisine_profiler.labels import EMBEDDING_DIM, Embedding, LabelAnnotation, PhotoRecord

DATA = Path(__file__).parent / "data"


def labels(pairs, model="food"):
    return tuple(LabelAnnotation(c, p, model) for c, p in pairs)


def record(pid, general=(), food=(), exif=None, embedding=None):
    return PhotoRecord(pid, exif, labels(general, "general"), labels(food, "food"), embedding)


def one_hot(i: int, scale: float = 1.0) -> Embedding:
    v = np.zeros(EMBEDDING_DIM)
    v[i] = scale
    return Embedding(v)


def write_corpus(path: Path, rows) -> Path:
    path.write_text(json.dumps([{"id": i, "cuisine": c, "ingredients": list(ing)} for i, c, ing in rows]))
    return path


@pytest.fixture
def three_recipes(tmp_path):
    return write_corpus(
        tmp_path / "three.json",
        [
            (1, "italian", ["fresh basil", "tomatoes", "salt"]),
            (2, "italian", ["parmesan cheese", "salt"]),
            (3, "mexican", ["corn tortillas", "salsa"]),
        ],
    )
