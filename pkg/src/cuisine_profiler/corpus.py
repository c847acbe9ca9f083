"""Recipe corpus in the Kaggle Yummly ``train.json`` layout."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .normalize import NormalizationConfig, normalize_many


class CorpusError(ValueError):
    """Raised for unreadable or malformed corpus files.

    ``index`` is the position of the offending record in the input array,
    or None when the problem is with the file as a whole.
    """

    def __init__(self, message: str, index: int | None = None) -> None:
        if index is not None:
            message = f"record {index}: {message}"
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class Recipe:
    id: int
    cuisine: str
    ingredients_raw: tuple[str, ...]
    ingredients_norm: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Corpus:
    recipes: tuple[Recipe, ...]
    cuisines: frozenset[str] = field(init=False)
    vocabulary: frozenset[str] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "cuisines", frozenset(r.cuisine for r in self.recipes))
        vocab: set[str] = set()
        for r in self.recipes:
            vocab.update(r.ingredients_raw)
        object.__setattr__(self, "vocabulary", frozenset(vocab))

    def __len__(self) -> int:
        return len(self.recipes)

    def __iter__(self):
        return iter(self.recipes)

    @classmethod
    def from_recipes(cls, recipes: Iterable[Recipe]) -> "Corpus":
        recipes = tuple(recipes)
        seen: set[int] = set()
        for i, r in enumerate(recipes):
            if r.id in seen:
                raise CorpusError(f"duplicate id {r.id}", i)
            seen.add(r.id)
        return cls(recipes)


def _parse_record(obj: object, index: int, config: NormalizationConfig | None, normalize: bool) -> Recipe:
    if not isinstance(obj, dict):
        raise CorpusError("expected an object", index)
    for key in ("id", "cuisine", "ingredients"):
        if key not in obj:
            raise CorpusError(f"missing field {key!r}", index)
    rid = obj["id"]
    if isinstance(rid, bool) or not isinstance(rid, int):
        raise CorpusError(f"id must be an integer, got {rid!r}", index)
    cuisine = obj["cuisine"]
    if not isinstance(cuisine, str) or not cuisine.strip():
        raise CorpusError("cuisine must be a non-empty string", index)
    ingredients = obj["ingredients"]
    if not isinstance(ingredients, list) or not ingredients:
        raise CorpusError("ingredients must be a non-empty list", index)
    if not all(isinstance(x, str) for x in ingredients):
        raise CorpusError("ingredients must be strings", index)
    raw = tuple(ingredients)
    norm = normalize_many(raw, config) if normalize else frozenset()
    return Recipe(rid, cuisine.strip().lower(), raw, norm)


def parse_corpus(data: object, config: NormalizationConfig | None = None, normalize: bool = True) -> Corpus:
    if not isinstance(data, list):
        raise CorpusError("corpus must be a JSON array")
    recipes = [_parse_record(obj, i, config, normalize) for i, obj in enumerate(data)]
    return Corpus.from_recipes(recipes)


def load_corpus(
    path: str | Path, config: NormalizationConfig | None = None, normalize: bool = True
) -> Corpus:
    """Load a Yummly-format JSON array of ``{id, cuisine, ingredients}``.

    Cuisine labels are lowercased. With ``normalize`` (the default) each
    recipe's ``ingredients_norm`` holds the union of its normalized phrases.
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"corpus file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"malformed JSON in {path}: {exc}") from exc
    return parse_corpus(data, config, normalize)


def corpus_to_json(corpus: Corpus) -> list[dict]:
    return [{"id": r.id, "cuisine": r.cuisine, "ingredients": list(r.ingredients_raw)} for r in corpus]


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text(json.dumps(corpus_to_json(corpus), ensure_ascii=False), encoding="utf-8")


def cuisine_counts(corpus: Corpus) -> dict[str, int]:
    """Recipe count per cuisine, largest first (ties alphabetical)."""
    counts = Counter(r.cuisine for r in corpus)
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


def _allocate(sizes: dict[str, int], fraction: float) -> dict[str, int]:
    # Largest-remainder apportionment: every cuisine's quota is within one of
    # its exact share and the quotas add up to round(fraction * total).
    total = sum(sizes.values())
    target = int(round(fraction * total))
    exact = {c: fraction * n for c, n in sizes.items()}
    quota = {c: math.floor(v) for c, v in exact.items()}
    remaining = target - sum(quota.values())
    order = sorted(sizes, key=lambda c: (-(exact[c] - quota[c]), c))
    for c in order[:remaining]:
        quota[c] += 1
    return quota


def split(corpus: Corpus, held_out_fraction: float, seed: int = 0) -> tuple[Corpus, Corpus]:
    """Stratified, seeded train/test partition.

    Both halves keep the input order of the original corpus.
    """
    if not 0.0 < held_out_fraction < 1.0:
        raise ValueError(f"held_out_fraction must be in (0, 1), got {held_out_fraction}")
    if len(corpus) < 2:
        raise ValueError("corpus needs at least 2 recipes to split")

    by_cuisine: dict[str, list[int]] = {}
    for i, r in enumerate(corpus):
        by_cuisine.setdefault(r.cuisine, []).append(i)
    quota = _allocate({c: len(v) for c, v in by_cuisine.items()}, held_out_fraction)
    n_test = sum(quota.values())
    if n_test < 1 or n_test >= len(corpus):
        raise ValueError(
            f"fraction {held_out_fraction} leaves an empty side for {len(corpus)} recipes"
        )

    rng = np.random.default_rng(seed)
    test_idx: set[int] = set()
    for c in sorted(by_cuisine):
        members = by_cuisine[c]
        picked = rng.permutation(len(members))[: quota[c]]
        test_idx.update(members[j] for j in picked)

    train = tuple(r for i, r in enumerate(corpus) if i not in test_idx)
    test = tuple(r for i, r in enumerate(corpus) if i in test_idx)
    return Corpus(train), Corpus(test)

