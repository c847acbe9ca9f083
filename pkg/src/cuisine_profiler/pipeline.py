"""Reduce a photo stream to unique food photos.

Stages run in a fixed order: food gate, people gate, exact duplicates by
EXIF DateTime, then near duplicates by embedding cosine similarity.
"""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _accel
from .labels import EMBEDDING_DIM, PhotoRecord
from .normalize import NormalizationConfig, normalize_phrase, resource_list, tokenize

P_FOOD = 0.9
P_PERSON = 0.85
SIM_THRESHOLD = 0.95

# "no person" and friends are negative findings, not people.
NEGATIONS = frozenset({"no", "not", "without"})



@dataclass(frozen=True)
class FoodKnowledgeBase:
    food_concepts: frozenset[str]
    built_from: str = ""
    concept_counts: dict[str, int] = field(default_factory=dict, compare=False)

    def top_concepts(self, n: int = 20) -> list[tuple[str, int]]:
        return sorted(self.concept_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:n]

    def to_dict(self) -> dict:
        return {
            "built_from": self.built_from,
            "food_concepts": sorted(self.food_concepts),
            "concept_counts": dict(self.top_concepts(len(self.concept_counts))),
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "FoodKnowledgeBase":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        concepts = data.get("food_concepts") if isinstance(data, dict) else None
        if not isinstance(concepts, list) or not concepts:
            raise ValueError(f"{path}: knowledge base needs a non-empty 'food_concepts' list")
        return cls(frozenset(concepts), data.get("built_from", str(path)), dict(data.get("concept_counts", {})))


def build_knowledge_base(
    seed_records: Sequence[PhotoRecord], config: NormalizationConfig | None = None, built_from: str = ""
) -> FoodKnowledgeBase:
    """Union of the normalized food-label tokens of a seed photo set.

    ``concept_counts`` keeps how many seed photos carried each raw concept.
    """
    if not seed_records:
        raise ValueError("knowledge base needs at least one seed record")
    tokens: set[str] = set()
    counts: Counter[str] = Counter()
    for rec in seed_records:
        if not rec.food_labels:
            raise ValueError(f"seed record {rec.photo_id!r} has no food labels")
        counts.update({a.concept.lower() for a in rec.food_labels})
        for a in rec.food_labels:
            tokens |= normalize_phrase(a.concept, config)
    return FoodKnowledgeBase(frozenset(tokens), built_from or f"{len(seed_records)} seed photos", dict(counts))


def default_person_concepts(config: NormalizationConfig | None = None) -> frozenset[str]:
    out: set[str] = set()
    for c in resource_list("person_concepts.txt"):
        out |= normalize_phrase(c, config)
    return frozenset(out)


def is_food_photo(
    record: PhotoRecord,
    kb: FoodKnowledgeBase,
    p_min: float = P_FOOD,
    config: NormalizationConfig | None = None,
) -> tuple[bool, list[str]]:
    """Whether any confident general label normalizes into the knowledge base."""
    matched = []
    for a in record.general_labels:
        if a.probability < p_min:
            break  # labels are sorted by probability
        if not normalize_phrase(a.concept, config).isdisjoint(kb.food_concepts):
            matched.append(a.concept)
    return bool(matched), matched


def has_person(
    record: PhotoRecord,
    person_concepts: frozenset[str] | None = None,
    p_min: float = P_PERSON,
    config: NormalizationConfig | None = None,
) -> tuple[bool, list[str]]:
    """Whether a confident general label names a person (token match, not substring)."""
    people = default_person_concepts(config) if person_concepts is None else person_concepts
    matched = []
    for a in record.general_labels:
        if a.probability < p_min:
            break
        if NEGATIONS.intersection(tokenize(a.concept)):
            continue
        if not normalize_phrase(a.concept, config).isdisjoint(people):
            matched.append(a.concept)
    return bool(matched), matched


def dedup_exact(records: Sequence[PhotoRecord]) -> tuple[list[PhotoRecord], list[tuple[PhotoRecord, str]]]:
    """Keep the first photo of each EXIF DateTime; photos without one always stay.

    Removed entries carry the id of the photo they duplicate.
    """
    first: dict[str, str] = {}
    kept, removed = [], []
    for rec in records:
        dt = rec.exif_datetime
        if dt is None:
            kept.append(rec)
        elif dt in first:
            removed.append((rec, first[dt]))
        else:
            first[dt] = rec.photo_id
            kept.append(rec)
    return kept, removed


def dedup_near(
    records: Sequence[PhotoRecord], sim_threshold: float = SIM_THRESHOLD
) -> tuple[list[PhotoRecord], list[PhotoRecord]]:
    """Greedy sweep in input order against the embeddings already accepted.

    A photo goes when its cosine similarity to any accepted photo reaches
    ``sim_threshold``. Photos without an embedding pass through.
    """
    if not 0.0 < sim_threshold <= 1.0:
        raise ValueError(f"sim_threshold must be in (0, 1], got {sim_threshold}")
    with_emb = [i for i, r in enumerate(records) if r.embedding is not None]
    unit = np.zeros((len(with_emb), EMBEDDING_DIM), dtype=np.float64)
    for row, i in enumerate(with_emb):
        v = records[i].embedding.values
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise ValueError(f"photo {records[i].photo_id!r} has a zero-norm embedding")
        unit[row] = v / norm
    keep_rows = _accel.near_duplicate_keep(unit, np.ones(len(with_emb), dtype=np.bool_), sim_threshold)
    keep = np.ones(len(records), dtype=np.bool_)
    keep[with_emb] = keep_rows
    kept = [r for r, k in zip(records, keep) if k]
    removed = [r for r, k in zip(records, keep) if not k]
    return kept, removed


@dataclass(frozen=True)
class PipelineConfig:
    p_food: float = P_FOOD
    p_person: float = P_PERSON
    sim_threshold: float = SIM_THRESHOLD
    person_concepts: frozenset[str] | None = None
    normalization: NormalizationConfig | None = None
    jobs: int = 1

    def __post_init__(self) -> None:
        for name in ("p_food", "p_person"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if not 0.0 < self.sim_threshold <= 1.0:
            raise ValueError(f"sim_threshold must be in (0, 1], got {self.sim_threshold}")


@dataclass
class PipelineReport:
    input_count: int = 0
    rejected_nonfood: int = 0
    rejected_people: int = 0
    rejected_exact_dup: int = 0
    rejected_near_dup: int = 0
    accepted: int = 0
    dispositions: dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "input_count": self.input_count,
            "rejected_nonfood": self.rejected_nonfood,
            "rejected_people": self.rejected_people,
            "rejected_exact_dup": self.rejected_exact_dup,
            "rejected_near_dup": self.rejected_near_dup,
            "accepted": self.accepted,
            "dispositions": self.dispositions,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def run_pipeline(
    records: Sequence[PhotoRecord], kb: FoodKnowledgeBase, config: PipelineConfig | None = None
) -> tuple[list[PhotoRecord], PipelineReport]:
    """Apply the four stages and account for every input photo."""
    cfg = config or PipelineConfig()
    ids = [r.photo_id for r in records]
    if len(set(ids)) != len(ids):
        raise ValueError("photo ids must be unique within a run")
    people = cfg.person_concepts if cfg.person_concepts is not None else default_person_concepts(cfg.normalization)
    report = PipelineReport(input_count=len(records))

    def gates(rec: PhotoRecord) -> tuple[str, str] | None:
        food, _ = is_food_photo(rec, kb, cfg.p_food, cfg.normalization)
        if not food:
            return "nonfood", f"no general label >= {cfg.p_food} in the food knowledge base"
        person, hits = has_person(rec, people, cfg.p_person, cfg.normalization)
        if person:
            return "people", "person labels: " + ", ".join(hits)
        return None

    # Per-photo gates are independent; map() keeps input order.
    if cfg.jobs > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            verdicts = list(pool.map(gates, records))
    else:
        verdicts = [gates(r) for r in records]

    passed = []
    for rec, verdict in zip(records, verdicts):
        if verdict is None:
            passed.append(rec)
            continue
        stage, reason = verdict
        report.dispositions[rec.photo_id] = {"stage": stage, "reason": reason}
        if stage == "nonfood":
            report.rejected_nonfood += 1
        else:
            report.rejected_people += 1

    survivors, exact = dedup_exact(passed)
    for rec, original in exact:
        report.dispositions[rec.photo_id] = {
            "stage": "exact_dup",
            "reason": f"same EXIF DateTime {rec.exif_datetime} as {original}",
        }
    report.rejected_exact_dup = len(exact)

    clean, near = dedup_near(survivors, cfg.sim_threshold)
    for rec in near:
        report.dispositions[rec.photo_id] = {
            "stage": "near_dup",
            "reason": f"embedding cosine >= {cfg.sim_threshold} to an earlier photo",
        }
    report.rejected_near_dup = len(near)

    for rec in clean:
        report.dispositions[rec.photo_id] = {"stage": "accepted", "reason": ""}
    report.accepted = len(clean)
    # report dispositions in input order
    report.dispositions = {pid: report.dispositions[pid] for pid in ids}
    return clean, report

