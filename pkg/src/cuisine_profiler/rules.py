"""Rule-based cuisine classifier: dish-name lookup, then ingredient matching."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .distinctive import DistinctiveTable, ingredient_key
from .labels import PhotoRecord
from .normalize import NormalizationConfig, normalize_phrase

log = logging.getLogger(__name__)

P_CUT = 0.75
MATCH_MIN = 10
COVERAGE_SIZE = 10

DISH_NAME_HIT = "dish_name_hit"
INGREDIENT_RULE_HIT = "ingredient_rule_hit"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class DishNameTable:
    entries: dict[frozenset, str]
    coverage: tuple[str, ...]
    phrases: dict[frozenset, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        stray = sorted({c for c in self.entries.values() if c not in self.coverage})
        if stray:
            raise ValueError(f"dish table maps to cuisines outside coverage: {stray}")

    @classmethod
    def from_mapping(
        cls,
        mapping: Mapping[str, str],
        coverage: Sequence[str] | None = None,
        config: NormalizationConfig | None = None,
    ) -> "DishNameTable":
        entries: dict[frozenset, str] = {}
        phrases: dict[frozenset, str] = {}
        for phrase, cuisine in mapping.items():
            key = normalize_phrase(phrase, config)
            if not key:
                continue
            cuisine = cuisine.strip().lower()
            if key in entries and entries[key] != cuisine:
                raise ValueError(f"dish {phrase!r} maps to both {entries[key]} and {cuisine}")
            entries[key] = cuisine
            phrases[key] = phrase
        cov = tuple(coverage) if coverage is not None else tuple(sorted(set(entries.values())))
        return cls(entries, cov, phrases)

    @classmethod
    def load(cls, path: str | Path | None = None, coverage: Sequence[str] | None = None,
             config: NormalizationConfig | None = None) -> "DishNameTable":
        if path is None:
            text = resources.files("cuisine_profiler").joinpath("resources").joinpath("dishes.json").read_text("utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        mapping = json.loads(text)
        if not isinstance(mapping, dict):
            raise ValueError("dish table must be a JSON object of dish -> cuisine")
        table = cls.from_mapping(mapping, None, config)
        return table.restrict(coverage) if coverage is not None else table

    def restrict(self, coverage: Sequence[str]) -> "DishNameTable":
        """Drop entries whose cuisine is not in ``coverage``."""
        keep = set(coverage)
        dropped = sorted({c for c in self.entries.values() if c not in keep})
        if dropped:
            log.info("dish table: dropping cuisines outside coverage: %s", ", ".join(dropped))
        entries = {k: c for k, c in self.entries.items() if c in keep}
        return DishNameTable(entries, tuple(coverage), {k: self.phrases.get(k, "") for k in entries})


def default_coverage(cuisine_sizes: Mapping[str, int], n: int = COVERAGE_SIZE) -> tuple[str, ...]:
    """The ``n`` largest cuisines, largest first."""
    return tuple(c for c, _ in sorted(cuisine_sizes.items(), key=lambda kv: (-kv[1], kv[0]))[:n])


@dataclass(frozen=True)
class RuleConfig:
    p_cut: float = P_CUT
    match_min: float = MATCH_MIN
    p_dish: float = 0.0
    normalization: NormalizationConfig | None = None


@dataclass(frozen=True)
class RuleClassification:
    photo_id: str
    outcome: str
    cuisine: str | None
    evidence: dict

    def __post_init__(self) -> None:
        if (self.cuisine is None) != (self.outcome == UNCLASSIFIED):
            raise ValueError("cuisine must be set exactly when the photo is classified")

    def to_dict(self) -> dict:
        return {
            "photo_id": self.photo_id,
            "method": "rule",
            "outcome": self.outcome,
            "cuisine": self.cuisine,
            "evidence": self.evidence,
        }


def classify_by_dish_name(
    record: PhotoRecord, table: DishNameTable, config: RuleConfig | None = None
) -> tuple[str, str] | None:
    """Cuisine of the most probable food label that names a known dish.

    A label names a dish when the dish's tokens are all among the label's
    tokens, so "fish tacos" hits "taco". Returns (cuisine, label concept).
    """
    cfg = config or RuleConfig()
    for a in record.food_labels:
        if a.probability < cfg.p_dish:
            break
        toks = normalize_phrase(a.concept, cfg.normalization)
        hits = [e for e in table.entries if e <= toks]
        if hits:
            best = min(hits, key=lambda e: (-len(e), ingredient_key(e)))
            return table.entries[best], a.concept
    return None


def _selected_ingredients(record: PhotoRecord, cfg: RuleConfig) -> dict[frozenset, str]:
    out: dict[frozenset, str] = {}
    for a in record.food_labels:
        if a.probability <= cfg.p_cut:
            break  # sorted by probability; strictly greater is required
        key = normalize_phrase(a.concept, cfg.normalization)
        if key and key not in out:
            out[key] = a.concept
    return out


def classify_by_ingredients(
    record: PhotoRecord,
    distinctive: DistinctiveTable,
    config: RuleConfig | None = None,
    coverage: Sequence[str] | None = None,
) -> tuple[str | None, dict[str, int], dict[str, list[str]]]:
    """Match confident food labels against each cuisine's ingredient set.

    Only labels with probability strictly above ``p_cut`` count, each distinct
    normalized ingredient once. A cuisine qualifies with strictly more than
    ``match_min`` matches; among qualifiers the highest count wins, then the
    larger corpus cuisine, then the alphabetically first.

    Returns (cuisine or None, match count per cuisine, matched labels per cuisine).
    """
    cfg = config or RuleConfig()
    selected = _selected_ingredients(record, cfg)
    cuisines = list(coverage) if coverage is not None else distinctive.cuisines
    counts: dict[str, int] = {}
    matched: dict[str, list[str]] = {}
    for c in cuisines:
        if c not in distinctive.per_cuisine_freq:
            continue
        vocab = distinctive.match_vocab(c)
        hits = [concept for key, concept in selected.items() if not key.isdisjoint(vocab)]
        counts[c] = len(hits)
        if hits:
            matched[c] = hits
    qualified = [c for c, n in counts.items() if n > cfg.match_min]
    if not qualified:
        return None, counts, matched
    sizes = distinctive.cuisine_sizes
    best = min(qualified, key=lambda c: (-counts[c], -sizes.get(c, 0), c))
    return best, counts, matched


def classify(
    record: PhotoRecord,
    table: DishNameTable,
    distinctive: DistinctiveTable,
    config: RuleConfig | None = None,
) -> RuleClassification:
    """Dish-name rule first; the ingredient rule runs only when it misses."""
    cfg = config or RuleConfig()
    hit = classify_by_dish_name(record, table, cfg)
    if hit is not None:
        cuisine, label = hit
        return RuleClassification(record.photo_id, DISH_NAME_HIT, cuisine, {"dish": label})
    cuisine, counts, matched = classify_by_ingredients(record, distinctive, cfg, table.coverage)
    nonzero = {c: n for c, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])) if n}
    if cuisine is None:
        return RuleClassification(record.photo_id, UNCLASSIFIED, None, {"match_counts": nonzero})
    return RuleClassification(
        record.photo_id,
        INGREDIENT_RULE_HIT,
        cuisine,
        {"match_counts": nonzero, "matched": matched[cuisine]},
    )
