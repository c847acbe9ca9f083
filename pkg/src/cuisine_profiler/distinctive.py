"""Per-cuisine ingredient frequencies and distinctive-ingredient sets."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import Corpus, cuisine_counts
from .normalize import NormalizationConfig, load_token_list, normalize_phrase, resource_list

Ranked = list[tuple[frozenset, int]]

DEFAULT_TOP_N = 50


class UnknownCuisineError(KeyError):
    pass


def ingredient_key(entry: frozenset) -> str:
    """Stable text form of a token set, also the tie-break order."""
    return " ".join(sorted(entry))


def load_ubiquitous(path: str | Path | None = None, config: NormalizationConfig | None = None) -> frozenset[str]:
    """Tokens of the ubiquitous-ingredient list (shipped default or a file)."""
    phrases = load_token_list(path) if path else resource_list("ubiquitous.txt")
    out: set[str] = set()
    for p in phrases:
        out |= normalize_phrase(p, config)
    return frozenset(out)


def is_ubiquitous(entry: frozenset, ubiquitous: frozenset[str]) -> bool:
    return bool(entry) and entry <= ubiquitous


def build_frequency_table(
    corpus: Corpus, config: NormalizationConfig | None = None
) -> dict[str, Ranked]:
    """Count, per cuisine, how many recipes contain each normalized ingredient.

    An ingredient is counted at most once per recipe. Lists are sorted by
    count descending, ties by the ingredient's token key.
    """
    counts: dict[str, Counter] = {}
    for r in corpus:
        entries = {normalize_phrase(p, config) for p in r.ingredients_raw}
        entries.discard(frozenset())
        counts.setdefault(r.cuisine, Counter()).update(entries)
    return {
        c: sorted(cnt.items(), key=lambda kv: (-kv[1], ingredient_key(kv[0])))
        for c, cnt in sorted(counts.items())
    }


def _without_ubiquitous(ranked: Ranked, ubiquitous: frozenset[str]) -> Ranked:
    return [(e, n) for e, n in ranked if not is_ubiquitous(e, ubiquitous)]


def common_ingredients(
    table: dict[str, Ranked], ubiquitous: frozenset[str], top_n: int, share: float = 0.5
) -> frozenset:
    """Ingredients in the top ``top_n`` of at least ``share`` of all cuisines.

    At least two cuisines must agree, otherwise a two-cuisine corpus would
    flag every top ingredient as common.
    """
    seen: Counter = Counter()
    for ranked in table.values():
        seen.update(e for e, _ in _without_ubiquitous(ranked, ubiquitous)[:top_n])
    need = max(2, share * len(table))
    return frozenset(e for e, n in seen.items() if n >= need)


def derive_distinctive(
    table: dict[str, Ranked], ubiquitous: frozenset[str], top_n: int = DEFAULT_TOP_N
) -> dict[str, frozenset]:
    """Top ``top_n`` ingredients per cuisine once ubiquitous and common ones are removed."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    common = common_ingredients(table, ubiquitous, top_n)
    out = {}
    for c, ranked in table.items():
        kept = [e for e, _ in _without_ubiquitous(ranked, ubiquitous) if e not in common]
        out[c] = frozenset(kept[:top_n])
    return out


def frequent_set(
    table: dict[str, Ranked], cuisine: str, top_n: int, ubiquitous: frozenset[str] = frozenset()
) -> Ranked:
    if cuisine not in table:
        raise UnknownCuisineError(cuisine)
    if top_n <= 0:
        return []
    return _without_ubiquitous(table[cuisine], ubiquitous)[:top_n]


@dataclass(frozen=True)
class DistinctiveTable:
    per_cuisine_freq: dict[str, Ranked]
    ubiquitous: frozenset[str]
    distinctive: dict[str, frozenset]
    top_n: int
    cuisine_sizes: dict[str, int] = field(default_factory=dict)
    # most frequent raw phrase behind each normalized ingredient, for display
    phrases: dict[frozenset, str] = field(default_factory=dict, compare=False)
    _vocab_cache: dict[str, frozenset[str]] = field(default_factory=dict, init=False, compare=False, repr=False)

    @property
    def cuisines(self) -> list[str]:
        return list(self.per_cuisine_freq)

    def frequent(self, cuisine: str, top_n: int | None = None) -> Ranked:
        return frequent_set(self.per_cuisine_freq, cuisine, self.top_n if top_n is None else top_n, self.ubiquitous)

    def match_set(self, cuisine: str) -> frozenset:
        """Distinctive plus frequent ingredients of a cuisine, the rule classifier's lookup."""
        if cuisine not in self.per_cuisine_freq:
            raise UnknownCuisineError(cuisine)
        return self.distinctive[cuisine] | frozenset(e for e, _ in self.frequent(cuisine))

    def match_vocab(self, cuisine: str) -> frozenset[str]:
        """All tokens of :meth:`match_set`; a label matches when it shares one."""
        if cuisine not in self._vocab_cache:
            self._vocab_cache[cuisine] = frozenset().union(*self.match_set(cuisine))
        return self._vocab_cache[cuisine]

    def label(self, entry: frozenset) -> str:
        return self.phrases.get(entry, ingredient_key(entry))

    def to_json(self) -> dict:
        out = {"top_n": self.top_n, "ubiquitous": sorted(self.ubiquitous), "cuisines": {}}
        for c, ranked in self.per_cuisine_freq.items():
            dist = sorted(self.distinctive[c], key=ingredient_key)
            out["cuisines"][c] = {
                "recipes": self.cuisine_sizes.get(c, 0),
                "distinctive": [
                    {"tokens": sorted(e), "phrase": self.label(e)}
                    for e in sorted(dist, key=lambda e: _rank_of(ranked, e))
                ],
                "frequent": [
                    {"tokens": sorted(e), "phrase": self.label(e), "count": n}
                    for e, n in self.frequent(c)
                ],
            }
        return out


def _rank_of(ranked: Ranked, entry: frozenset) -> int:
    for i, (e, _) in enumerate(ranked):
        if e == entry:
            return i
    return len(ranked)


def _representative_phrases(corpus: Corpus, config: NormalizationConfig | None) -> dict[frozenset, str]:
    seen: dict[frozenset, Counter] = {}
    for r in corpus:
        for p in r.ingredients_raw:
            key = normalize_phrase(p, config)
            if key:
                seen.setdefault(key, Counter())[p.lower()] += 1
    return {k: min(c.items(), key=lambda kv: (-kv[1], kv[0]))[0] for k, c in seen.items()}


def build_distinctive_table(
    corpus: Corpus,
    config: NormalizationConfig | None = None,
    ubiquitous: Iterable[str] | None = None,
    top_n: int = DEFAULT_TOP_N,
) -> DistinctiveTable:
    ubiq = load_ubiquitous(config=config) if ubiquitous is None else frozenset(ubiquitous)
    table = build_frequency_table(corpus, config)
    return DistinctiveTable(
        per_cuisine_freq=table,
        ubiquitous=ubiq,
        distinctive=derive_distinctive(table, ubiq, top_n),
        top_n=top_n,
        cuisine_sizes=cuisine_counts(corpus),
        phrases=_representative_phrases(corpus, config),
    )
