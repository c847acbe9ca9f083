"""Canonical token sets for ingredient phrases and recognition labels."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .porter import porter_stem

# Letters only: digits, underscores and punctuation all act as separators.
_TOKEN = re.compile(r"[^\W\d_]+")


def parse_token_list(text: str) -> list[str]:
    """Parse a one-entry-per-line list; ``#`` starts a comment, blanks skipped."""
    out = []
    for line in text.splitlines():
        entry = line.split("#", 1)[0].strip().lower()
        if entry:
            out.append(entry)
    return out


def load_token_list(path: str | Path) -> list[str]:
    return parse_token_list(Path(path).read_text(encoding="utf-8"))


def resource_list(name: str) -> list[str]:
    """Read one of the shipped list files from ``cuisine_profiler/resources``."""
    text = resources.files("cuisine_profiler").joinpath("resources").joinpath(name).read_text("utf-8")
    return parse_token_list(text)


@dataclass(frozen=True)
class NormalizationConfig:
    stop_modifiers: frozenset[str] = field(default_factory=frozenset)
    min_token_length: int = 2

    def __post_init__(self) -> None:
        if self.min_token_length < 1:
            raise ValueError("min_token_length must be >= 1")
        lowered = frozenset(t.lower() for t in self.stop_modifiers)
        object.__setattr__(self, "stop_modifiers", lowered)

    @classmethod
    def default(cls) -> "NormalizationConfig":
        return _default_config()

    @classmethod
    def from_file(cls, path: str | Path, min_token_length: int = 2) -> "NormalizationConfig":
        return cls(frozenset(load_token_list(path)), min_token_length)


@lru_cache(maxsize=1)
def _default_config() -> NormalizationConfig:
    return NormalizationConfig(frozenset(resource_list("stop_modifiers.txt")))


def tokenize(phrase: str) -> list[str]:
    return _TOKEN.findall(phrase.lower())


@lru_cache(maxsize=200_000)
def _normalize(phrase: str, stop: frozenset[str], min_len: int) -> frozenset[str]:
    out = set()
    for tok in tokenize(phrase):
        if tok in stop:
            continue
        stem = porter_stem(tok)
        if len(stem) >= min_len:
            out.add(stem)
    return frozenset(out)


def normalize_phrase(phrase: str, config: NormalizationConfig | None = None) -> frozenset[str]:
    """Lowercase, split on non-letters, drop stop modifiers, Porter-stem.

    Stems shorter than ``config.min_token_length`` are discarded, so a phrase
    made only of modifiers yields the empty set.

    >>> sorted(normalize_phrase("Fresh Chopped Tomatoes"))
    ['tomato']
    """
    cfg = config or _default_config()
    return _normalize(phrase, cfg.stop_modifiers, cfg.min_token_length)


def normalize_many(phrases: Iterable[str], config: NormalizationConfig | None = None) -> frozenset[str]:
    """Union of the normalized tokens of several phrases."""
    out: set[str] = set()
    for p in phrases:
        out |= normalize_phrase(p, config)
    return frozenset(out)


def match_tokens(a: Iterable[str], b: Iterable[str]) -> bool:
    """True when the two token sets share at least one token."""
    a = a if isinstance(a, (set, frozenset)) else set(a)
    return not a.isdisjoint(b)
