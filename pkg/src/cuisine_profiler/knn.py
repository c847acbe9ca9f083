"""K-nearest-neighbour cuisine prediction over ingredient token sets."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Context, Decimal
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _accel
from .corpus import Corpus

METRICS = ("jaccard", "cosine_binary")


def set_distance(a: Iterable[str], b: Iterable[str], metric: str = "jaccard") -> float:
    """Distance in [0, 1] between two token sets.

    jaccard is ``1 - |a&b| / |a|b|`` with d({}, {}) = 0. cosine_binary is
    ``1 - |a&b| / sqrt(|a| |b|)``; it is 0 for two empty sets and 1 when only
    one side is empty.

    Cosine is evaluated as ``1 - sqrt(|a&b|**2 / (|a| |b|))`` so that equal
    exact distances always give equal floats (one rounded division, then a
    monotone sqrt), which keeps distance ties visible to the id tie-break.
    """
    a, b = set(a), set(b)
    inter = len(a & b)
    if metric == "jaccard":
        union = len(a) + len(b) - inter
        return 0.0 if union == 0 else 1.0 - inter / union
    if metric == "cosine_binary":
        if not a and not b:
            return 0.0
        if not a or not b:
            return 1.0
        return 1.0 - math.sqrt(inter * inter / (len(a) * len(b)))
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def distances_from_counts(inter: np.ndarray, sizes: np.ndarray, q: int, metric: str) -> np.ndarray:
    # Same arithmetic as set_distance, vectorized; keep the two in step.
    inter = inter.astype(np.float64)
    sizes = sizes.astype(np.float64)
    if metric == "jaccard":
        union = sizes + q - inter
        with np.errstate(invalid="ignore", divide="ignore"):
            d = 1.0 - inter / union
        d[union == 0] = 0.0
        return d
    if metric == "cosine_binary":
        with np.errstate(invalid="ignore", divide="ignore"):
            d = 1.0 - np.sqrt(inter * inter / (sizes * q))
        if q == 0:
            d[:] = 1.0
            d[sizes == 0] = 0.0
        else:
            d[sizes == 0] = 1.0
        return d
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


_DEC = Context(prec=50)


def exact_distance(inter: int, size: int, q: int, metric: str) -> Fraction | Decimal:
    """High-precision distance used only to settle vote ties.

    jaccard is an exact fraction; cosine_binary is a 50-digit decimal,
    rounded to 40 places so that mathematically equal values compare equal.
    """
    if metric == "jaccard":
        union = size + q - inter
        return Fraction(0) if union == 0 else 1 - Fraction(inter, union)
    if size == 0 and q == 0:
        return Decimal(0)
    if size == 0 or q == 0:
        return Decimal(1)
    sim = _DEC.sqrt(_DEC.divide(Decimal(inter * inter), Decimal(size * q)))
    return _DEC.subtract(Decimal(1), sim)


def _mean_key(values: list, metric: str):
    if metric == "jaccard":
        return sum(values, Fraction(0)) / len(values)
    total = sum(values, Decimal(0))
    return _DEC.divide(total, Decimal(len(values))).quantize(Decimal("1e-40"), context=_DEC)


@dataclass(frozen=True)
class KnnPrediction:
    photo_id: str
    cuisine: str
    k: int
    neighbor_ids: tuple[int, ...]
    vote_counts: dict[str, int]
    distances: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "photo_id": self.photo_id,
            "method": "knn",
            "k": self.k,
            "cuisine": self.cuisine,
            "neighbor_ids": list(self.neighbor_ids),
            "vote_counts": dict(self.vote_counts),
            "distances": list(self.distances),
        }


class KnnModel:
    """Training recipes packed as a CSR incidence structure over a token vocabulary."""

    def __init__(
        self,
        training: Sequence[tuple[int, frozenset[str], str]],
        k: int = 10,
        metric: str = "jaccard",
    ) -> None:
        if not training:
            raise ValueError("training set is empty")
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
        self.metric = metric
        self.ids = np.array([t[0] for t in training], dtype=np.int64)
        if len(np.unique(self.ids)) != len(self.ids):
            raise ValueError("training ids must be unique")
        self.cuisines = [t[2] for t in training]
        self.tokens = [frozenset(t[1]) for t in training]
        self.vocab: dict[str, int] = {}
        for toks in self.tokens:
            for tok in sorted(toks):
                self.vocab.setdefault(tok, len(self.vocab))
        indptr = np.zeros(len(training) + 1, dtype=np.int64)
        cols = []
        for i, toks in enumerate(self.tokens):
            cols.extend(sorted(self.vocab[t] for t in toks))
            indptr[i + 1] = len(cols)
        self.indptr = indptr
        self.indices = np.array(cols, dtype=np.int64)
        self.sizes = np.diff(indptr).astype(np.int64)
        self.k = self._check_k(k)

    @classmethod
    def from_corpus(cls, corpus: Corpus, k: int = 10, metric: str = "jaccard") -> "KnnModel":
        return cls([(r.id, r.ingredients_norm, r.cuisine) for r in corpus], k, metric)

    def __len__(self) -> int:
        return len(self.ids)

    def _check_k(self, k: int) -> int:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if k > len(self):
            raise ValueError(f"k={k} exceeds training size {len(self)}")
        return int(k)

    def with_k(self, k: int) -> "KnnModel":
        clone = object.__new__(KnnModel)
        clone.__dict__.update(self.__dict__)
        clone.k = self._check_k(k)
        return clone

    def _scan(self, query: Iterable[str]) -> tuple[np.ndarray, int]:
        q = frozenset(query)
        mask = np.zeros(len(self.vocab) + 1, dtype=np.bool_)
        known = [self.vocab[t] for t in q if t in self.vocab]
        mask[known] = True
        return _accel.intersection_counts(self.indptr, self.indices, mask), len(q)

    def distances(self, query: Iterable[str]) -> np.ndarray:
        inter, q = self._scan(query)
        return distances_from_counts(inter, self.sizes, q, self.metric)

    def nearest(self, query: Iterable[str], kmax: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
        """Row positions of the ``kmax`` nearest points, their distances,
        their intersection counts with the query, and the query size.

        Equal distances are ordered by smaller training id.
        """
        kmax = self._check_k(kmax)
        inter, q = self._scan(query)
        d = distances_from_counts(inter, self.sizes, q, self.metric)
        if kmax < len(d):
            kth = np.partition(d, kmax - 1)[kmax - 1]
            cand = np.flatnonzero(d <= kth)
        else:
            cand = np.arange(len(d))
        order = cand[np.lexsort((self.ids[cand], d[cand]))][:kmax]
        return order, d[order], inter[order], q

    def vote(self, rows: np.ndarray, dists: np.ndarray, inter: np.ndarray, q: int, photo_id: str = "") -> KnnPrediction:
        """Majority vote; ties go to the smaller exact mean distance, then the name."""
        votes: Counter[str] = Counter(self.cuisines[r] for r in rows)
        top = max(votes.values())
        leaders = sorted(c for c, n in votes.items() if n == top)
        if len(leaders) == 1:
            best = leaders[0]
        else:
            exact: dict[str, list] = {c: [] for c in leaders}
            for r, i in zip(rows, inter):
                c = self.cuisines[r]
                if c in exact:
                    exact[c].append(exact_distance(int(i), int(self.sizes[r]), q, self.metric))
            best = min(leaders, key=lambda c: (_mean_key(exact[c], self.metric), c))
        return KnnPrediction(
            photo_id=photo_id,
            cuisine=best,
            k=len(rows),
            neighbor_ids=tuple(int(self.ids[r]) for r in rows),
            vote_counts=dict(sorted(votes.items(), key=lambda kv: (-kv[1], kv[0]))),
            distances=tuple(float(x) for x in dists),
        )


def predict(model: KnnModel, query: Iterable[str], photo_id: str = "") -> KnnPrediction:
    """Majority cuisine among the ``model.k`` nearest training recipes.

    Vote ties go to the cuisine whose tied neighbours are closer on average,
    then to the alphabetically first cuisine.
    """
    rows, dists, inter, q = model.nearest(query, model.k)
    return model.vote(rows, dists, inter, q, photo_id)


def sweep_k(
    model: KnnModel,
    queries: Sequence[tuple[str, frozenset[str]]],
    k_values: Sequence[int],
    jobs: int = 1,
) -> dict[int, list[KnnPrediction]]:
    """Predictions for every k, sorting each query's neighbours only once."""
    if not k_values:
        return {}
    kmax = model._check_k(max(k_values))
    for k in k_values:
        model._check_k(k)

    def one(item):
        pid, q = item
        rows, dists, inter, size = model.nearest(q, kmax)
        return [model.vote(rows[:k], dists[:k], inter[:k], size, pid) for k in k_values]

    results = _map(one, queries, jobs)
    return {k: [r[i] for r in results] for i, k in enumerate(k_values)}


def _map(fn, items, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


@dataclass
class Evaluation:
    k: int
    metric: str
    accuracy: float
    n: int
    correct: int
    labels: list[str]
    confusion: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def recall(self) -> dict[str, float]:
        """Per true cuisine: fraction of its test recipes predicted correctly."""
        out = {}
        for t in self.labels:
            row = self.confusion.get(t, {})
            total = sum(row.values())
            if total:
                out[t] = row.get(t, 0) / total
        return out

    @property
    def majority_baseline(self) -> float:
        """Accuracy of always predicting the most common test cuisine."""
        return max(sum(row.values()) for row in self.confusion.values()) / self.n

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "metric": self.metric,
            "accuracy": self.accuracy,
            "majority_baseline": self.majority_baseline,
            "n": self.n,
            "correct": self.correct,
            "recall": self.recall,
            "confusion": self.confusion,
        }

    def format_table(self) -> str:
        width = max([len(x) for x in self.labels] + [6])
        head = " " * width + " " + " ".join(f"{c[:6]:>6}" for c in self.labels) + "  recall"
        lines = [
            f"k={self.k} accuracy {self.accuracy:.4f} ({self.correct}/{self.n}), "
            f"majority baseline {self.majority_baseline:.4f}",
            head,
        ]
        recall = self.recall
        for t in self.labels:
            row = self.confusion.get(t, {})
            cells = " ".join(f"{row.get(p, 0):>6}" for p in self.labels)
            lines.append(f"{t:<{width}} {cells}  {recall.get(t, 0.0):.3f}")
        return "\n".join(lines)


def _evaluation(model: KnnModel, test: Corpus, k: int, preds: Sequence[str]) -> Evaluation:
    labels = sorted(set(model.cuisines) | {r.cuisine for r in test})
    confusion: dict[str, dict[str, int]] = {t: {} for t in labels}
    correct = 0
    for r, p in zip(test, preds):
        confusion[r.cuisine][p] = confusion[r.cuisine].get(p, 0) + 1
        correct += p == r.cuisine
    confusion = {t: dict(sorted(row.items())) for t, row in confusion.items()}
    return Evaluation(k, model.metric, correct / len(test), len(test), correct, labels, confusion)


def evaluate(model: KnnModel, test: Corpus, jobs: int = 1) -> Evaluation:
    """Accuracy and confusion counts (true cuisine -> predicted cuisine -> n) at ``model.k``."""
    return evaluate_sweep(model, test, [model.k], jobs)[0]


def evaluate_sweep(model: KnnModel, test: Corpus, k_values: Sequence[int], jobs: int = 1) -> list[Evaluation]:
    """One :class:`Evaluation` per k; neighbours are searched once per test recipe."""
    if len(test) == 0:
        raise ValueError("test set is empty")
    queries = [(str(r.id), r.ingredients_norm) for r in test]
    preds = sweep_k(model, queries, k_values, jobs)
    return [_evaluation(model, test, k, [p.cuisine for p in preds[k]]) for k in k_values]
