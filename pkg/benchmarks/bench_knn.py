"""Numba vs pure-numpy timings for the hot kernels, on Yummly-sized synthetic data.

    python benchmarks/bench_knn.py [--recipes 39774] [--queries 2000] [--photos 5000]

The synthetic corpus mimics the public recipe set: 20 cuisines with its
size skew, a Zipf-distributed vocabulary of about 6.7k phrases, and around
eleven ingredients per recipe. Every timed pair is also checked for
identical output. The last section times corpus load, the distinctive table
and a full 80/20 k=10 evaluation, the operations with runtime budgets.
"""

from __future__ import annotations

import argparse
import json
import tempfile
import time
from pathlib import Path

import numpy as np

from cuisine_profiler import _accel
from cuisine_profiler.corpus import cuisine_counts, load_corpus, split
from cuisine_profiler.distinctive import build_distinctive_table
from cuisine_profiler.knn import KnnModel, evaluate, sweep_k

CUISINE_SIZES = {
    "italian": 7838, "mexican": 6438, "southern_us": 4320, "indian": 3003, "chinese": 2673,
    "french": 2646, "cajun_creole": 1546, "thai": 1539, "japanese": 1423, "greek": 1175,
    "spanish": 989, "korean": 830, "vietnamese": 825, "moroccan": 821, "british": 804,
    "filipino": 755, "irish": 667, "jamaican": 526, "russian": 489, "brazilian": 467,
}
WORDS = ("salt onion garlic pepper oil butter sugar flour tomato water egg cheese milk lime "
         "cilantro cumin ginger soy sauce rice chicken beef pork basil oregano parmesan ricotta "
         "tortilla salsa corn bean lemon vinegar wine cream chili paprika thyme parsley").split()


def synthetic_rows(n: int, seed: int = 0) -> list[dict]:
    rng = np.random.default_rng(seed)
    phrases = sorted({" ".join(rng.choice(WORDS, size=rng.integers(1, 4))) + f" {i % 97}"
                      for i in range(7000)})
    vocab = np.array(phrases)
    zipf = 1.0 / np.arange(1, len(vocab) + 1) ** 1.1
    names = list(CUISINE_SIZES)
    weights = np.array(list(CUISINE_SIZES.values()), dtype=float)
    rows = []
    for rid in range(n):
        c = int(rng.choice(len(names), p=weights / weights.sum()))
        # each cuisine prefers a rotated slice of the vocabulary
        p = np.roll(zipf, c * 300)
        ing = rng.choice(len(vocab), size=max(2, int(rng.normal(11, 4))), replace=False, p=p / p.sum())
        rows.append({"id": rid, "cuisine": names[c], "ingredients": [str(vocab[j]) for j in ing]})
    return rows


def timed(fn, repeat: int = 1):
    fn()  # warm-up, includes JIT compilation
    t0 = time.perf_counter()
    for _ in range(repeat):
        out = fn()
    return (time.perf_counter() - t0) / repeat, out


def compare(name: str, fn, repeat: int = 1) -> None:
    results = {}
    for backend in ("numpy", "numba"):
        if backend == "numba" and not _accel.HAVE_NUMBA:
            print(f"{name:<40} numba not installed")
            return
        _accel.set_backend(backend)
        results[backend] = timed(fn, repeat)
    (t_np, out_np), (t_nb, out_nb) = results["numpy"], results["numba"]
    same = _equal(out_np, out_nb)
    print(f"{name:<40} numpy {t_np * 1e3:10.2f} ms   numba {t_nb * 1e3:10.2f} ms   "
          f"speedup {t_np / t_nb:5.2f}x   identical={same}")


def _equal(a, b) -> bool:
    if isinstance(a, np.ndarray):
        return bool(np.array_equal(a, b))
    return a == b


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--recipes", type=int, default=39_774)
    ap.add_argument("--queries", type=int, default=2000)
    ap.add_argument("--photos", type=int, default=5000)
    ap.add_argument("--skip-budgets", action="store_true", help="Skip the corpus/evaluation timings.")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "train.json"
        path.write_text(json.dumps(synthetic_rows(args.recipes)))
        t0 = time.perf_counter()
        corpus = load_corpus(path)
        counts = cuisine_counts(corpus)
        t_load = time.perf_counter() - t0
    print(f"synthetic corpus: {len(corpus)} recipes, {len(counts)} cuisines, "
          f"{len(corpus.vocabulary)} distinct ingredients\n")

    model = KnnModel.from_corpus(corpus, k=10)
    rng = np.random.default_rng(1)
    picks = rng.choice(len(corpus), size=args.queries, replace=False)
    queries = [(f"q{i}", corpus.recipes[int(i)].ingredients_norm) for i in picks]
    mask = np.zeros(len(model.vocab) + 1, dtype=np.bool_)
    mask[[model.vocab[t] for t in queries[0][1]]] = True

    compare("intersection counts (1 query)",
            lambda: _accel.intersection_counts(model.indptr, model.indices, mask), repeat=50)
    for metric in ("jaccard", "cosine_binary"):
        m = KnnModel.from_corpus(corpus, k=10, metric=metric)
        compare(f"sweep_k {metric} k=1..25 ({args.queries} q)",
                lambda m=m: {k: [p.to_dict() for p in ps] for k, ps in sweep_k(m, queries, range(1, 26)).items()})

    basis = rng.normal(size=(args.photos // 4, 1024))
    unit = basis[rng.integers(len(basis), size=args.photos)] + rng.normal(scale=0.12, size=(args.photos, 1024))
    unit /= np.linalg.norm(unit, axis=1, keepdims=True)
    has = rng.random(args.photos) < 0.9
    compare(f"near-duplicate sweep ({args.photos} photos)",
            lambda: _accel.near_duplicate_keep(unit, has, 0.95))

    if args.skip_budgets:
        return
    _accel.set_backend("numba" if _accel.HAVE_NUMBA else "numpy")
    print(f"\nbudgeted operations ({_accel.backend()} backend)")
    print(f"  corpus load + stats            {t_load:8.2f} s   (budget 5 s)")
    t0 = time.perf_counter()
    build_distinctive_table(corpus)
    print(f"  distinctive table              {time.perf_counter() - t0:8.2f} s   (budget 30 s)")
    t0 = time.perf_counter()
    train, test = split(corpus, 0.2, seed=0)
    ev = evaluate(KnnModel.from_corpus(train, k=10), test)
    print(f"  80/20 split + k=10 evaluation  {time.perf_counter() - t0:8.2f} s   (budget 600 s; "
          f"accuracy {ev.accuracy:.3f} on synthetic data)")


if __name__ == "__main__":
    main()
