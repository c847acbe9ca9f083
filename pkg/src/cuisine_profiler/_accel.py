"""Hot loops: set-intersection counts for KNN and the near-duplicate sweep.

Each kernel has a numba version and a pure-numpy version with identical
results. Numba is used when importable unless ``PROFILER_NO_NUMBA`` is set to
a non-empty value other than ``0``; :func:`set_backend` switches at runtime.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
_DISABLED = os.environ.get("PROFILER_NO_NUMBA", "") not in ("", "0")
_use_numba = HAVE_NUMBA and not _DISABLED


def backend() -> str:
    return "numba" if _use_numba else "numpy"


def set_backend(name: str) -> None:
    global _use_numba
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    _use_numba = name == "numba"


# -- intersection counts ------------------------------------------------------


def _intersections_numpy(indptr: np.ndarray, indices: np.ndarray, mask: np.ndarray) -> np.ndarray:
    hits = np.concatenate(([0], np.cumsum(mask[indices], dtype=np.int64)))
    return (hits[indptr[1:]] - hits[indptr[:-1]]).astype(np.int32)


def _intersections_py(indptr, indices, mask):  # numba source
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.int32)
    for r in range(n):
        c = 0
        for j in range(indptr[r], indptr[r + 1]):
            if mask[indices[j]]:
                c += 1
        out[r] = c
    return out


def _near_dup_numpy(unit: np.ndarray, has: np.ndarray, threshold: float) -> np.ndarray:
    keep = np.ones(unit.shape[0], dtype=np.bool_)
    accepted = np.empty(unit.shape[0], dtype=np.int64)
    m = 0
    for i in range(unit.shape[0]):
        if not has[i]:
            continue
        if m and np.max(unit[accepted[:m]] @ unit[i]) >= threshold:
            keep[i] = False
            continue
        accepted[m] = i
        m += 1
    return keep


def _near_dup_py(unit, has, threshold):  # numba source
    n, d = unit.shape
    keep = np.ones(n, dtype=np.bool_)
    accepted = np.empty(n, dtype=np.int64)
    m = 0
    for i in range(n):
        if not has[i]:
            continue
        dup = False
        for a in range(m):
            j = accepted[a]
            s = 0.0
            for t in range(d):
                s += unit[j, t] * unit[i, t]
            if s >= threshold:
                dup = True
                break
        if dup:
            keep[i] = False
        else:
            accepted[m] = i
            m += 1
    return keep


if HAVE_NUMBA:
    _intersections_nb = numba.njit(cache=True, nogil=True)(_intersections_py)
    _near_dup_nb = numba.njit(cache=True, nogil=True)(_near_dup_py)


def intersection_counts(indptr: np.ndarray, indices: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """For each CSR row, how many of its column indices are set in ``mask``."""
    if _use_numba:
        return _intersections_nb(indptr, indices, mask)
    return _intersections_numpy(indptr, indices, mask)


def near_duplicate_keep(unit: np.ndarray, has: np.ndarray, threshold: float) -> np.ndarray:
    """Greedy first-wins sweep over unit-norm rows.

    Row ``i`` is dropped when its dot product with an already kept row is at
    least ``threshold``. Rows with ``has[i]`` false are always kept and never
    compared against.
    """
    unit = np.ascontiguousarray(unit, dtype=np.float64)
    has = np.ascontiguousarray(has, dtype=np.bool_)
    if _use_numba:
        return _near_dup_nb(unit, has, float(threshold))
    return _near_dup_numpy(unit, has, float(threshold))
