"""Per-user cuisine profile: classification tallies, label aggregates, radar SVG."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence
from xml.sax.saxutils import escape

from .labels import PhotoRecord

SCHEMA_VERSION = 1
SIZE = 600
RADIUS = 220.0


class ProfileError(ValueError):
    pass


class ProfileVersionError(ProfileError):
    pass


@dataclass
class CuisineProfile:
    user_id: str = "user"
    method: str = "rule"
    k: int | None = None
    counts: dict[str, int] = field(default_factory=dict)
    unclassified: int = 0
    label_prob_sums: dict[str, float] = field(default_factory=dict)
    label_counts: dict[str, int] = field(default_factory=dict)

    @property
    def method_label(self) -> str:
        return f"knn(k={self.k})" if self.method == "knn" else self.method

    @property
    def total(self) -> int:
        return sum(self.counts.values()) + self.unclassified

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "user_id": self.user_id,
            "method": self.method,
            "k": self.k,
            "counts": dict(sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))),
            "unclassified": self.unclassified,
            "label_prob_sums": {c: round(v, 6) for c, v in sorted(self.label_prob_sums.items())},
            "label_counts": dict(sorted(self.label_counts.items())),
        }


def _fields(c: Any) -> tuple[str, str | None, str, int | None]:
    if isinstance(c, Mapping):
        return c["photo_id"], c.get("cuisine"), c.get("method", "rule"), c.get("k")
    return c.photo_id, c.cuisine, "knn" if hasattr(c, "neighbor_ids") else "rule", getattr(c, "k", None)


def aggregate(
    classifications: Iterable[Any],
    records: Iterable[PhotoRecord] = (),
    user_id: str = "user",
    min_p: float = 0.0,
) -> CuisineProfile:
    """Tally cuisines and aggregate food labels into a profile.

    ``classifications`` may be rule results, KNN predictions, or their JSON
    dicts; a missing cuisine counts as unclassified. Label sums and counts run
    over the food labels of ``records`` with probability at least ``min_p``.
    """
    counts: dict[str, int] = {}
    unclassified = 0
    seen: set[str] = set()
    methods: set[tuple[str, int | None]] = set()
    for c in classifications:
        pid, cuisine, method, k = _fields(c)
        if pid in seen:
            raise ValueError(f"duplicate classification for photo {pid!r}")
        seen.add(pid)
        methods.add((method, k))
        if cuisine is None:
            unclassified += 1
        else:
            counts[cuisine] = counts.get(cuisine, 0) + 1
    if len(methods) > 1:
        raise ValueError(f"classifications mix methods: {sorted(methods, key=str)}")
    method, k = next(iter(methods)) if methods else ("rule", None)

    sums: dict[str, float] = {}
    occ: dict[str, int] = {}
    for rec in records:
        for a in rec.food_labels:
            if a.probability < min_p:
                continue
            key = a.concept.strip().lower()
            sums[key] = sums.get(key, 0.0) + a.probability
            occ[key] = occ.get(key, 0) + 1
    return CuisineProfile(user_id, method, k if method == "knn" else None, counts, unclassified, sums, occ)


def save_profile(profile: CuisineProfile, path: str | Path) -> None:
    Path(path).write_text(json.dumps(profile.to_dict(), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def profile_from_dict(data: Any) -> CuisineProfile:
    if not isinstance(data, dict):
        raise ProfileError("profile must be a JSON object")
    version = data.get("schema_version")
    if not isinstance(version, int):
        raise ProfileError("profile lacks an integer schema_version")
    if version != SCHEMA_VERSION:
        raise ProfileVersionError(f"profile schema_version {version} is not supported (expected {SCHEMA_VERSION})")
    try:
        prof = CuisineProfile(
            user_id=str(data["user_id"]),
            method=data["method"],
            k=data["k"],
            counts={str(c): int(n) for c, n in data["counts"].items()},
            unclassified=int(data["unclassified"]),
            label_prob_sums={str(c): float(v) for c, v in data["label_prob_sums"].items()},
            label_counts={str(c): int(n) for c, n in data["label_counts"].items()},
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ProfileError(f"malformed profile: {exc!r}") from None
    if prof.method not in ("rule", "knn"):
        raise ProfileError(f"unknown method {prof.method!r}")
    return prof


def load_profile(path: str | Path) -> CuisineProfile:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProfileError(f"{path}: not valid JSON: {exc}") from None
    return profile_from_dict(data)


def radar_points(profile: CuisineProfile, axes: Sequence[str], radius: float = RADIUS) -> list[tuple[float, float]]:
    """Polygon vertices: axis i at angle 2*pi*i/n clockwise from 12 o'clock.

    Radii are counts divided by the largest count on the axes, so the shape
    does not change when all counts are scaled by the same factor.
    """
    if not axes:
        raise ValueError("radar chart needs at least one axis")
    if len(set(axes)) != len(axes) or not all(isinstance(a, str) and a for a in axes):
        raise ValueError("radar axes must be distinct non-empty cuisine names")
    values = [profile.counts.get(a, 0) for a in axes]
    top = max(values)
    c = SIZE / 2
    pts = []
    for i, v in enumerate(values):
        theta = 2 * math.pi * i / len(axes)
        r = radius * (v / top if top else 0.0)
        pts.append((c + r * math.sin(theta), c - r * math.cos(theta)))
    return pts


def _f(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def render_radar(profile: CuisineProfile, axes: Sequence[str], title: str | None = None) -> str:
    """SVG radar chart of the profile's cuisine counts over ``axes``."""
    pts = radar_points(profile, axes)
    n = len(axes)
    c = SIZE / 2
    title = title or f"{profile.user_id}: {profile.method_label}"
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    for frac in (0.25, 0.5, 0.75, 1.0):
        out.append(f'<circle cx="{_f(c)}" cy="{_f(c)}" r="{_f(RADIUS * frac)}" fill="none" stroke="#ccc"/>')
    for i in range(n):
        theta = 2 * math.pi * i / n
        x, y = c + RADIUS * math.sin(theta), c - RADIUS * math.cos(theta)
        out.append(f'<line x1="{_f(c)}" y1="{_f(c)}" x2="{_f(x)}" y2="{_f(y)}" stroke="#ccc"/>')
    points = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
    out.append(f'<polygon points="{points}" fill="#d9534f" fill-opacity="0.35" stroke="#d9534f" stroke-width="2"/>')
    for i, axis in enumerate(axes):
        theta = 2 * math.pi * i / n
        x, y = c + (RADIUS + 28) * math.sin(theta), c - (RADIUS + 28) * math.cos(theta)
        anchor = "middle" if abs(math.sin(theta)) < 0.2 else ("start" if math.sin(theta) > 0 else "end")
        label = f"{axis} ({profile.counts.get(axis, 0)})"
        out.append(
            f'<text x="{_f(x)}" y="{_f(y)}" text-anchor="{anchor}" dominant-baseline="middle" '
            f'font-family="sans-serif" font-size="13">{escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def default_axes(profile: CuisineProfile, cuisine_sizes: Mapping[str, int] | None = None, n: int | None = None) -> list[str]:
    """Axis order: descending corpus size when known, else descending count."""
    if cuisine_sizes:
        axes = [c for c, _ in sorted(cuisine_sizes.items(), key=lambda kv: (-kv[1], kv[0]))]
    else:
        axes = [c for c, _ in sorted(profile.counts.items(), key=lambda kv: (-kv[1], kv[0]))]
    return axes[:n] if n else axes


def write_radar(profile: CuisineProfile, axes: Sequence[str], path: str | Path, title: str | None = None) -> None:
    Path(path).write_text(render_radar(profile, axes, title), encoding="utf-8")


def read_classifications(path: str | Path) -> list[dict]:
    out = []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            item = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProfileError(f"{path}:{n}: {exc}") from None
        if not isinstance(item, dict) or "photo_id" not in item:
            raise ProfileError(f"{path}:{n}: classification needs a photo_id")
        out.append(item)
    return out
