"""Recognition results for photos: general labels, food labels, embeddings.

Two backends produce :class:`PhotoRecord` objects. ``FixtureBackend`` reads
one JSON sidecar per photo (``<photo_id>.labels.json``) and is what the tests
and the demo use. ``HttpBackend`` posts an image reference to a recognition
service and maps the JSON response through a small path config.
"""

from __future__ import annotations

import base64
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import httpx
import numpy as np

log = logging.getLogger(__name__)

EMBEDDING_DIM = 1024
EXIF_FORMAT = "%Y:%m:%d %H:%M:%S"
SIDECAR_SUFFIX = ".labels.json"
API_KEY_ENV = "PROFILER_API_KEY"
MODELS = ("general", "food", "embedding")


class LabelProviderError(Exception):
    pass


class FixtureError(LabelProviderError):
    pass


class SchemaError(LabelProviderError):
    pass


class BackendHTTPError(LabelProviderError):
    def __init__(self, message: str, status: int | None, retryable: bool) -> None:
        super().__init__(message)
        self.status = status
        self.retryable = retryable


@dataclass(frozen=True)
class LabelAnnotation:
    concept: str
    probability: float
    model: str

    def __post_init__(self) -> None:
        if not isinstance(self.concept, str) or not self.concept.strip():
            raise SchemaError("concept must be a non-empty string")
        p = self.probability
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 <= p <= 1.0:
            raise SchemaError(f"probability for {self.concept!r} out of [0, 1]: {p!r}")
        if self.model not in ("general", "food"):
            raise SchemaError(f"unknown label model {self.model!r}")


class Embedding:
    """Read-only 1024-d float vector with value equality."""

    __slots__ = ("values",)

    def __init__(self, values: Sequence[float] | np.ndarray) -> None:
        arr = np.array(values, dtype=np.float64)
        if arr.shape != (EMBEDDING_DIM,):
            raise SchemaError(f"embedding must have length {EMBEDDING_DIM}, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise SchemaError("embedding has non-finite values")
        arr.setflags(write=False)
        self.values = arr

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Embedding) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def __repr__(self) -> str:
        return f"Embedding(norm={float(np.linalg.norm(self.values)):.4g})"


def embedding_similarity(a: Embedding | np.ndarray, b: Embedding | np.ndarray) -> float:
    """Cosine similarity a.b / (|a| |b|); raises ValueError on a zero vector."""
    va = a.values if isinstance(a, Embedding) else np.asarray(a, dtype=np.float64)
    vb = b.values if isinstance(b, Embedding) else np.asarray(b, dtype=np.float64)
    na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity undefined for a zero-norm embedding")
    return float(np.clip(np.dot(va, vb) / (na * nb), -1.0, 1.0))


def _sorted_labels(labels: Iterable[LabelAnnotation]) -> tuple[LabelAnnotation, ...]:
    # stable: equal probabilities keep backend order
    return tuple(sorted(labels, key=lambda a: -a.probability))


def check_exif_datetime(value: str | None) -> str | None:
    if value is None:
        return None
    if not isinstance(value, str):
        raise SchemaError(f"exif_datetime must be a string, got {value!r}")
    value = value.strip()
    if not value:
        return None
    try:
        datetime.strptime(value, EXIF_FORMAT)
    except ValueError as exc:
        raise SchemaError(f"exif_datetime {value!r} is not YYYY:MM:DD HH:MM:SS") from exc
    return value


@dataclass(frozen=True)
class PhotoRecord:
    photo_id: str
    exif_datetime: str | None = None
    general_labels: tuple[LabelAnnotation, ...] = ()
    food_labels: tuple[LabelAnnotation, ...] = ()
    embedding: Embedding | None = None

    def __post_init__(self) -> None:
        if not self.photo_id:
            raise SchemaError("photo_id must be non-empty")
        object.__setattr__(self, "exif_datetime", check_exif_datetime(self.exif_datetime))
        object.__setattr__(self, "general_labels", _sorted_labels(self.general_labels))
        object.__setattr__(self, "food_labels", _sorted_labels(self.food_labels))

    def to_dict(self) -> dict:
        return {
            "photo_id": self.photo_id,
            "exif_datetime": self.exif_datetime,
            "general": [{"concept": a.concept, "p": a.probability} for a in self.general_labels],
            "food": [{"concept": a.concept, "p": a.probability} for a in self.food_labels],
            "embedding": None if self.embedding is None else self.embedding.values.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))


def _labels_from(items: Any, model: str, where: str) -> list[LabelAnnotation]:
    if items is None:
        return []
    if not isinstance(items, list):
        raise SchemaError(f"{where}: {model!r} must be a list")
    out = []
    for item in items:
        if not isinstance(item, dict) or "concept" not in item or "p" not in item:
            raise SchemaError(f"{where}: {model} label needs 'concept' and 'p'")
        try:
            out.append(LabelAnnotation(item["concept"], item["p"], model))
        except SchemaError as exc:
            raise SchemaError(f"{where}: {exc}") from None
    return out


def record_from_dict(data: Mapping[str, Any], models: Iterable[str] = MODELS, where: str = "record") -> PhotoRecord:
    """Build a PhotoRecord from the sidecar schema, keeping only ``models``."""
    if not isinstance(data, Mapping):
        raise SchemaError(f"{where}: expected a JSON object")
    models = set(models)
    unknown = models - set(MODELS)
    if unknown:
        raise ValueError(f"unknown models requested: {sorted(unknown)}")
    pid = data.get("photo_id")
    if not isinstance(pid, str) or not pid:
        raise SchemaError(f"{where}: photo_id must be a non-empty string")
    emb = None
    if "embedding" in models:
        raw = data.get("embedding")
        if raw is None:
            raise FixtureError(f"{where}: embedding missing from fixture")
        try:
            emb = Embedding(raw)
        except (SchemaError, ValueError, TypeError) as exc:
            raise SchemaError(f"{where}: {exc}") from None
    try:
        return PhotoRecord(
            photo_id=pid,
            exif_datetime=data.get("exif_datetime"),
            general_labels=tuple(_labels_from(data.get("general"), "general", where)) if "general" in models else (),
            food_labels=tuple(_labels_from(data.get("food"), "food", where)) if "food" in models else (),
            embedding=emb,
        )
    except SchemaError as exc:
        if str(exc).startswith(where):
            raise
        raise SchemaError(f"{where}: {exc}") from None


class FixtureBackend:
    """Reads ``<photo_id>.labels.json`` sidecars from a directory."""

    def __init__(self, root: str | Path, embedding_optional: bool = False) -> None:
        self.root = Path(root)
        # when set, a requested embedding that the sidecar lacks is skipped, not an error
        self.embedding_optional = embedding_optional

    def sidecar_for(self, ref: str | Path) -> Path:
        """Sidecar path for a photo id, a photo file path, or a sidecar path."""
        ref = Path(ref)
        if ref.name.endswith(SIDECAR_SUFFIX):
            return ref if ref.is_file() else self.root / ref.name
        for c in (ref.parent / (ref.stem + SIDECAR_SUFFIX), self.root / (ref.name + SIDECAR_SUFFIX)):
            if c.is_file():
                return c
        return self.root / (ref.stem + SIDECAR_SUFFIX)

    def references(self) -> list[Path]:
        if not self.root.is_dir():
            raise FixtureError(f"fixture directory not found: {self.root}")
        return sorted(self.root.glob("*" + SIDECAR_SUFFIX))

    def fetch(self, ref: str | Path, models: Iterable[str] = MODELS) -> PhotoRecord:
        path = self.sidecar_for(ref)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise FixtureError(f"fixture not found: {path}") from None
        except (OSError, json.JSONDecodeError) as exc:
            raise FixtureError(f"unreadable fixture {path}: {exc}") from None
        if self.embedding_optional and isinstance(data, dict) and data.get("embedding") is None:
            models = [m for m in models if m != "embedding"]
        return record_from_dict(data, models, where=path.name)


def read_exif_datetime(path: str | Path) -> str | None:
    """EXIF DateTime (tag 0x0132) of an image file, or None if absent."""
    from PIL import Image

    try:
        with Image.open(path) as img:
            value = img.getexif().get(0x0132)
    except (OSError, ValueError):
        return None
    if isinstance(value, bytes):
        value = value.decode("ascii", "replace")
    try:
        return check_exif_datetime(value)
    except SchemaError:
        log.warning("ignoring malformed EXIF DateTime %r in %s", value, path)
        return None


def _walk(payload: Any, path: str) -> Any:
    cur = payload
    for part in path.split(".") if path else []:
        if isinstance(cur, list):
            try:
                cur = cur[int(part)]
            except (ValueError, IndexError):
                raise SchemaError(f"response path {path!r} failed at {part!r}") from None
        elif isinstance(cur, dict):
            if part not in cur:
                raise SchemaError(f"response path {path!r} failed at {part!r}")
            cur = cur[part]
        else:
            raise SchemaError(f"response path {path!r} failed at {part!r}")
    return cur


def _fill(template: Any, values: Mapping[str, str]) -> Any:
    if isinstance(template, str):
        for k, v in values.items():
            template = template.replace("{" + k + "}", v)
        return template
    if isinstance(template, list):
        return [_fill(t, values) for t in template]
    if isinstance(template, dict):
        return {k: _fill(v, values) for k, v in template.items()}
    return template


@dataclass
class HttpBackendConfig:
    """Where to send requests and how to read responses.

    ``endpoints`` maps a model name to a URL path under ``base_url``. The
    request body is ``request_template`` with ``{image_url}`` or
    ``{image_base64}`` substituted. Dotted ``*_path`` strings walk the JSON
    response; integer parts index lists.
    """

    base_url: str
    endpoints: dict[str, str] = field(
        default_factory=lambda: {
            "general": "/v2/models/general-image-recognition/outputs",
            "food": "/v2/models/food-item-recognition/outputs",
            "embedding": "/v2/models/general-image-embedding/outputs",
        }
    )
    request_template: dict = field(
        default_factory=lambda: {"inputs": [{"data": {"image": {"url": "{image_url}"}}}]}
    )
    request_template_base64: dict = field(
        default_factory=lambda: {"inputs": [{"data": {"image": {"base64": "{image_base64}"}}}]}
    )
    concepts_path: str = "outputs.0.data.concepts"
    concept_name_key: str = "name"
    concept_value_key: str = "value"
    embedding_path: str = "outputs.0.data.embeddings.0.vector"
    auth_header: str = "Authorization"
    auth_scheme: str = "Key"
    api_key_env: str = API_KEY_ENV
    timeout: float = 30.0
    max_retries: int = 3
    backoff: float = 0.5


class HttpBackend:
    def __init__(self, config: HttpBackendConfig, client: httpx.Client | None = None) -> None:
        self.config = config
        self._client = client or httpx.Client(base_url=config.base_url, timeout=config.timeout)

    def close(self) -> None:
        self._client.close()

    def _headers(self) -> dict[str, str]:
        key = os.environ.get(self.config.api_key_env)
        if not key:
            return {}
        value = f"{self.config.auth_scheme} {key}" if self.config.auth_scheme else key
        return {self.config.auth_header: value}

    def _body(self, ref: str | Path) -> dict:
        s = str(ref)
        if s.startswith(("http://", "https://")):
            return _fill(self.config.request_template, {"image_url": s})
        try:
            data = Path(s).read_bytes()
        except OSError as exc:
            raise LabelProviderError(f"cannot read image {s}: {exc}") from None
        return _fill(self.config.request_template_base64, {"image_base64": base64.b64encode(data).decode("ascii")})

    def _post(self, model: str, body: dict) -> Any:
        url = self.config.endpoints[model]
        attempt = 0
        while True:
            try:
                resp = self._client.post(url, json=body, headers=self._headers())
            except httpx.TransportError as exc:
                err = BackendHTTPError(f"{model}: transport error: {exc}", None, True)
            else:
                if resp.status_code == 200:
                    try:
                        return resp.json()
                    except ValueError:
                        raise SchemaError(f"{model}: response is not JSON") from None
                retryable = resp.status_code == 429 or resp.status_code >= 500
                err = BackendHTTPError(f"{model}: HTTP {resp.status_code}", resp.status_code, retryable)
            if not err.retryable or attempt >= self.config.max_retries:
                raise err
            attempt += 1
            time.sleep(self.config.backoff * 2 ** (attempt - 1))

    def _concepts(self, payload: Any, model: str) -> list[dict]:
        items = _walk(payload, self.config.concepts_path)
        if not isinstance(items, list):
            raise SchemaError(f"{model}: concepts path does not hold a list")
        out = []
        for item in items:
            if not isinstance(item, dict):
                raise SchemaError(f"{model}: concept entry is not an object")
            try:
                out.append({"concept": item[self.config.concept_name_key], "p": item[self.config.concept_value_key]})
            except KeyError as exc:
                raise SchemaError(f"{model}: concept entry lacks {exc}") from None
        return out

    def fetch(self, ref: str | Path, models: Iterable[str] = MODELS) -> PhotoRecord:
        models = list(models)
        body = self._body(ref)
        data: dict[str, Any] = {"photo_id": Path(str(ref)).stem or str(ref), "exif_datetime": None}
        if not str(ref).startswith(("http://", "https://")):
            data["exif_datetime"] = read_exif_datetime(ref)
        for model in models:
            payload = self._post(model, body)
            if model == "embedding":
                data["embedding"] = _walk(payload, self.config.embedding_path)
            else:
                data[model] = self._concepts(payload, model)
        return record_from_dict(data, models, where=str(ref))


def fetch_annotations(ref: str | Path, backend: FixtureBackend | HttpBackend, models: Iterable[str] = MODELS) -> PhotoRecord:
    return backend.fetch(ref, models)


def fetch_many(
    refs: Sequence[str | Path],
    backend: FixtureBackend | HttpBackend,
    models: Iterable[str] = MODELS,
    jobs: int = 1,
) -> list[PhotoRecord]:
    """Fetch several photos, at most ``jobs`` at a time; output keeps ``refs`` order."""
    models = tuple(models)
    if jobs <= 1 or len(refs) <= 1:
        records = [backend.fetch(r, models) for r in refs]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda r: backend.fetch(r, models), refs))
    seen: set[str] = set()
    for rec in records:
        if rec.photo_id in seen:
            raise SchemaError(f"duplicate photo_id {rec.photo_id!r}")
        seen.add(rec.photo_id)
    return records


def read_records_jsonl(path: str | Path, models: Iterable[str] = ("general", "food")) -> list[PhotoRecord]:
    """Load records written by :func:`write_records_jsonl`.

    The embedding is loaded whenever present, regardless of ``models``.
    """
    out = []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}:{n}: {exc}") from None
        want = set(models)
        if data.get("embedding") is not None:
            want.add("embedding")
        out.append(record_from_dict(data, want, where=f"{Path(path).name}:{n}"))
    return out


def write_records_jsonl(records: Iterable[PhotoRecord], path: str | Path) -> None:
    Path(path).write_text("".join(r.to_json() + "\n" for r in records), encoding="utf-8")



def load_fixture_dir(root: str | Path) -> list[PhotoRecord]:
    """Every sidecar under ``root`` in file-name order; embeddings loaded when present."""
    backend = FixtureBackend(root)
    out = []
    for path in backend.references():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise FixtureError(f"unreadable fixture {path}: {exc}") from None
        models = ["general", "food"]
        if isinstance(data, dict) and data.get("embedding") is not None:
            models.append("embedding")
        out.append(record_from_dict(data, models, where=path.name))
    seen: set[str] = set()
    for rec in out:
        if rec.photo_id in seen:
            raise SchemaError(f"duplicate photo_id {rec.photo_id!r} in {root}")
        seen.add(rec.photo_id)
    return out
