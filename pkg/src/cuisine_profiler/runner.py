"""End-to-end run driven by one TOML config file."""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Iterable, Sequence

from .corpus import cuisine_counts, load_corpus
from .distinctive import DEFAULT_TOP_N, build_distinctive_table, load_ubiquitous
from .knn import KnnModel, sweep_k
from .labels import (
    HttpBackend,
    HttpBackendConfig,
    PhotoRecord,
    fetch_many,
    load_fixture_dir,
    write_records_jsonl,
)
from .normalize import NormalizationConfig, normalize_phrase
from .pipeline import FoodKnowledgeBase, PipelineConfig, build_knowledge_base, run_pipeline
from .profile import aggregate, default_axes, save_profile, write_radar
from .rules import DishNameTable, RuleConfig, classify, default_coverage

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".heic", ".tif", ".tiff", ".webp"}


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"stage {stage!r} failed: {message}")
        self.stage = stage


def parse_k_values(spec: Any) -> tuple[int, ...]:
    """Accept 10, [2, 10, 20], "2,10,20" or "1..25" (inclusive)."""
    if isinstance(spec, bool):
        raise ValueError(f"bad k values {spec!r}")
    if isinstance(spec, int):
        vals = [spec]
    elif isinstance(spec, (list, tuple)):
        vals = [int(v) for v in spec]
    elif isinstance(spec, str):
        s = spec.strip()
        if ".." in s:
            lo, hi = s.split("..", 1)
            vals = list(range(int(lo), int(hi) + 1))
        else:
            vals = [int(v) for v in s.split(",") if v.strip()]
    else:
        raise ValueError(f"bad k values {spec!r}")
    if not vals or any(v < 1 for v in vals):
        raise ValueError(f"k values must be positive integers, got {spec!r}")
    return tuple(dict.fromkeys(vals))


def parse_metric(name: str) -> str:
    return "cosine_binary" if name == "cosine" else name


@dataclass(frozen=True)
class RunConfig:
    corpus: Path
    photos: Path
    output: Path = Path("profiler-out")
    kb: Path | None = None
    kb_seed: Path | None = None
    dishes: Path | None = None
    stop_modifiers: Path | None = None
    ubiquitous: Path | None = None
    p_food: float = 0.9
    p_person: float = 0.85
    sim_threshold: float = 0.95
    p_cut: float = 0.75
    match_min: int = 10
    top_n: int = DEFAULT_TOP_N
    k_values: tuple[int, ...] = (10,)
    metric: str = "jaccard"
    seed: int = 0
    methods: tuple[str, ...] = ("rule", "knn")
    user_id: str = "user"
    backend: str = "fixture"
    base_url: str = ""
    jobs: int = 1
    min_p: float = 0.0
    axes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for name in ("p_food", "p_person", "p_cut", "min_p"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if not 0.0 < self.sim_threshold <= 1.0:
            raise ValueError(f"sim_threshold must be in (0, 1], got {self.sim_threshold}")
        if self.match_min < 0:
            raise ValueError("match_min must be >= 0")
        if self.top_n < 1:
            raise ValueError("top_n must be >= 1")
        if self.metric not in ("jaccard", "cosine_binary"):
            raise ValueError(f"unknown metric {self.metric!r}")
        bad = set(self.methods) - {"rule", "knn"}
        if bad or not self.methods:
            raise ValueError(f"methods must be drawn from rule, knn; got {list(self.methods)}")
        if self.backend not in ("fixture", "http"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "http" and not self.base_url:
            raise ValueError("http backend needs base_url")
        if self.kb is None and self.kb_seed is None:
            raise ValueError("set either paths.kb or paths.kb_seed")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def with_overrides(self, **kw: Any) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_PATH_KEYS = ("corpus", "photos", "output", "kb", "kb_seed", "dishes", "stop_modifiers", "ubiquitous")


def config_from_mapping(data: dict, base: Path = Path(".")) -> RunConfig:
    flat: dict[str, Any] = {}
    for section, values in data.items():
        if not isinstance(values, dict):
            raise ValueError(f"config section [{section}] must be a table")
        flat.update(values)
    known = {f.name for f in fields(RunConfig)} | {"k", "k_range"}
    unknown = sorted(set(flat) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {unknown}")
    for key in _PATH_KEYS:
        if flat.get(key):
            p = Path(flat[key])
            flat[key] = p if p.is_absolute() else base / p
        else:
            flat.pop(key, None)
    k_spec = flat.pop("k_values", None) or flat.pop("k_range", None) or flat.pop("k", None)
    flat.pop("k_range", None)
    flat.pop("k", None)
    if k_spec is not None:
        flat["k_values"] = parse_k_values(k_spec)
    if "metric" in flat:
        flat["metric"] = parse_metric(flat["metric"])
    for key in ("methods", "axes"):
        if key in flat:
            v = flat[key]
            flat[key] = tuple(v.split(",")) if isinstance(v, str) else tuple(v)
    if "corpus" not in flat or "photos" not in flat:
        raise ValueError("config needs paths.corpus and paths.photos")
    return RunConfig(**flat)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    with path.open("rb") as fh:
        data = tomllib.load(fh)
    return config_from_mapping(data, path.parent)


@dataclass
class RunArtifacts:
    report: Path
    clean_records: Path
    classifications: dict[str, Path] = field(default_factory=dict)
    profiles: list[Path] = field(default_factory=list)
    radars: list[Path] = field(default_factory=list)


def _stage(name: str):
    class _Ctx:
        def __enter__(self):
            log.info("stage %s", name)

        def __exit__(self, et, ev, tb):
            if ev is not None and not isinstance(ev, StageError) and isinstance(ev, Exception):
                raise StageError(name, str(ev)) from ev
            return False

    return _Ctx()


def photo_query(record: PhotoRecord, p_cut: float, config: NormalizationConfig | None = None) -> frozenset[str]:
    """Ingredient tokens of a photo: food labels with probability above ``p_cut``."""
    out: set[str] = set()
    for a in record.food_labels:
        if a.probability > p_cut:
            out |= normalize_phrase(a.concept, config)
    return frozenset(out)


def dump_jsonl(items: Iterable[dict], path: Path) -> None:
    path.write_text("".join(json.dumps(i, ensure_ascii=False, sort_keys=False) + "\n" for i in items), encoding="utf-8")


def load_photos(cfg: RunConfig) -> list[PhotoRecord]:
    if cfg.backend == "fixture":
        return load_fixture_dir(cfg.photos)
    backend = HttpBackend(HttpBackendConfig(base_url=cfg.base_url))
    try:
        refs = sorted(p for p in cfg.photos.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
        return fetch_many(refs, backend, jobs=cfg.jobs)
    finally:
        backend.close()


def load_kb(cfg: RunConfig, norm: NormalizationConfig) -> FoodKnowledgeBase:
    if cfg.kb is not None:
        return FoodKnowledgeBase.load(cfg.kb)
    seeds = load_fixture_dir(cfg.kb_seed)
    return build_knowledge_base(seeds, norm, built_from=f"{len(seeds)} seed photos in {cfg.kb_seed.name}")


def run_end_to_end(cfg: RunConfig) -> RunArtifacts:
    """Corpus -> tables -> photos -> filter -> classify -> profiles and radars.

    Every output is written with fixed ordering and formatting, so a rerun on
    the same inputs reproduces the files byte for byte.
    """
    out = cfg.output
    with _stage("config"):
        out.mkdir(parents=True, exist_ok=True)
        norm = NormalizationConfig.from_file(cfg.stop_modifiers) if cfg.stop_modifiers else NormalizationConfig.default()
    with _stage("corpus"):
        corpus = load_corpus(cfg.corpus, norm)
        if len(corpus) == 0:
            raise ValueError("corpus is empty")
        sizes = cuisine_counts(corpus)
    with _stage("distinctive"):
        ubiq = load_ubiquitous(cfg.ubiquitous, norm)
        table = build_distinctive_table(corpus, norm, ubiq, cfg.top_n)
    with _stage("fetch"):
        records = load_photos(cfg)
    with _stage("kb"):
        kb = load_kb(cfg, norm)
    with _stage("filter"):
        pcfg = PipelineConfig(cfg.p_food, cfg.p_person, cfg.sim_threshold, normalization=norm, jobs=cfg.jobs)
        clean, report = run_pipeline(records, kb, pcfg)
        arts = RunArtifacts(out / "pipeline_report.json", out / "clean_records.jsonl")
        report.save(arts.report)
        write_records_jsonl(clean, arts.clean_records)

    coverage = default_coverage(sizes)
    if "rule" in cfg.methods:
        with _stage("classify-rule"):
            dishes = DishNameTable.load(cfg.dishes, coverage, norm)
            rcfg = RuleConfig(cfg.p_cut, cfg.match_min, normalization=norm)
            results = [classify(r, dishes, table, rcfg) for r in clean]
            path = out / "classifications_rule.jsonl"
            dump_jsonl((c.to_dict() for c in results), path)
            arts.classifications["rule"] = path
        with _stage("profile"):
            prof = aggregate(results, clean, cfg.user_id, cfg.min_p)
            axes = list(cfg.axes) or list(coverage)
            _write_profile(prof, axes, out / "profile_rule.json", out / "radar_rule.svg", arts)

    if "knn" in cfg.methods:
        with _stage("classify-knn"):
            model = KnnModel.from_corpus(corpus, k=1, metric=cfg.metric)
            queries = [(r.photo_id, photo_query(r, cfg.p_cut, norm)) for r in clean]
            preds = sweep_k(model, queries, cfg.k_values, jobs=cfg.jobs)
            path = out / "classifications_knn.jsonl"
            dump_jsonl((p.to_dict() for k in cfg.k_values for p in preds[k]), path)
            arts.classifications["knn"] = path
        with _stage("profile"):
            width = len(str(max(cfg.k_values)))
            axes = list(cfg.axes) or default_axes(aggregate([]), sizes)
            for k in cfg.k_values:
                prof = aggregate(preds[k], clean, cfg.user_id, cfg.min_p)
                tag = f"k{k:0{width}d}"
                _write_profile(prof, axes, out / f"profile_knn_{tag}.json", out / f"radar_knn_{tag}.svg", arts)
    return arts


def _write_profile(prof, axes: Sequence[str], profile_path: Path, radar_path: Path, arts: RunArtifacts) -> None:
    save_profile(prof, profile_path)
    write_radar(prof, axes, radar_path)
    arts.profiles.append(profile_path)
    arts.radars.append(radar_path)


def demo_config_path() -> Path:
    from importlib import resources

    return Path(str(resources.files("cuisine_profiler").joinpath("demo").joinpath("config.toml")))

