"""``profiler`` command line."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import _accel
from .corpus import CorpusError, cuisine_counts, load_corpus, split
from .distinctive import DEFAULT_TOP_N, build_distinctive_table, load_ubiquitous
from .knn import KnnModel, evaluate_sweep, sweep_k
from .labels import (
    MODELS,
    FixtureBackend,
    HttpBackend,
    HttpBackendConfig,
    LabelProviderError,
    fetch_many,
    load_fixture_dir,
    read_records_jsonl,
    write_records_jsonl,
)
from .normalize import NormalizationConfig
from .pipeline import P_FOOD, P_PERSON, SIM_THRESHOLD, FoodKnowledgeBase, PipelineConfig, build_knowledge_base, run_pipeline
from .profile import ProfileError, aggregate, default_axes, read_classifications, save_profile, write_radar
from .rules import MATCH_MIN, P_CUT, DishNameTable, RuleConfig, classify, default_coverage
from .runner import (
    IMAGE_SUFFIXES,
    StageError,
    demo_config_path,
    load_config,
    parse_k_values,
    parse_metric,
    photo_query,
    run_end_to_end,
)

log = logging.getLogger("cuisine_profiler")

EXPECTED_ERRORS = (CorpusError, LabelProviderError, ProfileError, StageError, ValueError, KeyError, OSError)


def _norm(stop_modifiers: str | None) -> NormalizationConfig:
    return NormalizationConfig.from_file(stop_modifiers) if stop_modifiers else NormalizationConfig.default()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _json(data) -> str:
    return json.dumps(data, indent=1, ensure_ascii=False) + "\n"


def _k_values(k: int | None, k_range: str | None, default: int = 10) -> tuple[int, ...]:
    if k is not None and k_range:
        raise click.UsageError("use either --k or --k-range")
    return parse_k_values(k_range) if k_range else (k or default,)


class _Group(click.Group):
    """Turns expected library errors into a one-line message and exit status 1."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except EXPECTED_ERRORS as exc:
            raise click.ClickException(str(exc)) from exc


stop_opt = click.option("--stop-modifiers", type=click.Path(exists=True, dir_okay=False), help="Stop-modifier list file.")
corpus_opt = click.option("--corpus", "corpus_path", required=True, type=click.Path(dir_okay=False), help="Recipe corpus JSON.")


@click.group(cls=_Group)
@click.option("-v", "--verbose", count=True, help="More logging (repeatable).")
@click.option("--no-numba", is_flag=True, help="Use the pure-numpy kernels.")
def main(verbose: int, no_numba: bool) -> None:
    """Build cuisine preference profiles from food-photo labels."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if no_numba:
        _accel.set_backend("numpy")


@main.group("corpus", cls=_Group)
def corpus_group() -> None:
    """Recipe corpus utilities."""


@corpus_group.command("stats")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@stop_opt
def corpus_stats(path: str, as_json: bool, stop_modifiers: str | None) -> None:
    """Recipe counts per cuisine, largest first."""
    corpus = load_corpus(path, _norm(stop_modifiers))
    counts = cuisine_counts(corpus)
    if as_json:
        click.echo(_json({
            "recipes": len(corpus),
            "cuisines": len(counts),
            "ingredients": len(corpus.vocabulary),
            "per_cuisine": counts,
        }), nl=False)
        return
    width = max(len(c) for c in counts)
    for c, n in counts.items():
        click.echo(f"{c:<{width}}  {n:>6}")
    click.echo(f"{'total':<{width}}  {len(corpus):>6}  ({len(counts)} cuisines, {len(corpus.vocabulary)} distinct ingredients)")


@main.command("distinctive")
@click.argument("corpus_path", metavar="CORPUS", type=click.Path(dir_okay=False))
@click.option("--top-n", default=DEFAULT_TOP_N, show_default=True, type=click.IntRange(min=1))
@click.option("--ubiquitous", type=click.Path(exists=True, dir_okay=False), help="Ubiquitous-ingredient list file.")
@click.option("--cuisine", help="Only this cuisine.")
@click.option("--json", "as_json", is_flag=True, help="Emit the full table as JSON.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write output here instead of stdout.")
@stop_opt
def distinctive_cmd(corpus_path, top_n, ubiquitous, cuisine, as_json, out, stop_modifiers) -> None:
    """Frequent and distinctive ingredients per cuisine."""
    norm = _norm(stop_modifiers)
    corpus = load_corpus(corpus_path, norm)
    table = build_distinctive_table(corpus, norm, load_ubiquitous(ubiquitous, norm), top_n)
    data = table.to_json()
    if cuisine:
        if cuisine not in data["cuisines"]:
            raise click.ClickException(f"unknown cuisine {cuisine!r}")
        data["cuisines"] = {cuisine: data["cuisines"][cuisine]}
    if as_json:
        _emit(_json(data), out)
        return
    lines = []
    for c, entry in data["cuisines"].items():
        lines.append(f"{c} ({entry['recipes']} recipes)")
        lines.append("  distinctive: " + ", ".join(d["phrase"] for d in entry["distinctive"][:15]))
        lines.append("  frequent:    " + ", ".join(f"{f['phrase']} {f['count']}" for f in entry["frequent"][:10]))
    _emit("\n".join(lines) + "\n", out)


@main.command("fetch")
@click.argument("photos", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--backend", type=click.Choice(["fixture", "http"]), default="fixture", show_default=True)
@click.option("--base-url", help="HTTP backend base URL.")
@click.option("--models", default=",".join(MODELS), show_default=True,
              help="Comma-separated models. Fixture sidecars without an embedding are accepted.")
@click.option("--jobs", default=1, type=click.IntRange(min=1), show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Output records JSONL.")
def fetch_cmd(photos, backend, base_url, models, jobs, out) -> None:
    """Label photos (files or directories) and write one record per line."""
    wanted = tuple(m.strip() for m in models.split(",") if m.strip())
    refs: list[Path] = []
    for p in map(Path, photos):
        if p.is_dir():
            if backend == "fixture":
                refs.extend(FixtureBackend(p).references())
            else:
                refs.extend(sorted(f for f in p.iterdir() if f.suffix.lower() in IMAGE_SUFFIXES))
        else:
            refs.append(p)
    if backend == "fixture":
        # each ref resolves to the sidecar next to it, so one backend serves every directory
        fb = FixtureBackend(refs[0].parent, embedding_optional=True)
        records = fetch_many(refs, fb, wanted, jobs)
    else:
        if not base_url:
            raise click.UsageError("--base-url is required with --backend http")
        hb = HttpBackend(HttpBackendConfig(base_url=base_url))
        try:
            records = fetch_many(refs, hb, wanted, jobs)
        finally:
            hb.close()
    write_records_jsonl(records, out)
    click.echo(f"wrote {len(records)} records to {out}", err=True)


@main.group("kb", cls=_Group)
def kb_group() -> None:
    """Food knowledge base."""


@kb_group.command("build")
@click.argument("seed_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@stop_opt
def kb_build(seed_dir, out, stop_modifiers) -> None:
    """Build the knowledge base from a directory of seed sidecars."""
    seeds = load_fixture_dir(seed_dir)
    kb = build_knowledge_base(seeds, _norm(stop_modifiers), f"{len(seeds)} seed photos in {Path(seed_dir).name}")
    kb.save(out)
    click.echo(f"{len(kb.food_concepts)} food tokens from {len(seeds)} seeds", err=True)


def _load_kb(kb: str | None, kb_seed: str | None, norm: NormalizationConfig) -> FoodKnowledgeBase:
    if bool(kb) == bool(kb_seed):
        raise click.UsageError("give exactly one of --kb or --kb-seed")
    if kb:
        return FoodKnowledgeBase.load(kb)
    return build_knowledge_base(load_fixture_dir(kb_seed), norm)


def _read_records(source: str) -> list:
    """A directory of fixture sidecars or a records JSONL file."""
    return load_fixture_dir(source) if Path(source).is_dir() else read_records_jsonl(source)


@main.command("filter")
@click.argument("photos", type=click.Path(exists=True))
@click.option("--kb", type=click.Path(exists=True, dir_okay=False), help="Knowledge base JSON.")
@click.option("--kb-seed", type=click.Path(exists=True, file_okay=False), help="Seed sidecar directory.")
@click.option("--p-food", default=P_FOOD, show_default=True, type=click.FloatRange(0, 1))
@click.option("--p-person", default=P_PERSON, show_default=True, type=click.FloatRange(0, 1))
@click.option("--sim", "sim_threshold", default=SIM_THRESHOLD, show_default=True,
              type=click.FloatRange(0, 1, min_open=True), help="Near-duplicate cosine threshold.")
@click.option("--jobs", default=1, type=click.IntRange(min=1))
@click.option("--report", required=True, type=click.Path(dir_okay=False), help="Pipeline report JSON.")
@click.option("--out", type=click.Path(dir_okay=False), help="Accepted records JSONL.")
@stop_opt
def filter_cmd(photos, kb, kb_seed, p_food, p_person, sim_threshold, jobs, report, out, stop_modifiers) -> None:
    """Drop non-food, people and duplicate photos.

    PHOTOS is a directory of label sidecars or a records JSONL from ``fetch``.
    """
    norm = _norm(stop_modifiers)
    knowledge = _load_kb(kb, kb_seed, norm)
    recs = _read_records(photos)
    clean, rep = run_pipeline(recs, knowledge, PipelineConfig(p_food, p_person, sim_threshold, normalization=norm, jobs=jobs))
    rep.save(report)
    if out:
        write_records_jsonl(clean, out)
    click.echo(
        f"input {rep.input_count}: nonfood {rep.rejected_nonfood}, people {rep.rejected_people}, "
        f"exact_dup {rep.rejected_exact_dup}, near_dup {rep.rejected_near_dup}, accepted {rep.accepted}",
        err=True,
    )


@main.command("classify")
@click.argument("records", type=click.Path(exists=True))
@corpus_opt
@click.option("--method", type=click.Choice(["rule", "knn"]), default="rule", show_default=True)
@click.option("--k", type=click.IntRange(min=1), help="Neighbour count (knn).")
@click.option("--k-range", help='Several k at once, e.g. "1..25" or "2,10,20" (knn).')
@click.option("--metric", type=click.Choice(["jaccard", "cosine"]), default="jaccard", show_default=True)
@click.option("--p-cut", default=P_CUT, show_default=True, type=click.FloatRange(0, 1))
@click.option("--match-min", default=MATCH_MIN, show_default=True, type=click.IntRange(min=0))
@click.option("--top-n", default=DEFAULT_TOP_N, show_default=True, type=click.IntRange(min=1))
@click.option("--dishes", type=click.Path(exists=True, dir_okay=False), help="Dish-name table JSON.")
@click.option("--ubiquitous", type=click.Path(exists=True, dir_okay=False))
@click.option("--jobs", default=1, type=click.IntRange(min=1))
@click.option("--out", type=click.Path(dir_okay=False), help="Classifications JSONL (default stdout).")
@stop_opt
def classify_cmd(records, corpus_path, method, k, k_range, metric, p_cut, match_min, top_n, dishes,
                 ubiquitous, jobs, out, stop_modifiers) -> None:
    """Assign a cuisine to each record."""
    norm = _norm(stop_modifiers)
    corpus = load_corpus(corpus_path, norm)
    recs = _read_records(records)
    if method == "rule":
        if k is not None or k_range:
            raise click.UsageError("--k/--k-range apply to --method knn only")
        table = build_distinctive_table(corpus, norm, load_ubiquitous(ubiquitous, norm), top_n)
        dish_table = DishNameTable.load(dishes, default_coverage(cuisine_counts(corpus)), norm)
        cfg = RuleConfig(p_cut, match_min, normalization=norm)
        rows = [classify(r, dish_table, table, cfg).to_dict() for r in recs]
    else:
        ks = _k_values(k, k_range)
        model = KnnModel.from_corpus(corpus, k=1, metric=parse_metric(metric))
        preds = sweep_k(model, [(r.photo_id, photo_query(r, p_cut, norm)) for r in recs], ks, jobs)
        rows = [p.to_dict() for kk in ks for p in preds[kk]]
    text = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)
    _emit(text, out)


@main.command("evaluate")
@corpus_opt
@click.option("--split", "held_out", default=0.2, show_default=True, type=click.FloatRange(0, 1, min_open=True, max_open=True),
              help="Held-out fraction, stratified per cuisine.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--k", type=click.IntRange(min=1))
@click.option("--k-range", help='e.g. "1..25".')
@click.option("--metric", type=click.Choice(["jaccard", "cosine"]), default="jaccard", show_default=True)
@click.option("--jobs", default=1, type=click.IntRange(min=1))
@click.option("--json", "as_json", is_flag=True)
@stop_opt
def evaluate_cmd(corpus_path, held_out, seed, k, k_range, metric, jobs, as_json, stop_modifiers) -> None:
    """Held-out accuracy and per-cuisine recall of the KNN classifier."""
    corpus = load_corpus(corpus_path, _norm(stop_modifiers))
    train, test = split(corpus, held_out, seed)
    model = KnnModel.from_corpus(train, k=1, metric=parse_metric(metric))
    results = evaluate_sweep(model, test, _k_values(k, k_range), jobs)
    if as_json:
        click.echo(_json([r.to_dict() for r in results]), nl=False)
        return
    click.echo(f"train {len(train)}  test {len(test)}  seed {seed}  metric {model.metric}")
    for r in results:
        click.echo(r.format_table())
        click.echo()


@main.command("profile")
@click.argument("classifications", type=click.Path(exists=True, dir_okay=False))
@click.option("--records", type=click.Path(exists=True), help="Records (JSONL or sidecar directory) for label aggregates.")
@click.option("--k", type=click.IntRange(min=1), help="Pick one k from a multi-k KNN file.")
@click.option("--user", "user_id", default="user", show_default=True)
@click.option("--min-p", default=0.0, show_default=True, type=click.FloatRange(0, 1))
@click.option("--axes", help="Comma-separated radar axes.")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True, dir_okay=False),
              help="Order default axes by this corpus's cuisine sizes (else by count).")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Profile JSON.")
@click.option("--radar", type=click.Path(dir_okay=False), help="Radar chart SVG.")
def profile_cmd(classifications, records, k, user_id, min_p, axes, corpus_path, out, radar) -> None:
    """Aggregate classifications into a versioned profile and optional radar chart."""
    rows = read_classifications(classifications)
    ks = sorted({r.get("k") for r in rows if r.get("method") == "knn"})
    if k is not None:
        rows = [r for r in rows if r.get("k") == k]
        if not rows:
            raise click.ClickException(f"no classifications with k={k}")
    elif len(ks) > 1:
        raise click.UsageError(f"file holds several k values {ks}; pick one with --k")
    recs = _read_records(records) if records else []
    prof = aggregate(rows, recs, user_id, min_p)
    save_profile(prof, out)
    if radar:
        if axes:
            axis_list = [a.strip() for a in axes.split(",") if a.strip()]
        else:
            sizes = cuisine_counts(load_corpus(corpus_path, normalize=False)) if corpus_path else None
            axis_list = default_axes(prof, sizes)
        if not axis_list:
            raise click.ClickException("nothing to plot: no classified photos and no --axes")
        write_radar(prof, axis_list, radar)


@main.command("run")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="Run config TOML.")
@click.option("--demo", is_flag=True, help="Use the bundled demo config.")
@click.option("--out", type=click.Path(file_okay=False), help="Output directory (overrides the config).")
@click.option("--jobs", type=click.IntRange(min=1), help="Worker threads (overrides the config).")
def run_cmd(config_path, demo, out, jobs) -> None:
    """Whole pipeline from one config file."""
    if bool(config_path) == demo:
        raise click.UsageError("give exactly one of --config or --demo")
    cfg = load_config(demo_config_path() if demo else config_path)
    if demo and not out:
        out = "demo-out"
    cfg = cfg.with_overrides(output=Path(out) if out else None, jobs=jobs)
    arts = run_end_to_end(cfg)
    report = json.loads(arts.report.read_text(encoding="utf-8"))
    click.echo(f"accepted {report['accepted']} of {report['input_count']} photos")
    for method, path in arts.classifications.items():
        click.echo(f"{method}: {path}")
    click.echo(f"{len(arts.profiles)} profiles, {len(arts.radars)} radar charts in {cfg.output}")


if __name__ == "__main__":
    main()
