import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cuisine_profiler import _accel
from cuisine_profiler.labels import EMBEDDING_DIM, Embedding, embedding_similarity
from cuisine_profiler.pipeline import (
    FoodKnowledgeBase,
    PipelineConfig,
    build_knowledge_base,
    dedup_exact,
    dedup_near,
    has_person,
    is_food_photo,
    run_pipeline,
)

from .conftest import one_hot, record

KB = FoodKnowledgeBase(frozenset({"pizza", "food", "chees", "taco"}))


@pytest.fixture(params=["numba", "numpy"])
def kernel(request):
    if request.param == "numba" and not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    before = _accel.backend()
    _accel.set_backend(request.param)
    yield request.param
    _accel.set_backend(before)


def test_kb_from_one_record():
    kb = build_knowledge_base([record("s", food=[("pizza", 0.9), ("cheese", 0.8)])])
    assert kb.food_concepts == {"pizza", "chees"}


def test_kb_union_is_idempotent():
    kb = build_knowledge_base([record("a", food=[("pizza", 0.9)]), record("b", food=[("Pizza", 0.7)])])
    assert kb.food_concepts == {"pizza"}
    assert kb.concept_counts == {"pizza": 2}


def test_kb_errors():
    with pytest.raises(ValueError):
        build_knowledge_base([])
    with pytest.raises(ValueError):
        build_knowledge_base([record("a", general=[("food", 0.9)])])


def test_kb_save_load(tmp_path):
    kb = build_knowledge_base([record("a", food=[("pizza", 0.9), ("tacos", 0.7)])])
    kb.save(tmp_path / "kb.json")
    assert FoodKnowledgeBase.load(tmp_path / "kb.json") == kb


def test_food_gate():
    assert is_food_photo(record("a", general=[("pizza", 0.98)]), KB, 0.9)[0]
    assert not is_food_photo(record("a", general=[("pizza", 0.8), ("food", 0.5)]), KB, 0.9)[0]
    assert not is_food_photo(record("a"), KB, 0.9)[0]
    # exactly at p_min counts as confident
    assert is_food_photo(record("a", general=[("food", 0.9)]), KB, 0.9)[0]


def test_person_gate():
    assert has_person(record("a", general=[("woman", 0.95)]))[0]
    assert not has_person(record("a", general=[("mannequin", 0.95)]))[0]
    assert not has_person(record("a"))[0]
    assert not has_person(record("a", general=[("no person", 0.99)]))[0]
    assert not has_person(record("a", general=[("people", 0.5)]))[0]
    assert has_person(record("a", general=[("People", 0.9)]))[0]


def test_exact_dedup():
    a = record("a", exif="2018:03:01 12:00:00")
    b = record("b", exif="2018:03:01 12:00:00")
    c = record("c", exif="2018:03:01 12:00:01")
    kept, removed = dedup_exact([a, b, c])
    assert kept == [a, c] and removed == [(b, "a")]
    none = [record("x"), record("y")]
    assert dedup_exact(none) == (none, [])


def test_near_dedup_examples(kernel):
    a, b = record("a", embedding=one_hot(5)), record("b", embedding=one_hot(5, 3.0))
    assert dedup_near([a, b], 0.95) == ([a], [b])
    c = record("c", embedding=one_hot(6))
    assert dedup_near([a, c], 0.95) == ([a, c], [])


def _planar(deg):
    v = np.zeros(EMBEDDING_DIM)
    v[0], v[1] = math.cos(math.radians(deg)), math.sin(math.radians(deg))
    return Embedding(v)


def test_near_dedup_chain_compares_to_accepted_only(kernel):
    step = math.degrees(math.acos(0.96))
    a, b, c = (record(p, embedding=_planar(i * step)) for i, p in enumerate("abc"))
    assert embedding_similarity(a.embedding, b.embedding) == pytest.approx(0.96)
    assert embedding_similarity(b.embedding, c.embedding) == pytest.approx(0.96)
    assert embedding_similarity(a.embedding, c.embedding) < 0.95
    kept, removed = dedup_near([a, b, c], 0.95)
    assert [r.photo_id for r in kept] == ["a", "c"] and [r.photo_id for r in removed] == ["b"]


def test_near_dedup_threshold_bounds():
    with pytest.raises(ValueError):
        dedup_near([], 0.0)
    with pytest.raises(ValueError):
        dedup_near([record("a", embedding=Embedding(np.zeros(EMBEDDING_DIM)))], 0.9)


def food_photo(pid, **kw):
    return record(pid, general=[("food", 0.97)], food=[("pizza", 0.9)], **kw)


def test_all_nonfood():
    recs = [record(f"n{i}", general=[("car", 0.99)]) for i in range(4)]
    clean, rep = run_pipeline(recs, KB)
    assert clean == [] and rep.accepted == 0 and rep.rejected_nonfood == rep.input_count == 4


def test_single_food_photo():
    clean, rep = run_pipeline([food_photo("a")], KB)
    assert len(clean) == 1 and rep.accepted == 1
    assert (rep.rejected_nonfood, rep.rejected_people, rep.rejected_exact_dup, rep.rejected_near_dup) == (0, 0, 0, 0)


def test_person_with_food_rejected_at_people_stage():
    rec = record("p", general=[("food", 0.97), ("woman", 0.9)], food=[("pizza", 0.9)])
    assert is_food_photo(rec, KB)[0]
    _, rep = run_pipeline([rec], KB)
    assert rep.dispositions["p"]["stage"] == "people"


def test_dispositions_in_input_order():
    recs = [
        food_photo("z1", exif="2018:01:01 00:00:00"),
        record("a2", general=[("car", 0.99)]),
        food_photo("m3", exif="2018:01:01 00:00:00"),
        food_photo("b4", embedding=one_hot(1)),
        food_photo("k5", embedding=one_hot(1, 2.0)),
    ]
    _, rep = run_pipeline(recs, KB)
    assert list(rep.dispositions) == ["z1", "a2", "m3", "b4", "k5"]
    assert [d["stage"] for d in rep.dispositions.values()] == ["accepted", "nonfood", "exact_dup", "accepted", "near_dup"]


def test_duplicate_ids_rejected():
    with pytest.raises(ValueError):
        run_pipeline([food_photo("a"), food_photo("a")], KB)


GENERAL = ["food", "pizza", "car", "woman", "no person", "dish", "man", "tree"]


@st.composite
def photo_streams(draw):
    n = draw(st.integers(0, 40))
    recs = []
    for i in range(n):
        general = draw(st.lists(st.tuples(st.sampled_from(GENERAL), st.floats(0, 1)), max_size=4, unique_by=lambda t: t[0]))
        exif = draw(st.one_of(st.none(), st.sampled_from(["2018:01:01 00:00:00", "2018:01:01 00:00:01", "2018:01:02 10:00:00"])))
        emb = draw(st.one_of(st.none(), st.integers(0, 3).map(one_hot)))
        recs.append(record(f"p{i}", general=general, food=[("pizza", 0.9)], exif=exif, embedding=emb))
    return recs


@settings(max_examples=80, deadline=None)
@given(photo_streams())
def test_conservation_and_parallel_equivalence(recs):
    clean, rep = run_pipeline(recs, KB)
    rejected = rep.rejected_nonfood + rep.rejected_people + rep.rejected_exact_dup + rep.rejected_near_dup
    assert rep.accepted + rejected == rep.input_count == len(recs)
    assert list(rep.dispositions) == [r.photo_id for r in recs]
    by_id = {r.photo_id: r for r in recs}
    for pid, d in rep.dispositions.items():
        if d["stage"] == "exact_dup":
            assert by_id[pid].exif_datetime is not None
        if d["stage"] == "near_dup":
            assert by_id[pid].embedding is not None
    clean_par, rep_par = run_pipeline(recs, KB, PipelineConfig(jobs=4))
    assert clean_par == clean and rep_par.to_dict() == rep.to_dict()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 6), max_size=30), st.floats(0.05, 1.0))
def test_near_kernels_agree(ids, threshold):
    if not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    rng = np.random.default_rng(len(ids))
    basis = rng.normal(size=(7, EMBEDDING_DIM))
    recs = [record(f"r{i}", embedding=Embedding(basis[j] + 0.1 * rng.normal(size=EMBEDDING_DIM))) for i, j in enumerate(ids)]
    before = _accel.backend()
    try:
        _accel.set_backend("numba")
        fast = dedup_near(recs, threshold)
        _accel.set_backend("numpy")
        slow = dedup_near(recs, threshold)
    finally:
        _accel.set_backend(before)
    assert fast == slow
