import json

import pytest
from hypothesis import given, settings, strategies as st

from cuisine_profiler.corpus import (
    Corpus,
    CorpusError,
    Recipe,
    corpus_to_json,
    cuisine_counts,
    load_corpus,
    parse_corpus,
    save_corpus,
    split,
)
from cuisine_profiler.normalize import normalize_phrase

from .conftest import write_corpus


def test_three_recipe_fixture(three_recipes):
    corpus = load_corpus(three_recipes)
    assert len(corpus) == 3
    assert corpus.cuisines == {"italian", "mexican"}
    assert cuisine_counts(corpus) == {"italian": 2, "mexican": 1}
    assert [r.id for r in corpus] == [1, 2, 3]


def test_empty_array(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("[]")
    corpus = load_corpus(path)
    assert len(corpus) == 0 and corpus.cuisines == frozenset() and corpus.vocabulary == frozenset()


def test_vocabulary_is_raw_phrases(three_recipes):
    corpus = load_corpus(three_recipes)
    assert corpus.vocabulary == {"fresh basil", "tomatoes", "salt", "parmesan cheese", "corn tortillas", "salsa"}


def test_normalized_is_union_of_phrases(three_recipes):
    r = load_corpus(three_recipes).recipes[0]
    expected = frozenset().union(*(normalize_phrase(p) for p in r.ingredients_raw))
    assert r.ingredients_norm == expected


def test_cuisine_lowercased(tmp_path):
    path = write_corpus(tmp_path / "c.json", [(1, "Italian", ["salt"])])
    assert load_corpus(path).cuisines == {"italian"}


@pytest.mark.parametrize(
    "payload, index",
    [
        ('[{"id": 1, "cuisine": "x"}]', 0),
        ('[{"id": 1, "cuisine": "x", "ingredients": ["a"]}, {"id": 1, "cuisine": "y", "ingredients": ["b"]}]', 1),
        ('[{"id": 1, "cuisine": "x", "ingredients": ["a"]}, {"id": "two", "cuisine": "y", "ingredients": ["b"]}]', 1),
        ('[{"id": 1, "cuisine": "x", "ingredients": []}]', 0),
        ('[{"id": 1, "cuisine": "", "ingredients": ["a"]}]', 0),
    ],
)
def test_bad_records_name_the_index(tmp_path, payload, index):
    path = tmp_path / "bad.json"
    path.write_text(payload)
    with pytest.raises(CorpusError) as info:
        load_corpus(path)
    assert info.value.index == index


def test_missing_and_malformed(tmp_path):
    with pytest.raises(CorpusError, match="not found"):
        load_corpus(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("[{")
    with pytest.raises(CorpusError, match="malformed"):
        load_corpus(bad)
    bad.write_text('{"id": 1}')
    with pytest.raises(CorpusError):
        load_corpus(bad)


def _corpus(n, cuisines=("a", "b")):
    return Corpus(tuple(Recipe(i, cuisines[i % len(cuisines)], (f"ing{i}",)) for i in range(n)))


def test_split_ten_recipes():
    train, test = split(_corpus(10), 0.2, seed=7)
    assert (len(train), len(test)) == (8, 2)
    assert not {r.id for r in train} & {r.id for r in test}


def test_split_deterministic():
    c = _corpus(50)
    assert split(c, 0.3, seed=3) == split(c, 0.3, seed=3)
    assert split(c, 0.3, seed=3) != split(c, 0.3, seed=4)


def test_split_stratified_fifty_fifty():
    _, test = split(_corpus(100), 0.2, seed=0)
    counts = cuisine_counts(test)
    assert abs(counts["a"] - 10) <= 1 and abs(counts["b"] - 10) <= 1


@pytest.mark.parametrize("fraction", [0.0, 1.0, -0.1, 1.5])
def test_split_rejects_degenerate_fraction(fraction):
    with pytest.raises(ValueError):
        split(_corpus(10), fraction)


def test_split_rejects_tiny_corpus():
    with pytest.raises(ValueError):
        split(_corpus(1), 0.5)
    with pytest.raises(ValueError):
        split(_corpus(3), 0.05)


phrases = st.lists(st.text(alphabet="abcdefgh ", min_size=1, max_size=12), min_size=1, max_size=5)
rows = st.lists(st.tuples(st.sampled_from(["italian", "mexican", "thai", "greek"]), phrases), max_size=40)


@settings(max_examples=60, deadline=None)
@given(rows, st.floats(0.05, 0.95), st.integers(0, 1000))
def test_split_properties(data, fraction, seed):
    corpus = parse_corpus([{"id": i, "cuisine": c, "ingredients": ing} for i, (c, ing) in enumerate(data)])
    assert sum(cuisine_counts(corpus).values()) == len(corpus)
    try:
        train, test = split(corpus, fraction, seed)
    except ValueError:
        return
    ids = [r.id for r in train] + [r.id for r in test]
    assert sorted(ids) == [r.id for r in corpus]
    full, held = cuisine_counts(corpus), cuisine_counts(test)
    for c, n in full.items():
        assert abs(held.get(c, 0) - fraction * n) < 1 + 1e-9


@settings(max_examples=40, deadline=None)
@given(rows)
def test_round_trip(tmp_path_factory, data):
    corpus = parse_corpus([{"id": 10 * i, "cuisine": c, "ingredients": ing} for i, (c, ing) in enumerate(data)])
    path = tmp_path_factory.mktemp("rt") / "c.json"
    save_corpus(corpus, path)
    assert load_corpus(path) == corpus
    assert json.loads(path.read_text()) == corpus_to_json(corpus)
