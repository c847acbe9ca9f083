from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from cuisine_profiler.corpus import parse_corpus
from cuisine_profiler.distinctive import (
    UnknownCuisineError,
    build_distinctive_table,
    build_frequency_table,
    derive_distinctive,
    frequent_set,
    load_ubiquitous,
)
from cuisine_profiler.normalize import normalize_phrase


def corpus_of(rows):
    return parse_corpus([{"id": i, "cuisine": c, "ingredients": ing} for i, (c, ing) in enumerate(rows)])


def N(phrase):
    return normalize_phrase(phrase)


def test_counts_recipes_not_mentions():
    table = build_frequency_table(corpus_of([("italian", ["salt", "basil"]), ("italian", ["salt", "salt"])]))
    assert dict(table["italian"])[N("salt")] == 2


def test_equivalent_phrases_count_once_per_recipe():
    table = build_frequency_table(corpus_of([("italian", ["tomatoes", "fresh tomato"])]))
    assert dict(table["italian"])[N("tomato")] == 1


def test_all_ubiquitous_gives_empty_set():
    table = build_frequency_table(corpus_of([("italian", ["salt"])] * 3))
    assert derive_distinctive(table, N("salt"))["italian"] == frozenset()


def test_frequent_set_top_n():
    rows = [("thai", ["lemongrass"])] * 5 + [("thai", ["galangal"])] * 3 + [("thai", ["kaffir"])]
    table = build_frequency_table(corpus_of(rows))
    assert frequent_set(table, "thai", 2) == [(N("lemongrass"), 5), (N("galangal"), 3)]
    assert frequent_set(table, "thai", 0) == []
    with pytest.raises(UnknownCuisineError):
        frequent_set(table, "klingon", 3)


def test_ties_break_lexicographically():
    table = build_frequency_table(corpus_of([("x", ["zucchini", "apple", "mango"])]))
    assert [sorted(e) for e, _ in table["x"]] == [["appl"], ["mango"], ["zucchini"]]


def test_common_ingredients_filtered():
    rows = [
        ("italian", ["garlic", "basil"]), ("italian", ["garlic", "parmesan"]),
        ("mexican", ["garlic", "salsa"]), ("mexican", ["garlic", "cumin"]),
        ("thai", ["garlic", "lemongrass"]),
    ]
    d = build_distinctive_table(corpus_of(rows), ubiquitous=frozenset(), top_n=5).distinctive
    assert all(N("garlic") not in s for s in d.values())
    assert N("basil") in d["italian"] and N("salsa") in d["mexican"]


def test_two_cuisines_keep_unshared_top_ingredients():
    rows = [("italian", ["basil"]), ("mexican", ["salsa"])]
    d = build_distinctive_table(corpus_of(rows), ubiquitous=frozenset(), top_n=5).distinctive
    assert d == {"italian": {N("basil")}, "mexican": {N("salsa")}}


def test_default_ubiquitous_list():
    ubiq = load_ubiquitous()
    assert {"salt", "water", "pepper", "sugar"} <= ubiq


def test_match_set_and_json():
    rows = [("italian", ["parmesan cheese", "basil", "salt"])] * 2 + [("mexican", ["salsa", "salt"])]
    table = build_distinctive_table(corpus_of(rows), top_n=10)
    assert N("parmesan cheese") in table.match_set("italian")
    assert {"parmesan", "chees"} <= table.match_vocab("italian")
    data = table.to_json()
    assert data["cuisines"]["italian"]["recipes"] == 2
    assert any(d["phrase"] == "parmesan cheese" for d in data["cuisines"]["italian"]["distinctive"])
    with pytest.raises(UnknownCuisineError):
        table.match_set("greek")


vocab = ["salt", "water", "basil", "garlic", "onion", "salsa", "cumin", "rice", "soy sauce", "ginger", "tomatoes"]
rows = st.lists(
    st.tuples(st.sampled_from(["italian", "mexican", "chinese", "thai"]), st.lists(st.sampled_from(vocab), min_size=1, max_size=6)),
    min_size=1,
    max_size=30,
)


@settings(max_examples=60, deadline=None)
@given(rows, st.integers(1, 8))
def test_table_invariants(data, top_n):
    corpus = corpus_of(data)
    ubiq = load_ubiquitous()
    table = build_distinctive_table(corpus, ubiquitous=ubiq, top_n=top_n)
    sizes = Counter(c for c, _ in data)
    for c, ranked in table.per_cuisine_freq.items():
        counts = [n for _, n in ranked]
        assert counts == sorted(counts, reverse=True)
        assert all(n <= sizes[c] for n in counts)
        entries = {e for e, _ in ranked}
        for e in table.distinctive[c]:
            assert e in entries
            assert not e <= ubiq
        assert len(table.distinctive[c]) <= top_n
    again = build_distinctive_table(corpus, ubiquitous=ubiq, top_n=top_n)
    assert again == table


@settings(max_examples=60, deadline=None)
@given(rows, st.integers(1, 6), st.integers(1, 4))
def test_frequent_monotone_in_top_n(data, n, extra):
    table = build_frequency_table(corpus_of(data))
    for c in table:
        small = {e for e, _ in frequent_set(table, c, n)}
        big = {e for e, _ in frequent_set(table, c, n + extra)}
        assert small <= big
