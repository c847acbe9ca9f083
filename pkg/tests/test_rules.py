import dataclasses
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from cuisine_profiler.corpus import parse_corpus
from cuisine_profiler.distinctive import build_distinctive_table
from cuisine_profiler.normalize import normalize_phrase
from cuisine_profiler.rules import (
    DISH_NAME_HIT,
    INGREDIENT_RULE_HIT,
    UNCLASSIFIED,
    DishNameTable,
    RuleClassification,
    RuleConfig,
    classify,
    classify_by_dish_name,
    classify_by_ingredients,
    default_coverage,
)

from .conftest import record

ITALIAN = ["basil", "oregano", "parmesan", "ricotta", "mozzarella", "pancetta", "prosciutto",
           "arugula", "capers", "polenta", "mascarpone", "pecorino", "gnocchi", "fennel"]
MEXICAN = ["salsa", "tortilla", "cumin", "jalapeno", "cilantro", "tomatillo", "chipotle"]


@pytest.fixture(scope="module")
def distinctive():
    rows = [{"id": i, "cuisine": "italian", "ingredients": ITALIAN} for i in range(3)]
    rows += [{"id": 10 + i, "cuisine": "mexican", "ingredients": MEXICAN} for i in range(2)]
    return build_distinctive_table(parse_corpus(rows), ubiquitous=frozenset(), top_n=50)


@pytest.fixture(scope="module")
def dishes():
    return DishNameTable.from_mapping({"tacos": "mexican", "pizza": "italian", "fish tacos": "mexican"},
                                      ["italian", "mexican"])


def foods(names, p=0.9):
    return [(n, p) for n in names]


def test_dish_hit_tacos(dishes):
    assert classify_by_dish_name(record("a", food=[("tacos", 0.93)]), dishes) == ("mexican", "tacos")


def test_dish_miss(dishes):
    assert classify_by_dish_name(record("a", food=foods(["salad", "bread"])), dishes) is None


def test_dish_highest_probability_wins(dishes):
    rec = record("a", food=[("tacos", 0.8), ("pizza", 0.9)])
    assert classify_by_dish_name(rec, dishes) == ("italian", "pizza")


def test_dish_label_may_carry_extra_tokens(dishes):
    assert classify_by_dish_name(record("a", food=[("Fish Tacos", 0.7)]), dishes) == ("mexican", "Fish Tacos")


def test_twelve_italian_three_mexican(distinctive):
    rec = record("a", food=foods(ITALIAN[:12] + MEXICAN[:3]))
    cuisine, counts, _ = classify_by_ingredients(rec, distinctive)
    assert cuisine == "italian" and counts == {"italian": 12, "mexican": 3}


def test_match_min_is_strict(distinctive):
    cuisine, counts, _ = classify_by_ingredients(record("a", food=foods(ITALIAN[:10])), distinctive)
    assert counts["italian"] == 10 and cuisine is None
    cuisine, _, _ = classify_by_ingredients(record("a", food=foods(ITALIAN[:11])), distinctive)
    assert cuisine == "italian"


def test_p_cut_is_strict(distinctive):
    cuisine, counts, _ = classify_by_ingredients(record("a", food=foods(ITALIAN, p=0.75)), distinctive)
    assert cuisine is None and counts == {"italian": 0, "mexican": 0}
    cuisine, counts, _ = classify_by_ingredients(record("a", food=foods(ITALIAN, p=0.7500001)), distinctive)
    assert cuisine == "italian" and counts["italian"] == len(ITALIAN)


def test_duplicate_labels_count_once(distinctive):
    rec = record("a", food=foods(ITALIAN[:6] + ["fresh " + x for x in ITALIAN[:6]]))
    _, counts, _ = classify_by_ingredients(rec, distinctive)
    assert counts["italian"] == 6


def test_zero_food_labels(distinctive, dishes):
    result = classify(record("a"), dishes, distinctive)
    assert result.outcome == UNCLASSIFIED and result.cuisine is None


def test_compose_dish_first(distinctive, dishes):
    rec = record("a", food=[("tacos", 0.95)] + foods(ITALIAN))
    result = classify(rec, dishes, distinctive)
    assert (result.outcome, result.cuisine) == (DISH_NAME_HIT, "mexican")
    assert result.evidence == {"dish": "tacos"}


def test_compose_ingredient_rule(distinctive, dishes):
    result = classify(record("a", food=foods(ITALIAN[:11])), dishes, distinctive)
    assert (result.outcome, result.cuisine) == (INGREDIENT_RULE_HIT, "italian")
    assert result.evidence["match_counts"]["italian"] == 11


def test_ambiguous_low_probability(distinctive, dishes):
    result = classify(record("a", food=foods(ITALIAN, p=0.6)), dishes, distinctive)
    assert result.outcome == UNCLASSIFIED


def test_short_circuit_ignores_distinctive_table(distinctive, dishes):
    rec = record("a", food=[("tacos", 0.95)] + foods(ITALIAN))
    empty = dataclasses.replace(distinctive, distinctive={c: frozenset() for c in distinctive.distinctive})
    assert classify(rec, dishes, distinctive) == classify(rec, dishes, empty)


def test_infinite_match_min_and_empty_dish_table(distinctive):
    empty = DishNameTable({}, ("italian", "mexican"))
    cfg = RuleConfig(match_min=math.inf)
    for names in (ITALIAN, MEXICAN, ["tacos"]):
        assert classify(record("a", food=foods(names)), empty, distinctive, cfg).outcome == UNCLASSIFIED


def test_tie_goes_to_larger_cuisine():
    rows = [{"id": i, "cuisine": "italian", "ingredients": ["basil"]} for i in range(3)]
    rows += [{"id": 10 + i, "cuisine": "greek", "ingredients": ["feta"]} for i in range(2)]
    table = build_distinctive_table(parse_corpus(rows), ubiquitous=frozenset())
    cfg = RuleConfig(match_min=0)
    assert classify_by_ingredients(record("a", food=foods(["basil", "feta"])), table, cfg)[0] == "italian"


def test_classification_invariant():
    with pytest.raises(ValueError):
        RuleClassification("a", UNCLASSIFIED, "italian", {})
    with pytest.raises(ValueError):
        RuleClassification("a", DISH_NAME_HIT, None, {})


def test_dish_table_validation(tmp_path):
    with pytest.raises(ValueError, match="outside coverage"):
        DishNameTable.from_mapping({"tacos": "mexican"}, ["italian"])
    with pytest.raises(ValueError, match="both"):
        DishNameTable.from_mapping({"taco": "mexican", "tacos": "spanish"})
    path = tmp_path / "d.json"
    path.write_text(json.dumps(["tacos"]))
    with pytest.raises(ValueError):
        DishNameTable.load(path)
    path.write_text(json.dumps({"Pad Thai": "Thai"}))
    table = DishNameTable.load(path)
    assert table.entries == {normalize_phrase("pad thai"): "thai"}


def test_shipped_dish_table():
    table = DishNameTable.load()
    assert len(table.coverage) == 10
    per = {c: sum(1 for v in table.entries.values() if v == c) for c in table.coverage}
    assert all(n >= 8 for n in per.values())
    assert table.entries[normalize_phrase("tacos")] == "mexican"
    restricted = table.restrict(["mexican"])
    assert set(restricted.entries.values()) == {"mexican"}


def test_default_coverage():
    sizes = {f"c{i:02d}": 100 - i for i in range(20)}
    assert default_coverage(sizes) == tuple(f"c{i:02d}" for i in range(10))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(ITALIAN + MEXICAN + ["bread", "onion"]), min_size=1, max_size=25, unique=True),
       st.sampled_from(["italian", "mexican"]), st.integers(0, 6))
def test_adding_a_matching_ingredient_keeps_the_winner(distinctive, names, cuisine, match_min):
    cfg = RuleConfig(match_min=match_min)
    rec = record("a", food=foods(names))
    before, _, _ = classify_by_ingredients(rec, distinctive, cfg)
    if before != cuisine:
        return
    for extra in ("bread", "onion"):
        grown = dataclasses.replace(
            distinctive,
            distinctive={**distinctive.distinctive, cuisine: distinctive.distinctive[cuisine] | {normalize_phrase(extra)}},
        )
        assert classify_by_ingredients(rec, grown, cfg)[0] == cuisine
