import pytest
from hypothesis import given, strategies as st

from cuisine_profiler.normalize import (
    NormalizationConfig,
    match_tokens,
    normalize_many,
    normalize_phrase,
    parse_token_list,
    tokenize,
)


@pytest.mark.parametrize(
    "phrase, expected",
    [("Fresh Chopped Tomatoes", {"tomato"}), ("", set()), ("salt", {"salt"})],
)
def test_documented_examples(phrase, expected):
    assert normalize_phrase(phrase) == frozenset(expected)


@pytest.mark.parametrize(
    "a, b, expected",
    [({"tomato"}, {"tomato", "basil"}, True), (set(), {"x", "y"}, False), ({"corn", "tortilla"}, {"tortilla"}, True)],
)
def test_match_tokens(a, b, expected):
    assert match_tokens(a, b) is expected


def test_stop_list_format():
    text = "# header\nFresh\n\n  chopped  # trailing comment\n"
    assert parse_token_list(text) == ["fresh", "chopped"]


def test_config_from_file_overrides_default(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# custom\nroma\n")
    cfg = NormalizationConfig.from_file(path)
    assert normalize_phrase("Roma Tomatoes", cfg) == {"tomato"}
    # the default list no longer applies
    assert normalize_phrase("fresh tomatoes", cfg) == {"fresh", "tomato"}


def test_config_lowercases_and_validates():
    assert NormalizationConfig(frozenset({"FRESH"})).stop_modifiers == {"fresh"}
    with pytest.raises(ValueError):
        NormalizationConfig(min_token_length=0)


def test_min_token_length_drops_short_stems():
    cfg = NormalizationConfig(frozenset(), min_token_length=3)
    assert normalize_phrase("ox tail", cfg) == {"tail"}


def test_tokenize_splits_on_digits_and_punctuation():
    assert tokenize("1/2 cup all-purpose_flour") == ["cup", "all", "purpose", "flour"]


def test_normalize_many_is_union():
    assert normalize_many(["corn tortillas", "salsa"]) == {"corn", "tortilla", "salsa"}


words = st.text(alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Zs", "Nd", "Pd")), max_size=40)


@given(words)
def test_case_insensitive(phrase):
    assert normalize_phrase(phrase) == normalize_phrase(phrase.lower())


@given(words)
def test_deterministic(phrase):
    assert normalize_phrase(phrase) == normalize_phrase(phrase)
