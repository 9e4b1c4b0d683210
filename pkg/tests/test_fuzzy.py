import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnel.fuzzy import indel_distance, match_triple, partial_ratio, simple_ratio, token_sort_ratio

from . import oracles

METRICS = [
    (simple_ratio, oracles.simple_ratio),
    (partial_ratio, oracles.partial_ratio),
    (token_sort_ratio, oracles.token_sort_ratio),
]

short_text = st.text(alphabet="abcde ", max_size=20)


@pytest.mark.parametrize("a,b,expected", [
    ("Elon Musk", "Elon Musk", 100),
    ("", "", 100),
    ("abcd", "abce", 75),
    ("abc", "", 0),
    ("ELON", "elon", 100),
])
def test_simple_ratio_cases(a, b, expected):
    assert simple_ratio(a, b) == expected


@pytest.mark.parametrize("a,b", [("Elon Musk", "Musk"), ("a", "a"), ("musk", "elom musk"), ("", "anything")])
def test_partial_ratio_perfect(a, b):
    assert partial_ratio(a, b) == 100


@pytest.mark.parametrize("a,b", [("Elon Musk", "Musk Elon"), ("a b", "b a")])
def test_token_sort_perfect(a, b):
    assert token_sort_ratio(a, b) == 100


def test_token_sort_falls_back_to_simple_ratio():
    assert token_sort_ratio("nikola tesla", "tesla") == oracles.simple_ratio("nikola tesla", "tesla")


def test_half_ratio_rounds_up():
    # lengths 1 and 15 sharing one character: 100 * 2 / 16 = 12.5
    assert simple_ratio("a", "a" + "b" * 14) == 13
    # 100 * 2 / 3 = 66.67
    assert simple_ratio("ab", "a") == 67


def test_match_triple_fields():
    triple = match_triple("Musk", "Elon Musk")
    assert triple.partial == 100
    assert triple.simple == simple_ratio("musk", "elon musk")
    assert triple.token_sort == token_sort_ratio("musk", "elon musk")


def test_indel_distance_matches_table():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a = "".join(rng.choice(list("abcd"), size=int(rng.integers(0, 15))))
        b = "".join(rng.choice(list("abcd"), size=int(rng.integers(0, 15))))
        assert indel_distance(a, b) == oracles.indel_distance(a, b)


def test_oracle_equivalence_on_1000_pairs():
    rng = np.random.default_rng(17)
    alphabet = list("abcde ")
    for _ in range(1000):
        a = "".join(rng.choice(alphabet, size=int(rng.integers(0, 21))))
        b = "".join(rng.choice(alphabet, size=int(rng.integers(0, 21))))
        for fast, slow in METRICS:
            assert fast(a, b) == slow(a, b), (fast.__name__, a, b)


@settings(max_examples=300, deadline=None)
@given(a=short_text, b=short_text)
def test_symmetry_and_range(a, b):
    for fast, _ in METRICS:
        value = fast(a, b)
        assert 0 <= value <= 100
        assert value == fast(b, a)


@settings(max_examples=200, deadline=None)
@given(a=st.text(min_size=1, max_size=30))
def test_identity(a):
    for fast, _ in METRICS:
        assert fast(a, a) == 100


@settings(max_examples=200, deadline=None)
@given(a=short_text, b=short_text)
def test_agrees_with_oracle(a, b):
    for fast, slow in METRICS:
        assert fast(a, b) == slow(a, b)
