import logging

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pnel.textproc import UNKNOWN, Token, ngram_tiles, penn_tags, pos_tag, tokenize


def surfaces(tokens):
    return [t.surface for t in tokens]


@pytest.mark.parametrize("sentence,expected", [
    ("Who founded Tesla?", ["Who", "founded", "Tesla", "?"]),
    ("", []),
    ("San-Francisco", ["San-Francisco"]),
    ('"Hello," she said.', ['"', "Hello", ",", '"', "she", "said", "."]),
    ("  spaced\tout\n", ["spaced", "out"]),
    ("(a)", ["(", "a", ")"]),
])
def test_tokenize(sentence, expected):
    tokens = tokenize(sentence)
    assert surfaces(tokens) == expected
    assert [t.index for t in tokens] == list(range(len(expected)))
    assert all(t.pos_tag is None for t in tokens)


def test_tag_list_has_36_entries():
    tags = penn_tags()
    assert len(tags) == 36
    assert len(set(tags)) == 36
    assert tags[0] == "CC" and tags[-1] == "WRB"
    assert "." not in tags


def test_supplied_tags_override_and_unknown_maps(caplog):
    tokens = tokenize("Who founded Tesla?")
    with caplog.at_level(logging.WARNING):
        tagged = pos_tag(tokens, ["WP", "VBD", "NNP", "."])
    assert [t.pos_tag for t in tagged] == ["WP", "VBD", "NNP", UNKNOWN]
    assert "UNKNOWN" in caplog.text


def test_supplied_tags_length_checked():
    with pytest.raises(ValueError):
        pos_tag(tokenize("a b"), ["DT"])


def test_builtin_tagger_verbs_and_punctuation():
    tagged = pos_tag(tokenize("Who founded Tesla?"))
    assert tagged[1].pos_tag in ("VBD", "VBN")
    assert tagged[2].pos_tag == "NNP"
    assert tagged[3].pos_tag == UNKNOWN


@pytest.mark.parametrize("word,tag", [
    ("invented", "VBD"), ("happiness", "NN"), ("quickly", "RB"), ("42", "CD"), ("rivers", "NNS"),
])
def test_suffix_rules(word, tag):
    assert pos_tag([Token(word, 0)])[0].pos_tag == tag


def test_empty_tagging():
    assert pos_tag([]) == []


def test_tiles_at_sentence_end():
    tokens = tokenize("Who founded Tesla")
    assert [t.text for t in ngram_tiles(tokens, 2)] == ["Tesla", "founded Tesla"]


def test_four_tiles_in_listing_order():
    tokens = tokenize("Who founded Tesla")
    tiles = ngram_tiles(tokens, 1)
    assert [t.text for t in tiles] == ["founded", "Who founded", "founded Tesla", "Who founded Tesla"]
    assert [t.ngramlen for t in tiles] == [1, 2, 2, 3]
    assert all(t.anchor_index == 1 for t in tiles)


def test_single_token_sentence():
    assert [t.text for t in ngram_tiles(tokenize("Tesla"), 0)] == ["Tesla"]


@pytest.mark.parametrize("k", [-1, 3])
def test_out_of_range_anchor(k):
    with pytest.raises(IndexError):
        ngram_tiles(tokenize("a b c"), k)


words = st.lists(st.text(alphabet="abcXYZ-'.,?", min_size=1, max_size=6), min_size=1, max_size=8)


@given(words)
def test_tile_count_and_contiguity(ws):
    tokens = tokenize(" ".join(ws))
    n = len(tokens)
    for k in range(n):
        tiles = ngram_tiles(tokens, k)
        assert 1 <= len(tiles) <= 4
        assert (len(tiles) == 4) == (1 <= k <= n - 2)
        for tile in tiles:
            idx = [t.index for t in tile.words]
            assert idx == list(range(idx[0], idx[0] + len(idx)))
            assert k in idx
            assert tile.ngramlen == len(idx)


@given(st.text(max_size=40))
def test_tokens_reassemble_without_whitespace(sentence):
    tokens = tokenize(sentence)
    assert "".join(surfaces(tokens)) == "".join(sentence.split())
    for t in pos_tag(tokens):
        assert t.pos_tag in penn_tags() or t.pos_tag == UNKNOWN
