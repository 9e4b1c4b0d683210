"""Question tokens with part-of-speech tags, plus the n-gram tiles searched for each token."""

from __future__ import annotations

import json
import logging
import unicodedata
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import Sequence

log = logging.getLogger(__name__)

UNKNOWN = "UNKNOWN"


@lru_cache(maxsize=None)
def penn_tags() -> tuple[str, ...]:
    """The ordered 36-tag list; position defines the one-hot layout."""
    text = resources.files("pnel").joinpath("data/pos_tags.txt").read_text("utf-8")
    tags = tuple(line.strip() for line in text.splitlines() if line.strip())
    if len(tags) != 36:
        raise ValueError(f"pos_tags.txt must list 36 tags, found {len(tags)}")
    return tags


@lru_cache(maxsize=None)
def _tagger_tables() -> tuple[dict[str, str], list[tuple[str, str]]]:
    raw = json.loads(
        resources.files("pnel").joinpath("data/tagger.json").read_text("utf-8")
    )
    rules = [(suffix, tag) for suffix, tag in raw["suffix_rules"]]
    return raw["lexicon"], rules


@dataclass(frozen=True)
class Token:
    surface: str
    index: int
    pos_tag: str | None = None


@dataclass(frozen=True)
class NGramTile:
    words: tuple[Token, ...]
    anchor_index: int

    @property
    def ngramlen(self) -> int:
        return len(self.words)

    @property
    def text(self) -> str:
        return " ".join(t.surface for t in self.words)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(sentence: str) -> list[Token]:
    """Whitespace split; leading/trailing punctuation becomes separate
    one-character tokens, internal punctuation stays ("San-Francisco")."""
    surfaces: list[str] = []
    for chunk in sentence.split():
        lead = 0
        while lead < len(chunk) and _is_punct(chunk[lead]):
            lead += 1
        trail = len(chunk)
        while trail > lead and _is_punct(chunk[trail - 1]):
            trail -= 1
        surfaces.extend(chunk[:lead])
        if trail > lead:
            surfaces.append(chunk[lead:trail])
        surfaces.extend(chunk[trail:])
    return [Token(s, i) for i, s in enumerate(surfaces)]


def _rule_tag(surface: str) -> str:
    if all(_is_punct(ch) for ch in surface):
        return UNKNOWN
    lexicon, rules = _tagger_tables()
    lower = surface.lower()
    if lower in lexicon:
        return lexicon[lower]
    if any(ch.isdigit() for ch in surface) and not any(ch.isalpha() for ch in surface):
        return "CD"
    if surface[0].isupper():
        return "NNP"
    for suffix, tag in rules:
        if lower.endswith(suffix) and len(lower) > len(suffix) + 1:
            return tag
    return "NN"


def pos_tag(tokens: Sequence[Token], supplied: Sequence[str] | None = None) -> list[Token]:
    """Assign a Penn Treebank tag to each token.

    ``supplied`` gold tags override the built-in lexicon/suffix tagger; tags
    outside the 36-tag list map to UNKNOWN with a warning.
    """
    if supplied is not None and len(supplied) != len(tokens):
        raise ValueError(
            f"got {len(supplied)} supplied tags for {len(tokens)} tokens"
        )
    valid = set(penn_tags())
    out = []
    for i, tok in enumerate(tokens):
        if supplied is not None:
            tag = supplied[i]
            if tag not in valid:
                log.warning("tag %r for token %r is not a Penn word tag; using UNKNOWN", tag, tok.surface)
                tag = UNKNOWN
        else:
            tag = _rule_tag(tok.surface)
        out.append(replace(tok, pos_tag=tag))
    return out


def ngram_tiles(tokens: Sequence[Token], k: int) -> list[NGramTile]:
    """The four tiles around token k, in order [k], [k-1,k], [k,k+1],
    [k-1,k,k+1]; tiles reaching past either sentence edge are skipped."""
    n = len(tokens)
    if not 0 <= k < n:
        raise IndexError(f"token index {k} out of range for {n} tokens")
    spans = [(k, k), (k - 1, k), (k, k + 1), (k - 1, k + 1)]
    return [
        NGramTile(tuple(tokens[lo:hi + 1]), k)
        for lo, hi in spans
        if lo >= 0 and hi < n
    ]
