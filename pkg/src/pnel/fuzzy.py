"""Text-match metrics used as the last three candidate features.

All three are built on the indel ratio: edit distance where insertions and
deletions cost 1 and substitutions cost 2, normalised to 0..100 and rounded
half away from zero.
"""

from __future__ import annotations

from typing import NamedTuple


class MatchTriple(NamedTuple):
    simple: int
    partial: int
    token_sort: int


def _lcs_length(a: str, b: str) -> int:
    # Bit-parallel LCS (Allison-Dix / Hyyro); Python ints act as bit vectors.
    if not a or not b:
        return 0
    masks: dict[str, int] = {}
    for i, ch in enumerate(a):
        masks[ch] = masks.get(ch, 0) | (1 << i)
    full = (1 << len(a)) - 1
    s = full
    for ch in b:
        u = s & masks.get(ch, 0)
        s = ((s + u) | (s - u)) & full
    return len(a) - bin(s).count("1")


def indel_distance(a: str, b: str) -> int:
    return len(a) + len(b) - 2 * _lcs_length(a, b)


def _ratio(a: str, b: str) -> int:
    total = len(a) + len(b)
    if total == 0:
        return 100
    num = 100 * (total - indel_distance(a, b))
    # num/total >= 0, so half-away-from-zero is floor(x + 1/2)
    return (2 * num + total) // (2 * total)


def simple_ratio(a: str, b: str) -> int:
    return _ratio(a.lower(), b.lower())


def partial_ratio(a: str, b: str) -> int:
    """Best simple ratio of the shorter string against every equal-length
    window of the longer one."""
    a, b = a.lower(), b.lower()
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    if not short:
        return 100
    n = len(short)
    best = 0
    for start in range(len(long_) - n + 1):
        score = _ratio(short, long_[start:start + n])
        if score > best:
            best = score
            if best == 100:
                break
    return best


def _sorted_tokens(s: str) -> str:
    return " ".join(sorted(s.lower().split()))


def token_sort_ratio(a: str, b: str) -> int:
    return _ratio(_sorted_tokens(a), _sorted_tokens(b))


def match_triple(token: str, label: str) -> MatchTriple:
    return MatchTriple(
        simple_ratio(token, label),
        partial_ratio(token, label),
        token_sort_ratio(token, label),
    )
