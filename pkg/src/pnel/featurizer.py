"""Question -> candidate sequence.

Each token is tiled into up to four n-grams, each n-gram is searched against
the label index, and every hit becomes one candidate vector:

    [rank, ngramlen, k, pos one-hot(36), graph embedding(200),
     sentence mean(300), token(300), description mean(300),
     simple, partial, token_sort]

which is 1142 wide with 300-d word vectors.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .embeddings import WordVectorTable, description_vector, mean_vector, token_vector
from .fuzzy import match_triple
from .kg_store import GRAPH_DIM, EntityStore, LabelIndex, search_labels
from .textproc import Token, UNKNOWN, ngram_tiles, penn_tags, pos_tag, tokenize

log = logging.getLogger(__name__)

MAX_INPUT = 3000
DEFAULT_TOP_L = 50


@dataclass(frozen=True)
class FeatureLayout:
    word_dim: int = 300
    graph_dim: int = GRAPH_DIM
    n_pos: int = 36

    @property
    def rank(self) -> slice:
        return slice(0, 1)

    @property
    def ngramlen(self) -> slice:
        return slice(1, 2)

    @property
    def token_index(self) -> slice:
        return slice(2, 3)

    @property
    def pos(self) -> slice:
        return slice(3, 3 + self.n_pos)

    @property
    def graph(self) -> slice:
        start = self.pos.stop
        return slice(start, start + self.graph_dim)

    @property
    def sentence(self) -> slice:
        start = self.graph.stop
        return slice(start, start + self.word_dim)

    @property
    def token(self) -> slice:
        start = self.sentence.stop
        return slice(start, start + self.word_dim)

    @property
    def description(self) -> slice:
        start = self.token.stop
        return slice(start, start + self.word_dim)

    @property
    def text_match(self) -> slice:
        start = self.description.stop
        return slice(start, start + 3)

    @property
    def width(self) -> int:
        return self.text_match.stop


DEFAULT_LAYOUT = FeatureLayout()


@dataclass(frozen=True)
class AblationMask:
    """Feature groups to keep (True) or zero out (False)."""

    sentence_embed: bool = True
    word_embed: bool = True
    description_embed: bool = True
    transe: bool = True
    pos_tags: bool = True
    text_rank: bool = True
    ngram_length: bool = True
    text_match: bool = True

    @classmethod
    def without(cls, group: str) -> "AblationMask":
        if group not in cls.group_names():
            raise ValueError(f"unknown feature group {group!r}")
        return cls(**{group: False})

    @staticmethod
    def group_names() -> list[str]:
        return [f.name for f in fields(AblationMask)]

    def removed(self) -> list[str]:
        return [name for name in self.group_names() if not getattr(self, name)]

    def spans(self, layout: FeatureLayout = DEFAULT_LAYOUT) -> list[slice]:
        by_group = {
            "sentence_embed": layout.sentence,
            "word_embed": layout.token,
            "description_embed": layout.description,
            "transe": layout.graph,
            "pos_tags": layout.pos,
            "text_rank": layout.rank,
            "ngram_length": layout.ngramlen,
            "text_match": layout.text_match,
        }
        return [by_group[name] for name in self.removed()]


@dataclass
class Resources:
    """Everything featurisation reads; all of it is treated as immutable."""

    store: EntityStore
    index: LabelIndex
    vectors: WordVectorTable
    _desc_cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def layout(self) -> FeatureLayout:
        return FeatureLayout(word_dim=self.vectors.dim)

    def description_embedding(self, entity_id: str) -> np.ndarray:
        vec = self._desc_cache.get(entity_id)
        if vec is None:
            vec = description_vector(self.vectors, self.store[entity_id].description)
            self._desc_cache[entity_id] = vec
        return vec


@dataclass(frozen=True)
class CandidateFeature:
    entity_id: str
    anchor_index: int
    ngramlen: int
    search_rank: int
    tile_text: str
    vector: np.ndarray = field(repr=False, compare=False)


@dataclass
class Episode:
    question: str
    tokens: list[Token]
    candidates: list[CandidateFeature]
    gold_entity_ids: frozenset[str] = frozenset()
    gold_label_indices: list[int] = field(default_factory=list)
    truncated: bool = False
    usable: bool = True
    qid: str = ""
    _matrix: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.candidates)

    @property
    def matrix(self) -> np.ndarray:
        """Candidate vectors stacked as an (m, width) array."""
        if self._matrix is None:
            if self.candidates:
                self._matrix = np.stack([c.vector for c in self.candidates])
            else:
                self._matrix = np.zeros((0, DEFAULT_LAYOUT.width))
        return self._matrix


def pos_one_hot(tag: str | None, n_pos: int = 36) -> np.ndarray:
    out = np.zeros(n_pos)
    if tag and tag != UNKNOWN:
        out[penn_tags().index(tag)] = 1.0
    return out


def decode_vector(vector: np.ndarray, layout: FeatureLayout = DEFAULT_LAYOUT) -> dict:
    """Read the metadata fields back out of a candidate vector."""
    hot = np.flatnonzero(vector[layout.pos])
    return {
        "search_rank": int(vector[layout.rank][0]),
        "ngramlen": int(vector[layout.ngramlen][0]),
        "anchor_index": int(vector[layout.token_index][0]),
        "pos_tag": penn_tags()[hot[0]] if hot.size else UNKNOWN,
        "text_match": tuple(int(x) for x in vector[layout.text_match]),
    }


def _prepare_tokens(question: str, tokens: Sequence[str] | None, pos: Sequence[str] | None) -> list[Token]:
    if tokens is not None:
        toks = [Token(s, i) for i, s in enumerate(tokens)]
    else:
        toks = tokenize(question)
    return pos_tag(toks, pos)


def candidates_for_token(
    res: Resources,
    tokens: Sequence[Token],
    k: int,
    top_l: int = DEFAULT_TOP_L,
    sentence_vec: np.ndarray | None = None,
) -> list[CandidateFeature]:
    """Candidates anchored at token k: tile order, then rank order within a tile."""
    layout = res.layout
    anchor = tokens[k]
    if sentence_vec is None:
        sentence_vec = mean_vector(res.vectors, [t.surface for t in tokens])
    shared = np.zeros(layout.width)
    shared[layout.token_index] = k
    shared[layout.pos] = pos_one_hot(anchor.pos_tag, layout.n_pos)
    shared[layout.sentence] = sentence_vec
    shared[layout.token] = token_vector(res.vectors, anchor.surface)

    out = []
    for tile in ngram_tiles(tokens, k):
        for hit in search_labels(res.index, tile.text, top_l):
            rec = res.store[hit.entity_id]
            vec = shared.copy()
            vec[layout.rank] = hit.rank
            vec[layout.ngramlen] = tile.ngramlen
            vec[layout.graph] = rec.embedding
            vec[layout.description] = res.description_embedding(rec.id)
            vec[layout.text_match] = match_triple(anchor.surface, rec.label.lower())
            out.append(
                CandidateFeature(hit.entity_id, k, tile.ngramlen, hit.rank, tile.text, vec)
            )
    return out


def featurize_question(
    res: Resources,
    question: str,
    top_l: int = DEFAULT_TOP_L,
    *,
    tokens: Sequence[str] | None = None,
    pos: Sequence[str] | None = None,
    mask: AblationMask | None = None,
    max_input: int = MAX_INPUT,
) -> Episode:
    toks = _prepare_tokens(question, tokens, pos)
    sentence_vec = mean_vector(res.vectors, [t.surface for t in toks])
    cands: list[CandidateFeature] = []
    for k in range(len(toks)):
        cands.extend(candidates_for_token(res, toks, k, top_l, sentence_vec))
    truncated = len(cands) > max_input
    if truncated:
        log.info("question %r: %d candidates truncated to %d", question, len(cands), max_input)
        cands = cands[:max_input]
    if mask is not None:
        spans = mask.spans(res.layout)
        for cand in cands:
            for span in spans:
                cand.vector[span] = 0.0
    ep = Episode(question=question, tokens=toks, candidates=cands, truncated=truncated)
    if not cands:
        ep._matrix = np.zeros((0, res.layout.width))
    return ep


def gold_labels(episode: Episode, gold_entity_ids: Iterable[str]) -> Episode:
    gold = frozenset(gold_entity_ids)
    episode.gold_entity_ids = gold
    episode.gold_label_indices = [
        i for i, c in enumerate(episode.candidates) if c.entity_id in gold
    ]
    episode.usable = bool(episode.gold_label_indices)
    return episode


@dataclass(frozen=True)
class QuestionRecord:
    qid: str
    question: str
    entities: tuple[str, ...]
    tokens: tuple[str, ...] | None = None
    pos: tuple[str, ...] | None = None


def load_dataset(path: str | Path, skip_list: str | Path | None = None) -> list[QuestionRecord]:
    """Read ``dataset.jsonl``; the optional skip list holds one question id per line."""
    skip: set[str] = set()
    if skip_list is not None:
        skip = {ln.strip() for ln in Path(skip_list).read_text("utf-8").splitlines() if ln.strip()}
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                qid = str(obj.get("id", lineno))
                rec = QuestionRecord(
                    qid=qid,
                    question=str(obj["question"]),
                    entities=tuple(obj.get("entities", ())),
                    tokens=tuple(obj["tokens"]) if "tokens" in obj else None,
                    pos=tuple(obj["pos"]) if "pos" in obj else None,
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            if rec.qid not in skip:
                records.append(rec)
    return records


def episode_for(res: Resources, rec: QuestionRecord, top_l: int = DEFAULT_TOP_L,
                mask: AblationMask | None = None) -> Episode:
    ep = featurize_question(res, rec.question, top_l, tokens=rec.tokens, pos=rec.pos, mask=mask)
    ep.qid = rec.qid
    return gold_labels(ep, rec.entities)
