"""Entity catalog and the BM25 label index used for candidate retrieval."""

from __future__ import annotations

import heapq
import io
import json
import math
import re
import struct
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

GRAPH_DIM = 200
INDEX_MAGIC = b"PNIX"
INDEX_VERSION = 1

_TERM_RE = re.compile(r"[^\W_]+", re.UNICODE)


class StoreError(ValueError):
    """Base class for catalog and index load failures."""


class EntityParseError(StoreError):
    pass


class DuplicateEntityError(StoreError):
    pass


class SchemaError(StoreError):
    pass


class EmptyInputError(StoreError):
    pass


@dataclass(frozen=True)
class EntityRecord:
    id: str
    label: str
    description: str
    embedding: np.ndarray = field(repr=False)


class EntityStore:
    """Insertion-ordered mapping of entity id to record."""

    def __init__(self, records: list[EntityRecord] | None = None):
        self._records: dict[str, EntityRecord] = {}
        for rec in records or []:
            self.add(rec)

    def add(self, rec: EntityRecord) -> None:
        if not rec.id:
            raise SchemaError("entity id must be non-empty")
        if rec.id in self._records:
            raise DuplicateEntityError(f"duplicate entity id {rec.id!r}")
        emb = np.asarray(rec.embedding, dtype=np.float64)
        if emb.shape != (GRAPH_DIM,):
            raise SchemaError(
                f"entity {rec.id!r}: embedding has {emb.size} components, expected {GRAPH_DIM}"
            )
        if not np.all(np.isfinite(emb)):
            raise SchemaError(f"entity {rec.id!r}: embedding has non-finite components")
        self._records[rec.id] = rec

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, entity_id: object) -> bool:
        return entity_id in self._records

    def __getitem__(self, entity_id: str) -> EntityRecord:
        return self._records[entity_id]

    def __iter__(self) -> Iterator[EntityRecord]:
        return iter(self._records.values())

    def ids(self) -> list[str]:
        return list(self._records)


def load_entities(path: str | Path) -> EntityStore:
    """Read ``entities.jsonl``: one {"id","label","description","embedding"} per line."""
    store = EntityStore()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rec = EntityRecord(
                    id=str(obj["id"]),
                    label=str(obj["label"]),
                    description=str(obj.get("description") or ""),
                    embedding=np.asarray(obj["embedding"], dtype=np.float64),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise EntityParseError(f"{path}:{lineno}: {exc}") from exc
            try:
                store.add(rec)
            except StoreError as exc:
                raise type(exc)(f"{path}:{lineno}: {exc}") from exc
    return store


def analyze(text: str) -> list[str]:
    """Lowercase, then keep runs of letters and digits."""
    return _TERM_RE.findall(text.lower())


@dataclass(frozen=True)
class SearchHit:
    entity_id: str
    score: float
    rank: int


@dataclass
class LabelIndex:
    """Inverted index over entity labels.

    Documents are numbered in ascending entity-id order, so sorting on
    (-score, doc number) gives the documented tie-break.
    """

    doc_ids: list[str]
    doc_lengths: list[int]
    postings: dict[str, list[tuple[int, int]]]
    k1: float = 1.2
    b: float = 0.75

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def avgdl(self) -> float:
        return sum(self.doc_lengths) / self.n_docs if self.n_docs else 0.0

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        return math.log((self.n_docs - df + 0.5) / (df + 0.5) + 1.0)

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        buf.write(INDEX_MAGIC)
        buf.write(struct.pack("<II", INDEX_VERSION, self.n_docs))
        buf.write(struct.pack("<ddd", self.avgdl, self.k1, self.b))
        for doc_id, length in zip(self.doc_ids, self.doc_lengths):
            raw = doc_id.encode("utf-8")
            buf.write(struct.pack("<H", len(raw)))
            buf.write(raw)
            buf.write(struct.pack("<I", length))
        buf.write(struct.pack("<I", len(self.postings)))
        for term in sorted(self.postings):
            raw = term.encode("utf-8")
            plist = self.postings[term]
            buf.write(struct.pack("<HI", len(raw), len(plist)))
            buf.write(raw)
            buf.write(np.asarray(plist, dtype="<u4").tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "LabelIndex":
        view = memoryview(data)
        try:
            if bytes(view[:4]) != INDEX_MAGIC:
                raise StoreError("not a label index file (bad magic)")
            version, n_docs = struct.unpack_from("<II", view, 4)
            if version != INDEX_VERSION:
                raise StoreError(f"unsupported index version {version}")
            avgdl, k1, b = struct.unpack_from("<ddd", view, 12)
            pos = 36
            doc_ids, doc_lengths = [], []
            for _ in range(n_docs):
                (n,) = struct.unpack_from("<H", view, pos)
                pos += 2
                doc_ids.append(bytes(view[pos:pos + n]).decode("utf-8"))
                pos += n
                (length,) = struct.unpack_from("<I", view, pos)
                pos += 4
                doc_lengths.append(length)
            (n_terms,) = struct.unpack_from("<I", view, pos)
            pos += 4
            postings = {}
            for _ in range(n_terms):
                n, count = struct.unpack_from("<HI", view, pos)
                pos += 6
                term = bytes(view[pos:pos + n]).decode("utf-8")
                pos += n
                arr = np.frombuffer(view, dtype="<u4", count=2 * count, offset=pos)
                pos += 8 * count
                postings[term] = [(int(d), int(t)) for d, t in arr.reshape(-1, 2)]
        except (struct.error, ValueError) as exc:
            raise StoreError(f"truncated or corrupt index: {exc}") from exc
        index = cls(doc_ids, doc_lengths, postings, k1, b)
        if n_docs and abs(index.avgdl - avgdl) > 1e-9 * max(1.0, avgdl):
            raise StoreError("index avgdl header disagrees with document lengths")
        return index

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "LabelIndex":
        return cls.from_bytes(Path(path).read_bytes())


def build_label_index(store: EntityStore, k1: float = 1.2, b: float = 0.75) -> LabelIndex:
    if len(store) == 0:
        raise EmptyInputError("cannot index an empty entity store")
    if k1 <= 0:
        raise ValueError(f"k1 must be positive, got {k1}")
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"b must lie in [0, 1], got {b}")
    doc_ids = sorted(store.ids())
    doc_lengths = []
    postings: dict[str, list[tuple[int, int]]] = {}
    for doc, entity_id in enumerate(doc_ids):
        terms = analyze(store[entity_id].label)
        doc_lengths.append(len(terms))
        for term, tf in sorted(Counter(terms).items()):
            postings.setdefault(term, []).append((doc, tf))
    return LabelIndex(doc_ids, doc_lengths, postings, k1, b)


def search_labels(index: LabelIndex, query: str, top_k: int) -> list[SearchHit]:
    """Okapi BM25 over the label index; every query token occurrence counts."""
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    terms = analyze(query)
    if not terms or index.n_docs == 0:
        return []
    avgdl = index.avgdl
    k1, b = index.k1, index.b
    scores: dict[int, float] = {}
    for term in terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        idf = index.idf(term)
        for doc, tf in plist:
            norm = k1 * (1.0 - b + b * index.doc_lengths[doc] / avgdl)
            scores[doc] = scores.get(doc, 0.0) + idf * tf * (k1 + 1.0) / (tf + norm)
    best = heapq.nsmallest(top_k, scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return [
        SearchHit(index.doc_ids[doc], score, rank)
        for rank, (doc, score) in enumerate(best, 1)
        if score > 0.0
    ]
