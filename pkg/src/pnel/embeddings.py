"""Word-vector tables in the plain-text "count dim / word v1 ... v_dim" format."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable

import numpy as np

from .textproc import tokenize

log = logging.getLogger(__name__)

WORD_DIM = 300


class VectorFormatError(ValueError):
    pass


class WordVectorTable:
    def __init__(self, dim: int, vectors: dict[str, np.ndarray] | None = None):
        self.dim = dim
        self.vectors: dict[str, np.ndarray] = {}
        for word, vec in (vectors or {}).items():
            vec = np.asarray(vec, dtype=np.float64)
            if vec.shape != (dim,) or not np.all(np.isfinite(vec)):
                raise VectorFormatError(f"bad vector for {word!r}")
            self.vectors[word] = vec
        self._zero = np.zeros(dim)

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, word: object) -> bool:
        return word in self.vectors

    def zeros(self) -> np.ndarray:
        return self._zero.copy()


def load_word_vectors(path: str | Path) -> WordVectorTable:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise VectorFormatError(f"{path}:1: expected 'count dim' header")
        count, dim = int(header[0]), int(header[1])
        if dim != WORD_DIM:
            log.warning("word vectors have dim %d, not %d; feature width changes", dim, WORD_DIM)
        vectors: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split(" ")
            if not parts or parts == [""]:
                continue
            word, values = parts[0], [p for p in parts[1:] if p]
            if len(values) != dim:
                raise VectorFormatError(
                    f"{path}:{lineno}: {len(values)} values for {word!r}, header says {dim}"
                )
            try:
                vec = np.array(values, dtype=np.float64)
            except ValueError as exc:
                raise VectorFormatError(f"{path}:{lineno}: {exc}") from exc
            if not np.all(np.isfinite(vec)):
                raise VectorFormatError(f"{path}:{lineno}: non-finite value for {word!r}")
            if word in vectors:
                log.warning("%s:%d: duplicate word %r, keeping last", path, lineno, word)
            vectors[word] = vec
    if len(vectors) > count:
        log.warning("%s: header count %d but read %d vectors", path, count, len(vectors))
    return WordVectorTable(dim, vectors)


def token_vector(table: WordVectorTable, word: str) -> np.ndarray:
    """Exact-case lookup, then lowercase, then zeros."""
    vec = table.vectors.get(word)
    if vec is None:
        vec = table.vectors.get(word.lower())
    if vec is None:
        return table.zeros()
    return vec.copy()


def mean_vector(table: WordVectorTable, words: Iterable[str]) -> np.ndarray:
    vecs = [token_vector(table, w) for w in words]
    if not vecs:
        return table.zeros()
    return np.mean(vecs, axis=0)


def description_vector(table: WordVectorTable, description: str) -> np.ndarray:
    return mean_vector(table, [t.surface for t in tokenize(description)])
