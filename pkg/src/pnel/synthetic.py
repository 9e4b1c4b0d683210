"""Generated data: the marked-position pointer task and a large label corpus
for runtime profiling."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .featurizer import Episode
from .kg_store import GRAPH_DIM, EntityRecord, EntityStore
from .pointer_net import ModelConfig, decode, fit_normalization, init_model, make_episode, train


def marked_sequences(n: int, seed: int, length: int = 20, n_marked: int = 3,
                     dim: int = 1142, marker: float = 3.0, noise: float = 1.0) -> list[Episode]:
    """Uniform(-noise, noise) vectors; component 0 of ``n_marked`` of them is set to ``marker``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        x = rng.uniform(-noise, noise, size=(length, dim))
        marked = np.sort(rng.choice(length, size=n_marked, replace=False))
        x[marked, 0] = marker
        out.append(make_episode(x, marked))
    return out


def pointer_f1(model, episodes: Sequence[Episode]) -> float:
    """Micro F1 of decoded positions against the gold positions."""
    tp = fp = fn = 0
    for ep in episodes:
        pred, gold = set(decode(model, ep)), set(ep.gold_label_indices)
        tp += len(pred & gold)
        fp += len(pred - gold)
        fn += len(gold - pred)
    return 2 * tp / (2 * tp + fp + fn) if tp + fp + fn else 1.0


@dataclass
class MarkedTaskResult:
    epochs: int
    seconds: float
    train_f1: float
    test_f1: float
    curve: list[tuple[int, float, float, float]] = field(default_factory=list)


def run_marked_task(config: ModelConfig, epochs: int = 200, n_train: int = 200, n_test: int = 50,
                    marker: float = 3.0, normalize: bool = True, eval_every: int = 10,
                    time_budget: float | None = None,
                    report: Callable[[int, float, float, float], None] | None = None) -> MarkedTaskResult:
    """Train on ``n_train`` marked sequences and score ``n_test`` fresh ones.

    Training stops early only when the wall-clock budget runs out; held-out
    scores are recorded along the way but never steer training.
    """
    train_set = marked_sequences(n_train, seed=1, dim=config.input_dim, marker=marker)
    test_set = marked_sequences(n_test, seed=2, dim=config.input_dim, marker=marker)
    model = init_model(config)
    if normalize:
        fit_normalization(model, train_set)
    curve: list[tuple[int, float, float, float]] = []
    start = time.perf_counter()

    def on_epoch(epoch: int, mean_loss: float) -> bool:
        done = epoch + 1
        out_of_time = time_budget is not None and time.perf_counter() - start > time_budget
        if done % eval_every and not out_of_time:
            return False
        tr = pointer_f1(model, train_set)
        te = pointer_f1(model, test_set)
        curve.append((done, mean_loss, tr, te))
        if report is not None:
            report(done, mean_loss, tr, te)
        return out_of_time

    train(model, train_set, epochs, on_epoch=on_epoch)
    return MarkedTaskResult(model.epochs_done, time.perf_counter() - start,
                            pointer_f1(model, train_set), pointer_f1(model, test_set), curve)


_SYLLABLES = ["ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo", "ze", "da", "fu", "go"]


def profiling_store(n_entities: int = 3000, vocab: int = 40, seed: int = 0) -> EntityStore:
    """Entities whose labels draw from a small vocabulary, so most n-gram
    queries hit far more than 50 labels."""
    rng = np.random.default_rng(seed)
    words = []
    for a in _SYLLABLES:
        for b in _SYLLABLES:
            words.append(a + b)
    words = words[:vocab]
    records = []
    for i in range(n_entities):
        n_words = int(rng.integers(1, 4))
        label = " ".join(words[j] for j in rng.choice(vocab, size=n_words, replace=False))
        records.append(EntityRecord(f"Q{100000 + i}", label, "",
                                    rng.normal(0.0, 0.3, size=GRAPH_DIM)))
    return EntityStore(records)


def profiling_questions(n: int, vocab: int = 40, length: int = 6, seed: int = 1) -> list[str]:
    rng = np.random.default_rng(seed)
    words = [a + b for a in _SYLLABLES for b in _SYLLABLES][:vocab]
    return [" ".join(words[j] for j in rng.choice(vocab, size=length)) for _ in range(n)]
