"""Featurise -> train -> link -> score, shared by the CLI and the experiment harness."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Sequence

from .embeddings import load_word_vectors
from .evaluation import EvalReport, score
from .featurizer import (
    AblationMask,
    Episode,
    QuestionRecord,
    Resources,
    episode_for,
    featurize_question,
    load_dataset,
)
from .kg_store import LabelIndex, build_label_index, load_entities
from .pointer_net import (
    ModelConfig,
    PointerModel,
    TrainHistory,
    decode,
    fit_normalization,
    init_model,
    train,
)

log = logging.getLogger(__name__)


@dataclass
class Settings:
    top_l: int = 50
    hidden: int = 64
    attention_dim: int = 32
    lr: float = 0.001
    epochs: int = 50
    seed: int = 7
    init_scale: float = 0.08
    weight_decay: float = 0.0
    decoder_feed: str = "input"
    max_output: int = 100

    def model_config(self, input_dim: int) -> ModelConfig:
        return ModelConfig(input_dim=input_dim, hidden=self.hidden,
                           attention_dim=self.attention_dim, lr=self.lr, seed=self.seed,
                           init_scale=self.init_scale, weight_decay=self.weight_decay,
                           decoder_feed=self.decoder_feed,
                           max_output=self.max_output)


def load_resources(entities: str | Path, vectors: str | Path, index: str | Path | None = None,
                   k1: float = 1.2, b: float = 0.75) -> Resources:
    store = load_entities(entities)
    if index is not None and Path(index).exists():
        label_index = LabelIndex.load(index)
    else:
        label_index = build_label_index(store, k1, b)
    return Resources(store, label_index, load_word_vectors(vectors))


def toy_path(name: str) -> Path:
    """Path of a bundled toy fixture file (entities.jsonl, vectors.txt, train.jsonl, test.jsonl)."""
    return Path(str(importlib_resources.files("pnel").joinpath("data").joinpath("toy").joinpath(name)))


def toy_resources() -> Resources:
    return load_resources(toy_path("entities.jsonl"), toy_path("vectors.txt"))


def toy_dataset(split: str) -> list[QuestionRecord]:
    return load_dataset(toy_path(f"{split}.jsonl"))


def build_episodes(res: Resources, records: Sequence[QuestionRecord], top_l: int,
                   mask: AblationMask | None = None) -> list[Episode]:
    return [episode_for(res, rec, top_l, mask) for rec in records]


def link_question(res: Resources, model: PointerModel, question: str, top_l: int,
                  mask: AblationMask | None = None) -> set[str]:
    ep = featurize_question(res, question, top_l, mask=mask)
    return {ep.candidates[j].entity_id for j in decode(model, ep)}


def evaluate(model: PointerModel, episodes: Sequence[Episode]) -> EvalReport:
    preds = {}
    gold = {}
    for ep in episodes:
        preds[ep.qid] = {ep.candidates[j].entity_id for j in decode(model, ep)}
        gold[ep.qid] = set(ep.gold_entity_ids)
    return score(preds, gold)


@dataclass
class Pipeline:
    res: Resources
    train_records: Sequence[QuestionRecord]
    test_records: Sequence[QuestionRecord]
    settings: Settings = field(default_factory=Settings)

    def fit(self, mask: AblationMask | None = None) -> tuple[PointerModel, TrainHistory, list[Episode]]:
        episodes = build_episodes(self.res, self.train_records, self.settings.top_l, mask)
        usable = [ep for ep in episodes if ep.usable]
        log.info("%d usable / %d unusable training episodes", len(usable), len(episodes) - len(usable))
        model = init_model(self.settings.model_config(self.res.layout.width))
        fit_normalization(model, usable)
        model, history = train(model, usable, self.settings.epochs)
        return model, history, episodes

    def run(self, mask: AblationMask | None = None) -> EvalReport:
        """Train on the train split and score the test split under ``mask``."""
        model, _, _ = self.fit(mask)
        test = build_episodes(self.res, self.test_records, self.settings.top_l, mask)
        return evaluate(model, test)
