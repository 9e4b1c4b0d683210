import json

import numpy as np
import pytest

from pnel.embeddings import WordVectorTable
from pnel.featurizer import Resources
from pnel.kg_store import GRAPH_DIM, EntityRecord, EntityStore, build_label_index
from pnel.pipeline import toy_dataset, toy_resources


def make_store(labels: dict[str, str], seed: int = 0, descriptions: dict[str, str] | None = None) -> EntityStore:
    rng = np.random.default_rng(seed)
    descriptions = descriptions or {}
    return EntityStore([
        EntityRecord(eid, label, descriptions.get(eid, ""), rng.normal(size=GRAPH_DIM))
        for eid, label in labels.items()
    ])


def write_entities(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write((row if isinstance(row, str) else json.dumps(row)) + "\n")
    return path


def entity_row(eid: str, label: str, desc: str = "", dim: int = GRAPH_DIM, value: float = 0.1) -> dict:
    return {"id": eid, "label": label, "description": desc, "embedding": [value] * dim}


@pytest.fixture
def tesla_store():
    return make_store({"Q1": "Nikola Tesla", "Q2": "tesla", "Q3": "Elon Musk"})


@pytest.fixture(scope="session")
def small_resources():
    store = make_store(
        {"Q1": "Nikola Tesla", "Q2": "tesla", "Q3": "Elon Musk", "Q4": "Tesla, Inc.", "Q5": "founder"},
        descriptions={"Q1": "inventor", "Q4": "car maker"},
    )
    rng = np.random.default_rng(3)
    words = ["who", "founded", "tesla", "inventor", "car", "maker", "musk"]
    vectors = WordVectorTable(300, {w: rng.normal(size=300) for w in words})
    return Resources(store, build_label_index(store), vectors)


@pytest.fixture(scope="session")
def toy_res():
    return toy_resources()


@pytest.fixture(scope="session")
def toy_train():
    return toy_dataset("train")


@pytest.fixture(scope="session")
def toy_test():
    return toy_dataset("test")


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
