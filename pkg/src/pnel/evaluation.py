"""Scoring, candidate recall, feature ablation and K-vs-runtime profiling."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .featurizer import AblationMask, QuestionRecord, Resources, featurize_question

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuestionScore:
    qid: str
    predicted: tuple[str, ...]
    gold: tuple[str, ...]
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


@dataclass
class EvalReport:
    per_question: list[QuestionScore]
    macro: PRF
    micro: PRF
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def table(self) -> str:
        rows = [("qid", "P", "R", "F1", "predicted", "gold")]
        for q in self.per_question:
            rows.append((q.qid, f"{q.precision:.3f}", f"{q.recall:.3f}", f"{q.f1:.3f}",
                         ",".join(q.predicted) or "-", ",".join(q.gold) or "-"))
        rows.append(("macro", f"{self.macro.precision:.3f}", f"{self.macro.recall:.3f}",
                     f"{self.macro.f1:.3f}", "", ""))
        rows.append(("micro", f"{self.micro.precision:.3f}", f"{self.micro.recall:.3f}",
                     f"{self.micro.f1:.3f}", "", ""))
        return format_table(rows)


def format_table(rows: Sequence[Sequence[object]]) -> str:
    cells = [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(cells[0]))]
    return "\n".join(
        "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells
    )


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def question_prf(pred: set[str], gold: set[str]) -> PRF:
    hit = len(pred & gold)
    if pred:
        p = hit / len(pred)
    else:
        p = 1.0 if not gold else 0.0
    r = hit / len(gold) if gold else 1.0
    return PRF(p, r, _f1(p, r))


def score(predictions: Mapping[str, Iterable[str]], gold: Mapping[str, Iterable[str]]) -> EvalReport:
    if set(predictions) != set(gold):
        missing = set(gold) ^ set(predictions)
        raise ValueError(f"prediction/gold question ids differ: {sorted(missing)[:5]}")
    per_q = []
    tp = fp = fn = 0
    for qid in sorted(gold):
        pred_set, gold_set = set(predictions[qid]), set(gold[qid])
        if not pred_set:
            log.debug("question %s: empty prediction", qid)
        prf = question_prf(pred_set, gold_set)
        per_q.append(QuestionScore(qid, tuple(sorted(pred_set)), tuple(sorted(gold_set)),
                                   prf.precision, prf.recall, prf.f1))
        hit = len(pred_set & gold_set)
        tp += hit
        fp += len(pred_set) - hit
        fn += len(gold_set) - hit
    n = max(1, len(per_q))
    macro_p = sum(q.precision for q in per_q) / n
    macro_r = sum(q.recall for q in per_q) / n
    macro = PRF(macro_p, macro_r, sum(q.f1 for q in per_q) / n)
    micro_p = tp / (tp + fp) if tp + fp else (1.0 if tp + fn == 0 else 0.0)
    micro_r = tp / (tp + fn) if tp + fn else 1.0
    return EvalReport(per_q, macro, PRF(micro_p, micro_r, _f1(micro_p, micro_r)), tp, fp, fn)


def candidate_recall(res: Resources, dataset: Sequence[QuestionRecord], top_l: int) -> float:
    """Fraction of gold entity mentions that survive label search at top-L."""
    if not dataset:
        raise ValueError("candidate recall needs a non-empty dataset")
    found = total = 0
    for rec in dataset:
        ep = featurize_question(res, rec.question, top_l, tokens=rec.tokens, pos=rec.pos)
        present = {c.entity_id for c in ep.candidates}
        for ent in rec.entities:
            total += 1
            found += ent in present
    if total == 0:
        raise ValueError("dataset has no gold entities")
    return found / total


@dataclass
class AblationRow:
    removed: tuple[str, ...]
    f1: float
    report: EvalReport = field(repr=False)

    def cells(self, groups: Sequence[str]) -> list[str]:
        return ["" if g in self.removed else "x" for g in groups] + [f"{self.f1:.3f}"]


def ablate(pipeline: Callable[[AblationMask], EvalReport], mask: AblationMask) -> AblationRow:
    """Retrain and evaluate with ``mask`` applied to train and test features.

    ``pipeline`` is a closure over the data and model settings (see
    ``pnel.pipeline.Pipeline.run``) so every row shares them exactly.
    """
    report = pipeline(mask)
    return AblationRow(tuple(mask.removed()), report.macro.f1, report)


def ablation_sweep(pipeline: Callable[[AblationMask], EvalReport]) -> list[AblationRow]:
    rows = [ablate(pipeline, AblationMask())]
    for group in AblationMask.group_names():
        rows.append(ablate(pipeline, AblationMask.without(group)))
    return rows


def ablation_table(rows: Sequence[AblationRow]) -> str:
    groups = AblationMask.group_names()
    return format_table([groups + ["F1"]] + [r.cells(groups) for r in rows])


@dataclass(frozen=True)
class ProfileRow:
    k: int
    mean_seconds: float
    f1: float


def profile_k(link_fn: Callable[[str, int], set[str]], dataset: Sequence[QuestionRecord],
              k_values: Sequence[int], repeats: int = 1) -> list[ProfileRow]:
    """End-to-end link time per question for each K, plus macro F1.

    ``link_fn(question, k)`` runs featurisation and decoding. With
    ``repeats > 1`` the fastest pass per K is kept, which damps scheduler noise.
    """
    rows = []
    gold = {rec.qid: set(rec.entities) for rec in dataset}
    for k in k_values:
        best = None
        preds: dict[str, set[str]] = {}
        for _ in range(max(1, repeats)):
            elapsed = 0.0
            for rec in dataset:
                start = time.perf_counter()
                preds[rec.qid] = link_fn(rec.question, k)
                elapsed += time.perf_counter() - start
            mean = elapsed / max(1, len(dataset))
            best = mean if best is None else min(best, mean)
        rows.append(ProfileRow(k, best, score(preds, gold).macro.f1))
    return rows
