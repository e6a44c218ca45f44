"""Per-class precision/recall/F1, macro F1, the 5x5 confusion matrix, and
misclassification reports.

Per-class metrics are one-vs-rest over the binary label columns; the
single-decision reduction (priority order, NonViolent for all-zeros) is
used only for the confusion matrix. Macro F1 averages the four violence
classes; zero denominators yield 0.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

import numpy as np

from .corpus import CLASSES, DECISIONS, Corpus
from .errors import ValidationError

NUM_CLASSES = 4


def per_class_prf(pred, gold) -> tuple[float, float, float]:
    pred = np.asarray(pred, dtype=int)
    gold = np.asarray(gold, dtype=int)
    if pred.shape != gold.shape:
        raise ValidationError(
            f"length mismatch: pred {pred.shape} vs gold {gold.shape}"
        )
    tp = int(np.sum((pred == 1) & (gold == 1)))
    fp = int(np.sum((pred == 1) & (gold == 0)))
    fn = int(np.sum((pred == 0) & (gold == 1)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def macro_f1(f1s) -> float:
    f1s = list(f1s)
    if len(f1s) != NUM_CLASSES:
        raise ValidationError(f"macro F1 averages the 4 class F1s, got {len(f1s)}")
    if any(not 0 <= f <= 1 for f in f1s):
        raise ValidationError(f"F1 values must lie in [0, 1]: {f1s}")
    return sum(f1s) / NUM_CLASSES


def confusion_matrix(decisions, gold_decisions) -> np.ndarray:
    """counts[g][p] over the five decision labels."""
    if len(decisions) != len(gold_decisions):
        raise ValidationError(
            f"length mismatch: {len(decisions)} predictions vs "
            f"{len(gold_decisions)} gold labels"
        )
    index = {name: i for i, name in enumerate(DECISIONS)}
    counts = np.zeros((5, 5), dtype=int)
    for gold, pred in zip(gold_decisions, decisions):
        try:
            counts[index[gold], index[pred]] += 1
        except KeyError as e:
            raise ValidationError(f"unknown decision label {e.args[0]!r}") from None
    return counts


@dataclass
class MetricsReport:
    per_class: dict[str, tuple[float, float, float]]
    macro_f1: float
    confusion: np.ndarray
    support: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "per_class": {
                name: {"precision": p, "recall": r, "f1": f}
                for name, (p, r, f) in self.per_class.items()
            },
            "macro_f1": self.macro_f1,
            "confusion_labels": list(DECISIONS),
            "confusion": self.confusion.tolist(),
            "support": self.support,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def evaluate(
    gold_labels: np.ndarray,
    pred_binary: np.ndarray,
    decisions: list[str],
    gold_decisions: list[str],
) -> MetricsReport:
    """Build the full report from aligned binary label matrices (n x 4)
    and the per-row decision reductions."""
    gold_labels = np.asarray(gold_labels, dtype=int)
    pred_binary = np.asarray(pred_binary, dtype=int)
    if gold_labels.shape != pred_binary.shape or gold_labels.shape[1] != NUM_CLASSES:
        raise ValidationError(
            f"label matrices must share shape (n, 4): "
            f"{gold_labels.shape} vs {pred_binary.shape}"
        )
    per_class = {
        name: per_class_prf(pred_binary[:, c], gold_labels[:, c])
        for c, name in enumerate(CLASSES)
    }
    support = {name: int(gold_labels[:, c].sum()) for c, name in enumerate(CLASSES)}
    return MetricsReport(
        per_class=per_class,
        macro_f1=macro_f1([prf[2] for prf in per_class.values()]),
        confusion=confusion_matrix(decisions, gold_decisions),
        support=support,
    )


def misclassification_report(
    corpus: Corpus,
    decisions: list[str],
    probabilities: np.ndarray,
    gold_decisions: list[str] | None = None,
) -> list[dict]:
    """Misclassified samples ranked by prediction confidence (max class
    probability) descending, for manual review."""
    probabilities = np.asarray(probabilities, dtype=float)
    if not (len(corpus) == len(decisions) == probabilities.shape[0]):
        raise ValidationError("corpus, decisions, and probabilities must align")
    if gold_decisions is None:
        gold_decisions = [s.labels.decision() for s in corpus]
    entries = []
    for sample, pred, gold, row in zip(corpus, decisions, gold_decisions, probabilities):
        if pred != gold:
            entries.append(
                {
                    "id": sample.id,
                    "text": sample.text,
                    "gold": gold,
                    "pred": pred,
                    "score": float(np.max(row)),
                }
            )
    entries.sort(key=lambda e: (-e["score"], e["id"]))
    return entries


def subsample_report(report: list[dict], k: int, seed: int) -> list[dict]:
    """Seeded random subsample (without replacement) for manual review."""
    if k >= len(report):
        return list(report)
    return random.Random(seed).sample(report, k)
