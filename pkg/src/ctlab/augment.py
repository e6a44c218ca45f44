"""Corpus growth: paraphrase ingestion, classifier-gated mining of
external comments, and merging adjudicated batches back into the corpus."""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import CLASSES, Corpus, Sample
from .errors import ValidationError
from .preprocess import PreprocessConfig, normalize
from .trainer.model import Checkpoint, predict

STATUS_TRANSITIONS = {
    "pending": {"accepted", "rejected", "conflict"},
    "conflict": {"accepted", "rejected"},
    "accepted": set(),
    "rejected": set(),
}

DEFAULT_MINING_THRESHOLD = 0.5


@dataclass
class CandidateComment:
    id: str
    text: str
    source: str
    model_score: tuple[float, float, float, float]
    status: str = "pending"

    def transition(self, new_status: str) -> None:
        if new_status not in STATUS_TRANSITIONS.get(self.status, set()):
            raise ValidationError(
                f"candidate {self.id}: illegal status transition "
                f"{self.status} -> {new_status}"
            )
        self.status = new_status


@dataclass
class AugmentationBatch:
    samples: list[Sample] = field(default_factory=list)

    def __post_init__(self):
        for s in self.samples:
            if s.provenance == "original":
                raise ValidationError(
                    f"batch sample {s.id}: provenance must not be 'original'"
                )

    @property
    def added_counts(self) -> dict[str, int]:
        counts = {name: 0 for name in CLASSES}
        for s in self.samples:
            for name in CLASSES:
                counts[name] += getattr(s.labels, name)
        return counts

    def __len__(self) -> int:
        return len(self.samples)


def ingest_paraphrases(
    base: Corpus,
    pairs: Iterable[tuple[str, str]],
    preprocess_config: PreprocessConfig | None = None,
) -> AugmentationBatch:
    """Each paraphrase inherits its source sample's labels.

    Exact duplicates of existing or already-ingested texts (compared after
    normalization when a preprocess config is given) are dropped.
    """
    def canon(text: str) -> str:
        return normalize(text, preprocess_config) if preprocess_config else text

    seen = {canon(s.text) for s in base}
    samples = []
    counter = 0
    for source_id, text in pairs:
        if source_id not in base:
            raise ValidationError(f"unknown source_id {source_id!r}")
        if not text.strip():
            warnings.warn(f"empty paraphrase for source {source_id!r}; row skipped")
            continue
        key = canon(text)
        if key in seen:
            continue
        seen.add(key)
        counter += 1
        source = base.get(source_id)
        samples.append(
            Sample(
                id=f"{source_id}-para-{counter}",
                text=text,
                labels=source.labels,
                provenance="paraphrase",
            )
        )
    return AugmentationBatch(samples=samples)


def mine_candidates(
    external_texts: Sequence[str],
    checkpoint: Checkpoint,
    threshold: float = DEFAULT_MINING_THRESHOLD,
    source: str = "external",
) -> list[CandidateComment]:
    """Texts whose maximum class probability clears the threshold, ordered
    by that probability descending, ready for annotation."""
    if not 0 < threshold < 1:
        raise ValidationError(f"threshold must be in (0, 1), got {threshold}")
    if len(external_texts) == 0:
        return []
    probs = predict(checkpoint, list(external_texts))
    return rank_candidates(list(external_texts), probs, threshold, source)


def rank_candidates(
    texts: Sequence[str], probs: np.ndarray, threshold: float, source: str = "external"
) -> list[CandidateComment]:
    """Pure filter-and-sort core of mine_candidates, for precomputed scores."""
    top = np.asarray(probs).max(axis=1)
    order = np.argsort(-top, kind="stable")
    return [
        CandidateComment(
            id=f"{source}-{i}",
            text=texts[i],
            source=source,
            model_score=tuple(float(p) for p in np.asarray(probs)[i]),
        )
        for i in order
        if top[i] >= threshold
    ]


def merge_accepted(base: Corpus, batch: AugmentationBatch) -> Corpus:
    """base plus batch; class counts rise by exactly the batch counts."""
    collisions = [s.id for s in batch.samples if s.id in base]
    if collisions:
        raise ValidationError(f"batch ids collide with base corpus: {collisions[:5]}")
    return Corpus([*base.samples, *batch.samples])


def load_paraphrase_pairs(path) -> list[tuple[str, str]]:
    """CSV with header ``source_id,paraphrased_text``."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["source_id", "paraphrased_text"]:
            raise ValidationError(
                f"expected header source_id,paraphrased_text, got {reader.fieldnames}"
            )
        return [(row["source_id"], row["paraphrased_text"]) for row in reader]


def load_external_texts(path) -> list[str]:
    """Plain text (one comment per line) or JSONL with a ``text`` field."""
    path = Path(path)
    texts = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if path.suffix in (".jsonl", ".ndjson", ".json"):
                obj = json.loads(line)
                texts.append(str(obj["text"]))
            else:
                texts.append(line)
    return texts
