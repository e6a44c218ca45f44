"""Reciprocal-frequency class weights.

w_c = N / (K * n_c) with K = 4 classes, so a balanced corpus yields
all-ones and w_c * n_c is the same constant N/K for every class.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus import CLASSES, Corpus
from ..errors import ValidationError

NUM_CLASSES = 4


@dataclass(frozen=True)
class ClassWeights:
    w: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.w) != NUM_CLASSES or any(x <= 0 for x in self.w):
            raise ValidationError(f"class weights must be 4 positive reals, got {self.w}")

    def as_list(self) -> list[float]:
        return list(self.w)


def weights_from_counts(counts: dict[str, int], total: int) -> ClassWeights:
    for name in CLASSES:
        if counts.get(name, 0) < 1:
            raise ValidationError(
                f"class {name!r} has no positive samples; augment the corpus "
                "before computing class weights"
            )
    return ClassWeights(tuple(total / (NUM_CLASSES * counts[name]) for name in CLASSES))


def compute_class_weights(corpus: Corpus) -> ClassWeights:
    return weights_from_counts(corpus.counts, corpus.size)
