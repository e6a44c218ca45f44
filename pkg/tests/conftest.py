import random

import pytest

from ctlab.corpus import Corpus, LabelVector, Sample

LABEL_CHOICES = [
    (0, 0, 0, 0),
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
    (1, 1, 0, 0),
    (1, 0, 1, 0),
]


def make_sample(i, labels=(0, 0, 0, 0), text=None, **kwargs):
    return Sample(
        id=f"s{i:05d}",
        text=text or f"sample text number {i}",
        labels=LabelVector(*labels),
        **kwargs,
    )


def random_corpus(n, seed=0, label_choices=LABEL_CHOICES):
    rng = random.Random(seed)
    return Corpus(
        make_sample(i, labels=rng.choice(label_choices)) for i in range(n)
    )


@pytest.fixture
def small_corpus():
    """Deterministic 40-sample corpus covering all decision labels."""
    samples = []
    for i in range(40):
        labels = LABEL_CHOICES[i % 5]
        samples.append(make_sample(i, labels=labels))
    return Corpus(samples)
