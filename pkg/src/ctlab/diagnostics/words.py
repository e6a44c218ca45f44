"""Frequency and trigger-word statistics over class subsets."""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

from ..corpus import Corpus, Sample
from ..errors import EmptyInputError, ValidationError

_DATA_DIR = Path(__file__).parent.parent / "data"


def _class_texts(corpus: Corpus, cls: str) -> list[str]:
    cls = cls.lower()
    if cls in ("nonviolent", "non_violent"):
        return [s.text for s in corpus if s.labels.is_nonviolent]
    try:
        return [s.text for s in corpus if getattr(s.labels, cls) == 1]
    except AttributeError:
        raise ValidationError(f"unknown class {cls!r}") from None


def frequent_words(corpus: Corpus, cls: str, k: int) -> list[str]:
    """Top-k whitespace tokens by frequency within the class; ties break
    lexicographically. Texts are expected to be preprocessed already."""
    texts = _class_texts(corpus, cls)
    if not texts:
        raise EmptyInputError(f"class {cls!r} has no samples")
    counts = Counter(token for text in texts for token in text.split())
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [token for token, _ in ranked[:k]]


def trigger_coverage(samples: Sequence, trigger_words: Iterable[str]) -> float:
    """Fraction of samples whose text contains at least one trigger token
    (whole-token, whitespace-delimited match)."""
    if len(samples) == 0:
        raise EmptyInputError("trigger_coverage over an empty sample list")
    triggers = set(trigger_words)
    if not triggers:
        return 0.0
    hits = 0
    for s in samples:
        text = s.text if isinstance(s, Sample) else str(s)
        if triggers & set(text.split()):
            hits += 1
    return hits / len(samples)


def load_trigger_words(path=None) -> frozenset[str]:
    path = Path(path) if path else _DATA_DIR / "trigger_words.txt"
    lines = path.read_text(encoding="utf-8").splitlines()
    return frozenset(w.strip() for w in lines if w.strip() and not w.startswith("#"))
