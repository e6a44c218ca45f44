"""Workbench for Bengali communal-violence text classification.

Corpus tools, deterministic preprocessing, class-weighted fine-tuning,
five-member ensembling, evaluation, embedding/explanation diagnostics,
and the blind-voting annotation workflow.
"""

__version__ = "0.1.0"

from .corpus import (
    CLASSES,
    DECISIONS,
    Corpus,
    LabelVector,
    Sample,
    SplitSpec,
    class_distribution,
    load_corpus,
    save_corpus,
    split,
)

__all__ = [
    "CLASSES",
    "DECISIONS",
    "Corpus",
    "LabelVector",
    "Sample",
    "SplitSpec",
    "class_distribution",
    "load_corpus",
    "save_corpus",
    "split",
    "__version__",
]
