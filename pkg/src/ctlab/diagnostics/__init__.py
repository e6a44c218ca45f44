"""Error-analysis toolkit: frequent words, embedding similarity tables,
local surrogate explanations, and trigger-word coverage."""

from .words import frequent_words, load_trigger_words, trigger_coverage
from .embeddings import SimilarityTable, cosine, similarity_table, word_vector
from .explain import Explanation, explain

__all__ = [
    "frequent_words",
    "trigger_coverage",
    "load_trigger_words",
    "cosine",
    "word_vector",
    "similarity_table",
    "SimilarityTable",
    "explain",
    "Explanation",
]
