"""Word-vector extraction and cosine-similarity tables.

Word vectors are the mean of the static input-embedding rows of the
word's subword pieces. This extraction choice changes absolute similarity
values, so it is documented here and in the README rather than buried.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..errors import ValidationError
from ..trainer.encoders import build_encoder, tokenizer_for


@lru_cache(maxsize=4)
def _embedding_table(encoder_id: str) -> np.ndarray:
    return build_encoder(encoder_id).input_embedding_matrix().numpy()


def word_vector(word: str, encoder_id: str) -> np.ndarray:
    tokenizer = tokenizer_for(encoder_id)
    ids = tokenizer.encode(word)
    if not ids:
        raise ValidationError(f"word {word!r} tokenizes to zero subwords")
    table = _embedding_table(encoder_id)
    return table[ids].mean(axis=0)


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValidationError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValidationError("cosine undefined for zero-norm vector")
    return float(np.dot(u, v) / (nu * nv))


@dataclass
class SimilarityTable:
    rows: list[tuple[str, str, str, float]]  # (word_a, word_b, encoder_id, cosine)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["word_a", "word_b", "encoder_id", "cosine"])
        for row in self.rows:
            writer.writerow([row[0], row[1], row[2], f"{row[3]:.4f}"])
        return buf.getvalue()


def similarity_table(
    word_pairs: Sequence[tuple[str, str]], encoder_ids: Sequence[str]
) -> SimilarityTable:
    """Full cross-product of pairs x encoders."""
    rows = []
    for encoder_id in encoder_ids:
        for a, b in word_pairs:
            value = cosine(word_vector(a, encoder_id), word_vector(b, encoder_id))
            rows.append((a, b, encoder_id, value))
    return SimilarityTable(rows=rows)
