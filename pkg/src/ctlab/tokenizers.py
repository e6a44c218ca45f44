"""Subword tokenizer registry.

``tiny`` is a self-contained hashing tokenizer used by the desk-scale
encoder; any other id is resolved as a pretrained tokenizer name through
the ``transformers`` library when that is installed and the files are
available locally.
"""

from __future__ import annotations

import hashlib

from .errors import ConfigurationError

TINY_VOCAB_SIZE = 8192
TINY_PIECE_LEN = 4


class HashSubwordTokenizer:
    """Deterministic vocabulary-free subword tokenizer.

    Words are cut into fixed-length character pieces and each piece is
    hashed into a bounded id space. No special markers.
    """

    num_special_tokens = 0

    def __init__(self, vocab_size: int = TINY_VOCAB_SIZE, piece_len: int = TINY_PIECE_LEN):
        self.vocab_size = vocab_size
        self.piece_len = piece_len

    def pieces(self, text: str) -> list[str]:
        out = []
        for word in text.split():
            for i in range(0, len(word), self.piece_len):
                out.append(word[i : i + self.piece_len])
        return out

    def piece_id(self, piece: str) -> int:
        digest = hashlib.md5(piece.encode("utf-8")).digest()
        # ids 1..vocab_size-1; 0 is reserved for padding
        return int.from_bytes(digest[:8], "big") % (self.vocab_size - 1) + 1

    def encode(self, text: str) -> list[int]:
        return [self.piece_id(p) for p in self.pieces(text)]


class _PretrainedTokenizer:
    """Thin adapter over a transformers tokenizer."""

    def __init__(self, inner):
        self.inner = inner
        self.num_special_tokens = inner.num_special_tokens_to_add()

    def encode(self, text: str) -> list[int]:
        return self.inner.encode(text, add_special_tokens=False)

    def pieces(self, text: str) -> list[str]:
        return self.inner.tokenize(text)


def resolve_tokenizer(tokenizer_id: str):
    if tokenizer_id == "tiny":
        return HashSubwordTokenizer()
    try:
        from transformers import AutoTokenizer
    except ImportError as e:
        raise ConfigurationError(
            f"tokenizer {tokenizer_id!r} requires the transformers library"
        ) from e
    try:
        return _PretrainedTokenizer(AutoTokenizer.from_pretrained(tokenizer_id))
    except Exception as e:
        raise ConfigurationError(
            f"could not resolve tokenizer {tokenizer_id!r}: {e}"
        ) from e
