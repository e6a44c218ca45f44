"""Encoder registry.

``tiny`` is a small self-contained transformer (2 layers, hashing
tokenizer) that lets the full pipeline run on CPU in minutes. The named
pretrained ids resolve through the transformers library when installed;
they share the tokenizer interface, so everything downstream is agnostic
to which encoder backs a checkpoint.
"""

from __future__ import annotations

import torch
from torch import nn

from ..errors import ConfigurationError
from ..tokenizers import HashSubwordTokenizer, resolve_tokenizer

# encoder_id -> pretrained model name for non-tiny encoders
PRETRAINED_IDS = {
    "banglabert-base": "csebuetnlp/banglabert",
    "banglabert-large": "csebuetnlp/banglabert_large",
    "multilingual-bert": "bert-base-multilingual-cased",
}

TINY_MAX_POSITIONS = 512


class TinyEncoder(nn.Module):
    """2-layer transformer over hashed subword pieces with mean pooling."""

    def __init__(self, vocab_size: int = 8192, dim: int = 64, layers: int = 2, heads: int = 4):
        super().__init__()
        self.dim = dim
        self.embedding = nn.Embedding(vocab_size, dim, padding_idx=0)
        self.positions = nn.Embedding(TINY_MAX_POSITIONS, dim)
        layer = nn.TransformerEncoderLayer(
            d_model=dim, nhead=heads, dim_feedforward=2 * dim,
            dropout=0.1, batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=layers)

    @property
    def hidden_size(self) -> int:
        return self.dim

    def input_embedding_matrix(self) -> torch.Tensor:
        """Static input-embedding table (used by the embedding diagnostics)."""
        return self.embedding.weight.detach()

    def forward(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        """ids, mask: (batch, seq); returns pooled (batch, dim)."""
        pos = torch.arange(ids.shape[1], device=ids.device).unsqueeze(0)
        x = self.embedding(ids) + self.positions(pos)
        x = self.encoder(x, src_key_padding_mask=~mask.bool())
        denom = mask.sum(dim=1, keepdim=True).clamp(min=1)
        return (x * mask.unsqueeze(-1)).sum(dim=1) / denom


class PretrainedEncoder(nn.Module):
    """Adapter exposing the same (ids, mask) -> pooled interface."""

    def __init__(self, model_name: str):
        super().__init__()
        try:
            from transformers import AutoModel
        except ImportError as e:
            raise ConfigurationError(
                f"encoder {model_name!r} requires the transformers library"
            ) from e
        try:
            self.inner = AutoModel.from_pretrained(model_name)
        except Exception as e:
            raise ConfigurationError(
                f"could not load pretrained encoder {model_name!r}: {e}"
            ) from e

    @property
    def hidden_size(self) -> int:
        return self.inner.config.hidden_size

    def input_embedding_matrix(self) -> torch.Tensor:
        return self.inner.get_input_embeddings().weight.detach()

    def forward(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        out = self.inner(input_ids=ids, attention_mask=mask).last_hidden_state
        denom = mask.sum(dim=1, keepdim=True).clamp(min=1)
        return (out * mask.unsqueeze(-1)).sum(dim=1) / denom


def build_encoder(encoder_id: str) -> nn.Module:
    if encoder_id == "tiny":
        return TinyEncoder()
    if encoder_id in PRETRAINED_IDS:
        return PretrainedEncoder(PRETRAINED_IDS[encoder_id])
    raise ConfigurationError(
        f"unknown encoder id {encoder_id!r}; known: "
        f"{['tiny', *PRETRAINED_IDS]}"
    )


def tokenizer_for(encoder_id: str):
    if encoder_id == "tiny":
        return HashSubwordTokenizer()
    if encoder_id in PRETRAINED_IDS:
        return resolve_tokenizer(PRETRAINED_IDS[encoder_id])
    raise ConfigurationError(f"unknown encoder id {encoder_id!r}")
