"""Seeded local surrogate explanations via word-deletion perturbation.

For one input, random token-deletion masks are scored by the model and a
weighted linear surrogate is fit; its signed coefficients are the
per-token influence weights on the target class. Proximity weights use an
exponential kernel over the cosine distance between a mask and the intact
text, with width 0.25 * sqrt(token count).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from sklearn.linear_model import Ridge

from ..errors import ValidationError
from ..trainer.model import Checkpoint, predict

KERNEL_WIDTH_FACTOR = 0.25


@dataclass(frozen=True)
class Explanation:
    text: str
    target_class: int
    features: tuple[tuple[str, float], ...]  # sorted by |weight| desc
    surrogate_fit: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "target_class": self.target_class,
            "features": [{"token": t, "weight": w} for t, w in self.features],
            "surrogate_fit": self.surrogate_fit,
            "seed": self.seed,
        }


def _as_predict_fn(model) -> Callable[[Sequence[str]], np.ndarray]:
    if isinstance(model, Checkpoint):
        return lambda texts: predict(model, texts)
    if callable(model):
        return model
    raise ValidationError(f"cannot score texts with {type(model).__name__}")


def explain(
    text: str,
    model,
    target_class: int,
    n_samples: int = 1000,
    n_features: int = 10,
    seed: int = 0,
) -> Explanation:
    """``model`` is a Checkpoint or a callable mapping a list of texts to
    an (n, 4) probability array."""
    tokens = text.split()
    if not tokens:
        raise ValidationError("cannot explain an empty text")
    if not 0 <= target_class <= 3:
        raise ValidationError(f"target_class must be in 0..3, got {target_class}")
    n_features = min(n_features, len(tokens))
    predict_fn = _as_predict_fn(model)
    rng = np.random.default_rng(seed)

    n_tokens = len(tokens)
    masks = rng.integers(0, 2, size=(n_samples, n_tokens))
    masks[0, :] = 1  # always include the intact text
    empty = masks.sum(axis=1) == 0
    if empty.any():  # keep one random token so every sample is scoreable
        keep = rng.integers(0, n_tokens, size=int(empty.sum()))
        masks[np.flatnonzero(empty), keep] = 1

    perturbed = [
        " ".join(tok for tok, m in zip(tokens, row) if m) for row in masks
    ]
    scores = np.asarray(predict_fn(perturbed))[:, target_class]

    # cosine distance of each mask to the all-ones mask
    kept = masks.sum(axis=1)
    distance = 1.0 - np.sqrt(kept / n_tokens)
    width = KERNEL_WIDTH_FACTOR * np.sqrt(n_tokens)
    kernel = np.exp(-(distance**2) / width**2)

    surrogate = Ridge(alpha=1.0)
    surrogate.fit(masks, scores, sample_weight=kernel)
    fit = float(surrogate.score(masks, scores, sample_weight=kernel))

    # aggregate position weights per surface token
    by_token: dict[str, float] = {}
    for tok, w in zip(tokens, surrogate.coef_):
        by_token[tok] = by_token.get(tok, 0.0) + float(w)
    ranked = sorted(by_token.items(), key=lambda kv: (-abs(kv[1]), kv[0]))
    return Explanation(
        text=text,
        target_class=target_class,
        features=tuple(ranked[:n_features]),
        surrogate_fit=fit,
        seed=seed,
    )
