"""Training loop, checkpointing, inference, and the decision rule.

The classifier is an encoder with four independent sigmoid heads over the
pooled representation. NonViolent is not a head: it is the decision taken
when every class score falls below the threshold.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn

from ..corpus import CLASSES, DECISIONS, Corpus, SplitSpec
from ..errors import ConfigurationError, TrainingError, ValidationError
from .early_stopping import EarlyStopper
from .encoders import build_encoder, tokenizer_for
from .weights import ClassWeights, weights_from_counts

NUM_CLASSES = 4


@dataclass(frozen=True)
class ModelConfig:
    encoder_id: str = "tiny"
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 2e-5
    patience: int = 2
    use_class_weights: bool = True
    max_tokens: int = 512
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        if self.patience < 0:
            raise ValidationError(f"patience must be >= 0, got {self.patience}")
        if not 0 < self.learning_rate < 1:
            raise ValidationError(
                f"learning_rate must be in (0, 1), got {self.learning_rate}"
            )
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")


@dataclass
class TrainHistory:
    epochs: list[dict] = field(default_factory=list)

    def append(self, record: dict) -> None:
        self.epochs.append(record)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(rec) + "\n" for rec in self.epochs)


class Classifier(nn.Module):
    def __init__(self, encoder_id: str):
        super().__init__()
        self.encoder = build_encoder(encoder_id)
        self.head = nn.Linear(self.encoder.hidden_size, NUM_CLASSES)

    def forward(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        return self.head(self.encoder(ids, mask))


def encode_texts(
    texts: Sequence[str], tokenizer, max_tokens: int
) -> tuple[torch.Tensor, torch.Tensor]:
    """Tokenize and pad to the longest sequence in the batch (id 0 = pad)."""
    encoded = [tokenizer.encode(t)[:max_tokens] or [0] for t in texts]
    width = max(len(e) for e in encoded)
    ids = torch.zeros(len(encoded), width, dtype=torch.long)
    mask = torch.zeros(len(encoded), width, dtype=torch.float)
    for i, e in enumerate(encoded):
        ids[i, : len(e)] = torch.tensor(e, dtype=torch.long)
        mask[i, : len(e)] = 1.0
    return ids, mask


def _labels_tensor(corpus: Corpus, ids: Sequence[str]) -> torch.Tensor:
    rows = [corpus.get(i).labels.as_tuple() for i in ids]
    return torch.tensor(rows, dtype=torch.float)


def corpus_fingerprint(corpus: Corpus, ids: Sequence[str]) -> str:
    h = hashlib.sha256()
    for i in sorted(ids):
        s = corpus.get(i)
        h.update(f"{s.id}\x1f{s.text}\x1f{s.labels.as_tuple()}\n".encode("utf-8"))
    return h.hexdigest()


def _val_macro_f1(probs: np.ndarray, gold: np.ndarray, threshold: float = 0.5) -> float:
    from ..metrics import per_class_prf

    pred = (probs >= threshold).astype(int)
    f1s = [per_class_prf(pred[:, c], gold[:, c])[2] for c in range(NUM_CLASSES)]
    return float(np.mean(f1s))


@dataclass
class Checkpoint:
    path: Path
    config: ModelConfig
    best_epoch: int
    val_metric_at_best: float
    corpus_fingerprint: str
    _model: Classifier | None = None

    @property
    def meta(self) -> dict:
        return {
            "config": asdict(self.config),
            "best_epoch": self.best_epoch,
            "val_metric_at_best": self.val_metric_at_best,
            "corpus_fingerprint": self.corpus_fingerprint,
        }

    def save(self, model: Classifier, history: TrainHistory) -> None:
        self.path.mkdir(parents=True, exist_ok=True)
        torch.save(model.state_dict(), self.path / "weights.pt")
        (self.path / "config.json").write_text(
            json.dumps(self.meta, indent=2) + "\n", encoding="utf-8"
        )
        (self.path / "history.jsonl").write_text(history.to_jsonl(), encoding="utf-8")
        self._model = model

    @classmethod
    def load(cls, path) -> "Checkpoint":
        path = Path(path)
        meta_file = path / "config.json"
        if not meta_file.exists():
            raise ConfigurationError(f"no checkpoint at {path}")
        meta = json.loads(meta_file.read_text(encoding="utf-8"))
        return cls(
            path=path,
            config=ModelConfig(**meta["config"]),
            best_epoch=meta["best_epoch"],
            val_metric_at_best=meta["val_metric_at_best"],
            corpus_fingerprint=meta["corpus_fingerprint"],
        )

    def model(self) -> Classifier:
        if self._model is None:
            model = Classifier(self.config.encoder_id)
            state = torch.load(self.path / "weights.pt", map_location="cpu")
            model.load_state_dict(state)
            model.eval()
            self._model = model
        return self._model


def _run_epoch(model, optimizer, loss_fn, ids, mask, labels, batch_size, train_mode):
    model.train(train_mode)
    n = ids.shape[0]
    total = 0.0
    with torch.set_grad_enabled(train_mode):
        for start in range(0, n, batch_size):
            sl = slice(start, start + batch_size)
            logits = model(ids[sl], mask[sl])
            loss = loss_fn(logits, labels[sl])
            if train_mode:
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
            total += float(loss.detach()) * (min(start + batch_size, n) - start)
    return total / n


def train(
    config: ModelConfig,
    splits: SplitSpec,
    corpus: Corpus,
    checkpoint_dir,
    class_weights: ClassWeights | None = None,
) -> tuple[Checkpoint, TrainHistory]:
    """Fine-tune with weighted per-class BCE, early stopping on validation
    loss, and best-checkpoint selection."""
    torch.manual_seed(config.seed)
    np.random.seed(config.seed % (2**32))

    tokenizer = tokenizer_for(config.encoder_id)
    train_ids = sorted(splits.train)
    val_ids = sorted(splits.val)
    train_texts = [corpus.get(i).text for i in train_ids]
    val_texts = [corpus.get(i).text for i in val_ids]
    x_train, m_train = encode_texts(train_texts, tokenizer, config.max_tokens)
    x_val, m_val = encode_texts(val_texts, tokenizer, config.max_tokens)
    y_train = _labels_tensor(corpus, train_ids)
    y_val = _labels_tensor(corpus, val_ids)

    pos_weight = None
    if config.use_class_weights:
        if class_weights is None:
            counts = {
                name: int(y_train[:, c].sum()) for c, name in enumerate(CLASSES)
            }
            class_weights = weights_from_counts(counts, len(train_ids))
        pos_weight = torch.tensor(class_weights.as_list(), dtype=torch.float)
    loss_fn = nn.BCEWithLogitsLoss(pos_weight=pos_weight)

    model = Classifier(config.encoder_id)
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    stopper = EarlyStopper(patience=config.patience, mode="min")
    history = TrainHistory()
    best_state = None
    best_val_f1 = 0.0

    checkpoint_dir = Path(checkpoint_dir)
    for epoch in range(1, config.epochs + 1):
        train_loss = _run_epoch(
            model, optimizer, loss_fn, x_train, m_train, y_train,
            config.batch_size, train_mode=True,
        )
        val_loss = _run_epoch(
            model, optimizer, loss_fn, x_val, m_val, y_val,
            config.batch_size, train_mode=False,
        )
        if math.isnan(train_loss) or math.isnan(val_loss):
            checkpoint_dir.mkdir(parents=True, exist_ok=True)
            (checkpoint_dir / "diagnostics.json").write_text(
                json.dumps({"aborted_at_epoch": epoch, "history": history.epochs})
            )
            raise TrainingError(
                f"NaN loss at epoch {epoch}; diagnostics dumped to {checkpoint_dir}"
            )
        with torch.no_grad():
            model.eval()
            val_probs = torch.sigmoid(model(x_val, m_val)).numpy()
        val_f1 = _val_macro_f1(val_probs, y_val.numpy())
        history.append(
            {
                "epoch": epoch,
                "train_loss": train_loss,
                "val_loss": val_loss,
                "val_macro_f1": val_f1,
            }
        )
        stop = stopper.update(val_loss)
        if stopper.best_epoch == epoch:
            best_state = copy.deepcopy(model.state_dict())
            best_val_f1 = val_f1
        if stop:
            break

    model.load_state_dict(best_state)
    checkpoint = Checkpoint(
        path=checkpoint_dir,
        config=config,
        best_epoch=stopper.best_epoch,
        val_metric_at_best=best_val_f1,
        corpus_fingerprint=corpus_fingerprint(corpus, train_ids),
    )
    checkpoint.save(model, history)
    return checkpoint, history


def predict(
    checkpoint: Checkpoint, texts: Sequence[str], batch_size: int = 32
) -> np.ndarray:
    """Per-class sigmoid probabilities; one row per input, order preserved."""
    if len(texts) == 0:
        return np.zeros((0, NUM_CLASSES))
    model = checkpoint.model()
    model.eval()
    tokenizer = tokenizer_for(checkpoint.config.encoder_id)
    rows = []
    with torch.no_grad():
        for start in range(0, len(texts), batch_size):
            chunk = list(texts[start : start + batch_size])
            ids, mask = encode_texts(chunk, tokenizer, checkpoint.config.max_tokens)
            rows.append(torch.sigmoid(model(ids, mask)).numpy())
    return np.concatenate(rows, axis=0)


def decide(row, threshold: float = 0.5) -> str:
    """Reduce a 4-vector of class scores to one of the five decisions.

    All scores below the threshold mean NonViolent; otherwise argmax with
    ties broken by fixed class order (religio > ethno > nondenominational
    > noncommunal, which is column order).
    """
    arr = np.asarray(row, dtype=float)
    if arr.shape != (NUM_CLASSES,):
        raise ValidationError(f"expected a 4-vector, got shape {arr.shape}")
    if np.any(arr < 0) or np.any(arr > 1):
        raise ValidationError(f"scores must lie in [0, 1], got {arr.tolist()}")
    if np.all(arr < threshold):
        return "NonViolent"
    return DECISIONS[int(np.argmax(arr))]
