"""Five-member ensembling: elementwise mean, 3-of-5 majority vote, or a
trained stacker network over the concatenated member probabilities."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn

from .corpus import DECISIONS
from .errors import ConfigurationError, LeakageError, ValidationError
from .trainer.model import Checkpoint, decide, predict

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

NUM_MEMBERS = 5
NUM_CLASSES = 4
VOTE_QUORUM = 3
STACKER_HIDDEN = 32


def _stack(matrices: Sequence[np.ndarray]) -> np.ndarray:
    if len(matrices) != NUM_MEMBERS:
        raise ValidationError(f"expected {NUM_MEMBERS} member matrices, got {len(matrices)}")
    arrays = [np.asarray(m, dtype=float) for m in matrices]
    shape = arrays[0].shape
    for i, a in enumerate(arrays):
        if a.shape != shape:
            raise ValidationError(
                f"member matrix {i} has shape {a.shape}, expected {shape}"
            )
    return np.stack(arrays, axis=0)


def combine_mean(matrices: Sequence[np.ndarray]) -> np.ndarray:
    return _stack(matrices).mean(axis=0)


def combine_vote(matrices: Sequence[np.ndarray], threshold: float = 0.5) -> np.ndarray:
    """Per cell: 1 iff at least 3 of 5 members score >= threshold."""
    if not 0 < threshold < 1:
        raise ValidationError(f"threshold must be in (0, 1), got {threshold}")
    votes = (_stack(matrices) >= threshold).astype(int)
    return (votes.sum(axis=0) >= VOTE_QUORUM).astype(int)


class StackerNet(nn.Module):
    """MLP mapping 5x4 member probabilities to 4 sigmoid class scores."""

    def __init__(self):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(NUM_MEMBERS * NUM_CLASSES, STACKER_HIDDEN),
            nn.GELU(),
            nn.Linear(STACKER_HIDDEN, NUM_CLASSES),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)


@dataclass
class StackerModel:
    net: StackerNet
    val_fingerprint: tuple[str, ...]

    def predict(self, member_matrices: Sequence[np.ndarray]) -> np.ndarray:
        stacked = _stack(member_matrices)  # (5, n, 4)
        x = torch.tensor(
            np.concatenate([stacked[m] for m in range(NUM_MEMBERS)], axis=1),
            dtype=torch.float,
        )
        self.net.eval()
        with torch.no_grad():
            return torch.sigmoid(self.net(x)).numpy()

    def save(self, path) -> None:
        torch.save(
            {"state": self.net.state_dict(), "val_ids": list(self.val_fingerprint)},
            path,
        )

    @classmethod
    def load(cls, path) -> "StackerModel":
        blob = torch.load(path, map_location="cpu")
        net = StackerNet()
        net.load_state_dict(blob["state"])
        return cls(net=net, val_fingerprint=tuple(blob["val_ids"]))


def train_stacker(
    member_val_predictions: Sequence[np.ndarray],
    val_labels: np.ndarray,
    val_ids: Sequence[str] = (),
    test_ids: Sequence[str] = (),
    class_weights: Sequence[float] | None = None,
    epochs: int = 200,
    learning_rate: float = 1e-2,
    seed: int = 0,
) -> StackerModel:
    """Fit the stacker on validation-split predictions only.

    Any overlap between the provided validation ids and test ids is a hard
    leakage failure.
    """
    leaked = set(val_ids) & set(test_ids)
    if leaked:
        raise LeakageError(
            f"test-split ids in stacker training inputs: {sorted(leaked)[:5]}"
        )
    stacked = _stack(member_val_predictions)
    y = torch.tensor(np.asarray(val_labels, dtype=float), dtype=torch.float)
    if y.shape != (stacked.shape[1], NUM_CLASSES):
        raise ValidationError(
            f"val_labels shape {tuple(y.shape)} does not match predictions"
        )
    x = torch.tensor(
        np.concatenate([stacked[m] for m in range(NUM_MEMBERS)], axis=1),
        dtype=torch.float,
    )
    torch.manual_seed(seed)
    net = StackerNet()
    pos_weight = (
        torch.tensor(list(class_weights), dtype=torch.float) if class_weights else None
    )
    loss_fn = nn.BCEWithLogitsLoss(pos_weight=pos_weight)
    optimizer = torch.optim.Adam(net.parameters(), lr=learning_rate)
    net.train()
    for _ in range(epochs):
        optimizer.zero_grad()
        loss = loss_fn(net(x), y)
        loss.backward()
        optimizer.step()
    return StackerModel(net=net, val_fingerprint=tuple(sorted(val_ids)))


@dataclass
class EnsembleSpec:
    members: list[str]
    combiner: str = "vote"
    threshold: float = 0.5
    stacker_path: str | None = None

    def __post_init__(self):
        if len(self.members) != NUM_MEMBERS:
            raise ValidationError(
                f"an ensemble has exactly {NUM_MEMBERS} members, got {len(self.members)}"
            )
        if self.combiner not in ("mean", "vote", "stacker"):
            raise ValidationError(f"unknown combiner {self.combiner!r}")
        if self.combiner == "stacker" and not self.stacker_path:
            raise ValidationError("combiner 'stacker' requires stacker_path")

    @classmethod
    def from_toml(cls, path) -> "EnsembleSpec":
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"ensemble spec not found: {path}")
        data = tomllib.loads(path.read_text(encoding="utf-8"))
        return cls(
            members=list(data["members"]),
            combiner=data.get("combiner", "vote"),
            threshold=float(data.get("threshold", 0.5)),
            stacker_path=data.get("stacker_path"),
        )

    def load_members(self) -> list[Checkpoint]:
        missing = [m for m in self.members if not (Path(m) / "config.json").exists()]
        if missing:
            raise ConfigurationError(f"missing member checkpoints: {missing}")
        return [Checkpoint.load(m) for m in self.members]


def vote_decision(
    vote_row: np.ndarray, member_probs_row: np.ndarray
) -> str:
    """Decision for one binary vote row.

    All-zeros is NonViolent; a single winner is that class; multiple
    winners resolve by the members' mean probability among them.
    """
    winners = np.flatnonzero(vote_row)
    if winners.size == 0:
        return "NonViolent"
    if winners.size == 1:
        return DECISIONS[int(winners[0])]
    means = member_probs_row.mean(axis=0)  # (4,)
    best = winners[int(np.argmax(means[winners]))]
    return DECISIONS[int(best)]


def run_ensemble(
    spec: EnsembleSpec, texts: Sequence[str]
) -> tuple[np.ndarray, list[str]]:
    """Predict with every member once, combine per spec, and reduce each
    row to a decision label."""
    members = spec.load_members()
    matrices = [predict(cp, texts) for cp in members]
    return combine_matrices(spec, matrices)


def combine_matrices(
    spec: EnsembleSpec, matrices: Sequence[np.ndarray]
) -> tuple[np.ndarray, list[str]]:
    """Offline combination of already-exported member predictions."""
    stacked = _stack(matrices)
    if spec.combiner == "mean":
        combined = combine_mean(matrices)
        decisions = [decide(row, spec.threshold) for row in combined]
    elif spec.combiner == "vote":
        combined = combine_vote(matrices, spec.threshold)
        decisions = [
            vote_decision(combined[i], stacked[:, i, :])
            for i in range(combined.shape[0])
        ]
    else:
        stacker = StackerModel.load(spec.stacker_path)
        combined = stacker.predict(matrices)
        decisions = [decide(row, spec.threshold) for row in combined]
    return combined, decisions
