"""Early stopping with best-epoch tracking, as a pure function and as an
incremental helper used by the training loop.

Improvement is strict. With patience p, training stops at the first epoch
e such that the best value so far occurred at epoch e - p; the returned
checkpoint is the best epoch, not the last.
"""

from __future__ import annotations

from collections.abc import Sequence


def simulate_early_stopping(
    metrics: Sequence[float], patience: int, mode: str = "min"
) -> tuple[int, int]:
    """Return (stop_epoch, best_epoch), both 1-indexed.

    If the stopping condition never triggers, stop_epoch is the last epoch.
    """
    if not metrics:
        raise ValueError("metric sequence is empty")
    if patience < 0:
        raise ValueError(f"patience must be >= 0, got {patience}")
    stopper = EarlyStopper(patience=patience, mode=mode)
    for value in metrics:
        if stopper.update(value):
            break
    return stopper.epoch, stopper.best_epoch


class EarlyStopper:
    def __init__(self, patience: int, mode: str = "min"):
        if mode not in ("min", "max"):
            raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
        self.patience = patience
        self.mode = mode
        self.epoch = 0
        self.best_epoch = 0
        self.best_value: float | None = None

    def _improves(self, value: float) -> bool:
        if self.best_value is None:
            return True
        return value < self.best_value if self.mode == "min" else value > self.best_value

    def update(self, value: float) -> bool:
        """Record one epoch's monitored value; True means stop now."""
        self.epoch += 1
        if self._improves(value):
            self.best_value = value
            self.best_epoch = self.epoch
        return self.epoch - self.best_epoch >= self.patience
