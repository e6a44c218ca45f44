"""Hyperparameter search over learning rate and batch size.

Sequential model-based optimization: a handful of seeded random trials,
then a Gaussian-process surrogate with expected-improvement acquisition.
Falls back to pure random search when the surrogate cannot be fit. Every
trial is appended to a JSONL log.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..errors import CtlabError, ValidationError
from .model import ModelConfig

N_WARMUP = 4
N_CANDIDATES = 256


@dataclass(frozen=True)
class SearchSpace:
    learning_rate: tuple[float, float] = (1e-5, 1e-3)  # log-uniform
    batch_size: Sequence[int] = (8, 16, 32, 64)

    def __post_init__(self):
        lo, hi = self.learning_rate
        if not (0 < lo < hi < 1):
            raise ValidationError(f"invalid learning_rate bounds {self.learning_rate}")
        if not self.batch_size:
            raise ValidationError("batch_size choices must be non-empty")


@dataclass
class Trial:
    config: ModelConfig
    objective: float | None
    error: str | None = None


def _sample(space: SearchSpace, rng: np.random.Generator, base: ModelConfig) -> ModelConfig:
    lo, hi = space.learning_rate
    lr = float(math.exp(rng.uniform(math.log(lo), math.log(hi))))
    bs = int(rng.choice(list(space.batch_size)))
    return replace(base, learning_rate=lr, batch_size=bs)


def _to_features(config: ModelConfig, space: SearchSpace) -> list[float]:
    lo, hi = space.learning_rate
    lr01 = (math.log(config.learning_rate) - math.log(lo)) / (math.log(hi) - math.log(lo))
    choices = sorted(space.batch_size)
    bs01 = choices.index(config.batch_size) / max(len(choices) - 1, 1)
    return [lr01, bs01]


def _propose_ei(
    trials: list[Trial], space: SearchSpace, rng: np.random.Generator, base: ModelConfig
) -> ModelConfig:
    """Expected-improvement proposal from a GP over completed trials."""
    done = [t for t in trials if t.objective is not None]
    X = np.array([_to_features(t.config, space) for t in done])
    y = np.array([t.objective for t in done])
    try:
        from sklearn.gaussian_process import GaussianProcessRegressor
        from sklearn.gaussian_process.kernels import Matern

        gp = GaussianProcessRegressor(
            kernel=Matern(nu=2.5), normalize_y=True, random_state=0
        )
        gp.fit(X, y)
    except Exception:
        return _sample(space, rng, base)  # random-search fallback
    candidates = [_sample(space, rng, base) for _ in range(N_CANDIDATES)]
    feats = np.array([_to_features(c, space) for c in candidates])
    mu, sigma = gp.predict(feats, return_std=True)
    best = y.max()
    sigma = np.maximum(sigma, 1e-12)
    z = (mu - best) / sigma
    from scipy.stats import norm as _norm  # scipy ships with scikit-learn

    ei = (mu - best) * _norm.cdf(z) + sigma * _norm.pdf(z)
    return candidates[int(np.argmax(ei))]


def tune(
    search_space: SearchSpace,
    budget: int,
    objective: Callable[[ModelConfig], float],
    base_config: ModelConfig = ModelConfig(),
    seed: int = 0,
    trial_log: str | Path | None = None,
) -> ModelConfig:
    """Return the evaluated config with the best objective (validation
    macro F1; higher is better)."""
    if budget < 1:
        raise ValidationError(f"budget must be >= 1, got {budget}")
    rng = np.random.default_rng(seed)
    trials: list[Trial] = []
    log_path = Path(trial_log) if trial_log else None
    if log_path:
        log_path.parent.mkdir(parents=True, exist_ok=True)
        log_path.write_text("")

    for i in range(budget):
        n_done = sum(1 for t in trials if t.objective is not None)
        if n_done < N_WARMUP:
            config = _sample(search_space, rng, base_config)
        else:
            config = _propose_ei(trials, search_space, rng, base_config)
        try:
            value = float(objective(config))
            trial = Trial(config=config, objective=value)
        except Exception as e:
            trial = Trial(config=config, objective=None, error=str(e))
        trials.append(trial)
        if log_path:
            with log_path.open("a", encoding="utf-8") as fh:
                fh.write(
                    json.dumps(
                        {
                            "trial": i,
                            "config": asdict(trial.config),
                            "objective": trial.objective,
                            "error": trial.error,
                        }
                    )
                    + "\n"
                )

    done = [t for t in trials if t.objective is not None]
    if not done:
        errors = "; ".join(t.error or "?" for t in trials)
        raise CtlabError(f"all {budget} tuning trials failed: {errors}")
    return max(done, key=lambda t: t.objective).config
