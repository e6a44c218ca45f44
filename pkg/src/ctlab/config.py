"""Run configuration: one TOML file, overridable by CTLAB_<FIELD>
environment variables, with CLI flags taking final precedence.

All randomness flows from one root seed, fanned out into named
substreams so that reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import hashlib
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigurationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ENV_PREFIX = "CTLAB_"


@dataclass(frozen=True)
class RunConfig:
    corpus: str = ""
    stopwords: str = ""
    emoji_map: str = ""
    checkpoint_dir: str = "checkpoints"
    output_dir: str = "out"
    ensemble_spec: str = ""
    encoder_id: str = "tiny"
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 2e-5
    patience: int = 2
    use_class_weights: bool = True
    max_tokens: int = 512
    seed: int = 0

    def validated_paths(self, required: tuple[str, ...]) -> "RunConfig":
        """Check every required input path before any work begins."""
        for name in required:
            value = getattr(self, name)
            if not value:
                raise ConfigurationError(f"config field {name!r} is not set")
            if not Path(value).exists():
                raise ConfigurationError(f"{name} path does not exist: {value}")
        return self


def _coerce(raw: str, target_type):
    if target_type is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return target_type(raw)


def load_run_config(config_path: str | None = None, **flag_overrides) -> RunConfig:
    """File values < environment values < flag values."""
    values: dict = {}
    if config_path:
        path = Path(config_path)
        if not path.exists():
            raise ConfigurationError(f"config file not found: {path}")
        data = tomllib.loads(path.read_text(encoding="utf-8"))
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for f in fields(RunConfig):
        env_value = os.environ.get(ENV_PREFIX + f.name.upper())
        if env_value is not None:
            values[f.name] = _coerce(env_value, f.type if isinstance(f.type, type) else type(getattr(RunConfig(), f.name)))
    for key, value in flag_overrides.items():
        if value is not None:
            values[key] = value
    try:
        return RunConfig(**values)
    except TypeError as e:
        raise ConfigurationError(str(e)) from e


def substream_seed(root_seed: int, name: str) -> int:
    """Stable named derivation of per-component seeds from the root seed."""
    digest = hashlib.sha256(f"{root_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:4], "big")
