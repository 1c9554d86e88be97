"""Run configuration: defaults, simple key=value config files, flag and
environment overrides.

Precedence for the seed: command-line flag, then the CLONESCOPE_SEED
environment variable, then the config file, then the default.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from clonescope.gbdt import HyperPoint
from clonescope.similarity import DEFAULT_DELTA, DEFAULT_MATCH_THRESHOLD

SEED_ENV_VAR = "CLONESCOPE_SEED"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    delta: float = DEFAULT_DELTA
    mode: str = "proportion"
    match_threshold: float = DEFAULT_MATCH_THRESHOLD
    hyper: HyperPoint | None = None
    hyper_path: str | None = None
    model_path: str | None = None
    train_pairs_path: str | None = None
    out_dir: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie strictly between 0 and 1")
        if not 0.0 < self.match_threshold < 1.0:
            raise ValueError("match_threshold must lie strictly between 0 and 1")
        if self.mode not in ("proportion", "literal"):
            raise ValueError(f"unknown aggregation mode {self.mode!r}")


_CONFIG_KEYS = {
    "seed": int,
    "delta": float,
    "mode": str,
    "match_threshold": float,
    "hyper": str,
    "model": str,
    "train_pairs": str,
    "out_dir": str,
}

_KEY_TO_FIELD = {
    "seed": "seed",
    "delta": "delta",
    "mode": "mode",
    "match_threshold": "match_threshold",
    "hyper": "hyper_path",
    "model": "model_path",
    "train_pairs": "train_pairs_path",
    "out_dir": "out_dir",
}


def parse_config_file(path: str | Path) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    values: dict = {}
    for raw_line in Path(path).read_text().splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {raw_line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        values[_KEY_TO_FIELD[key]] = _CONFIG_KEYS[key](value)
    return values


def load_config(
    config_path: str | Path | None = None,
    overrides: dict | None = None,
    env: dict | None = None,
) -> RunConfig:
    """Assemble the effective configuration (flags > env seed > file > defaults)."""
    values: dict = {}
    if config_path is not None:
        values.update(parse_config_file(config_path))

    env = os.environ if env is None else env
    env_seed = env.get(SEED_ENV_VAR)
    if env_seed is not None:
        values["seed"] = int(env_seed)

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    return RunConfig(**values)


def resolve_hyper(config: RunConfig) -> HyperPoint:
    if config.hyper is not None:
        return config.hyper
    if config.hyper_path:
        import json

        data = json.loads(Path(config.hyper_path).read_text())
        return HyperPoint.from_json(data.get("hyper", data))
    return HyperPoint()
