"""Experiment configuration: loading, validation and stable hashing."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .exceptions import ConfigError

SCHEMA_VERSION = 1

TASKS = ("xor", "parity", "memory", "double-scroll", "kernel")
BACKENDS = ("analytic", "pipeline")
SWEEP_AXES = ("train_size", "tau", "R", "n", "N", "noise")


@dataclass(frozen=True)
class Sizes:
    washout: int = 50
    train: int = 100
    test: int = 50

    def __post_init__(self) -> None:
        for name in ("washout", "train", "test"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"sizes.{name} must be positive")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: task, encoding/noise presets, geometry, sizes, seeds."""

    task: str
    preset: str
    noise: str = "off"
    backend: str = "analytic"
    reservoirs: int | None = None
    segments: int = 1
    modes: int = 1
    tau: int = 1
    sizes: Sizes = field(default_factory=Sizes)
    seeds: tuple[int, ...] = (0,)
    shuffle_split: bool = False
    regularization: float = 0.0
    source: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    out: str = "results"

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r} (expected one of {TASKS})")
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}")
        if not self.seeds:
            raise ConfigError("seed list must not be empty")
        if self.tau < 0:
            raise ConfigError("tau must be non-negative")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def replace(self, **kwargs) -> "ExperimentConfig":
        return dataclasses.replace(self, **kwargs)

    def canonical(self) -> dict:
        """Semantic content of the config; excludes the output location."""
        data = dataclasses.asdict(self)
        data.pop("out")
        data["seeds"] = list(self.seeds)
        return data

    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def config_from_dict(raw: dict, out_override: str | None = None) -> ExperimentConfig:
    raw = dict(raw)
    sizes = raw.pop("sizes", {})
    if not isinstance(sizes, dict):
        raise ConfigError("sizes must be a mapping with washout/train/test")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        config = ExperimentConfig(sizes=Sizes(**sizes), **raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    if out_override:
        config = config.replace(out=out_override)
    return config


def load_config(path: str | Path, out_override: str | None = None) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return config_from_dict(raw, out_override)
