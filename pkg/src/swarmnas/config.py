"""Flat key-value experiment configuration.

Format: one `key = value` pair per line, `#` starts a comment. Defaults
mirror the standard four-block CIFAR-style experiment; `seed` has no
default and must be present. Worker addresses may be overridden with the
SWARMNAS_WORKERS environment variable (comma-separated host:port list).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .encoding import SearchSpace, default_space

WORKERS_ENV_VAR = "SWARMNAS_WORKERS"


class ConfigError(Exception):
    """Invalid or missing configuration value; names the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field '{field_name}': {message}")
        self.field_name = field_name


@dataclass
class ExperimentConfig:
    population: int = 20
    generations: int = 20
    seed: int = 0
    evaluator: str = "surrogate"
    space: SearchSpace = field(default_factory=default_space)
    epsilon_accuracy: float = 0.01
    epsilon_flops: float = 0.05
    flops_scale: float = 1e9
    max_epochs: int = 300
    patience: int = 10
    surrogate_base: float = 0.60
    surrogate_gain: float = 0.38
    surrogate_penalty: float = 0.04
    surrogate_flops_half: float = 1.5e9
    zdt_dimensions: int = 30
    workers: tuple[str, ...] = ()
    cache_path: str | None = None
    history_path: str | None = None

    @property
    def epsilon(self) -> tuple[float, float]:
        return (self.epsilon_accuracy, self.epsilon_flops)


def _parse_range(raw: str, key: str) -> tuple[int, int]:
    try:
        lo, hi = raw.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise ConfigError(key, f"expected 'min:max', got {raw!r}") from None


def parse_config(text: str, path: str = "<config>") -> ExperimentConfig:
    pairs: dict[str, str] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_number}", f"expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()

    def take(key, convert, default):
        raw = pairs.pop(key, None)
        if raw is None:
            return default
        try:
            return convert(raw)
        except (TypeError, ValueError):
            raise ConfigError(key, f"could not parse {raw!r}") from None

    cfg = ExperimentConfig()
    if "seed" not in pairs:
        raise ConfigError("seed", "is required (no wall-clock seeding)")
    cfg.seed = take("seed", int, None)
    cfg.population = take("population", int, cfg.population)
    cfg.generations = take("generations", int, cfg.generations)
    cfg.evaluator = take("evaluator", str, cfg.evaluator)
    cfg.epsilon_accuracy = take("epsilon_accuracy", float, cfg.epsilon_accuracy)
    cfg.epsilon_flops = take("epsilon_flops", float, cfg.epsilon_flops)
    cfg.flops_scale = take("flops_scale", float, cfg.flops_scale)
    cfg.max_epochs = take("max_epochs", int, cfg.max_epochs)
    cfg.patience = take("patience", int, cfg.patience)
    cfg.surrogate_base = take("surrogate_base", float, cfg.surrogate_base)
    cfg.surrogate_gain = take("surrogate_gain", float, cfg.surrogate_gain)
    cfg.surrogate_penalty = take("surrogate_penalty", float, cfg.surrogate_penalty)
    cfg.surrogate_flops_half = take("surrogate_flops_half", float, cfg.surrogate_flops_half)
    cfg.zdt_dimensions = take("zdt_dimensions", int, cfg.zdt_dimensions)
    cfg.cache_path = take("cache_path", str, cfg.cache_path)
    cfg.history_path = take("history_path", str, cfg.history_path)

    workers_raw = pairs.pop("workers", "")
    workers_raw = os.environ.get(WORKERS_ENV_VAR) or workers_raw
    cfg.workers = tuple(w.strip() for w in workers_raw.split(",") if w.strip())

    cfg.space = _parse_space(pairs, cfg.space)

    if cfg.population < 1:
        raise ConfigError("population", f"must be >= 1, got {cfg.population}")
    if cfg.generations < 0:
        raise ConfigError("generations", f"must be >= 0, got {cfg.generations}")
    if cfg.evaluator not in ("surrogate", "zdt1", "remote"):
        raise ConfigError("evaluator", f"unknown evaluator {cfg.evaluator!r}")
    if cfg.epsilon_accuracy <= 0 or cfg.epsilon_flops <= 0:
        raise ConfigError("epsilon_accuracy" if cfg.epsilon_accuracy <= 0 else "epsilon_flops", "must be > 0")
    if cfg.evaluator == "remote" and not cfg.workers:
        raise ConfigError("workers", "remote evaluator requires at least one worker address")
    if pairs:
        raise ConfigError(next(iter(pairs)), "unknown key")
    return cfg


def _parse_space(pairs: dict[str, str], default: SearchSpace) -> SearchSpace:
    num_blocks = None
    if "num_blocks" in pairs:
        try:
            num_blocks = int(pairs.pop("num_blocks"))
        except ValueError:
            raise ConfigError("num_blocks", "must be an integer") from None
    space_keys = [k for k in pairs if k.startswith(("layer_range_", "growth_range"))]
    geometry_keys = [k for k in pairs if k in ("input_height", "input_width", "input_channels", "num_classes")]
    if num_blocks is None and not space_keys and not geometry_keys:
        return default

    if num_blocks is None:
        num_blocks = default.num_blocks
    layer_ranges = list(default.layer_ranges[:num_blocks])
    growth_ranges = list(default.growth_ranges[:num_blocks])
    while len(layer_ranges) < num_blocks:
        layer_ranges.append(default.layer_ranges[-1])
        growth_ranges.append(default.growth_ranges[-1])
    if "growth_range" in pairs:
        growth_ranges = [_parse_range(pairs.pop("growth_range"), "growth_range")] * num_blocks
    for b in range(num_blocks):
        if f"layer_range_{b + 1}" in pairs:
            layer_ranges[b] = _parse_range(pairs.pop(f"layer_range_{b + 1}"), f"layer_range_{b + 1}")
        if f"growth_range_{b + 1}" in pairs:
            growth_ranges[b] = _parse_range(pairs.pop(f"growth_range_{b + 1}"), f"growth_range_{b + 1}")

    def geom(key, fallback):
        raw = pairs.pop(key, None)
        if raw is None:
            return fallback
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(key, "must be an integer") from None

    try:
        return SearchSpace(
            layer_ranges=tuple(layer_ranges),
            growth_ranges=tuple(growth_ranges),
            input_height=geom("input_height", default.input_height),
            input_width=geom("input_width", default.input_width),
            input_channels=geom("input_channels", default.input_channels),
            num_classes=geom("num_classes", default.num_classes),
        )
    except ValueError as exc:
        raise ConfigError("layer_range/growth_range", str(exc)) from None


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), path)
