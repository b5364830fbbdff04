"""Real-vector genotype for dense-block hyperparameters.

A genotype is a flat vector of 2*num_blocks reals laid out as
(layers_1, growth_1, layers_2, growth_2, ...). Positions fly through a
continuous space; integers are recovered by half-up rounding only when an
architecture has to be materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SearchSpace:
    """Integer ranges for per-block hyperparameters plus the input geometry."""

    layer_ranges: tuple[tuple[int, int], ...]
    growth_ranges: tuple[tuple[int, int], ...]
    input_height: int = 32
    input_width: int = 32
    input_channels: int = 3
    num_classes: int = 10

    def __post_init__(self):
        object.__setattr__(self, "layer_ranges", tuple(tuple(r) for r in self.layer_ranges))
        object.__setattr__(self, "growth_ranges", tuple(tuple(r) for r in self.growth_ranges))
        if self.num_blocks < 1:
            raise ValueError("at least one block required")
        if len(self.growth_ranges) != self.num_blocks:
            raise ValueError("layer_ranges and growth_ranges must have equal length")
        for lo, hi in self.layer_ranges + self.growth_ranges:
            if lo < 1 or lo > hi:
                raise ValueError(f"invalid range ({lo}, {hi})")

    @property
    def num_blocks(self) -> int:
        return len(self.layer_ranges)

    @property
    def dimension(self) -> int:
        return 2 * self.num_blocks

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """(lower, upper) arrays in genotype layout order."""
        lower = np.empty(self.dimension)
        upper = np.empty(self.dimension)
        for b in range(self.num_blocks):
            lower[2 * b], upper[2 * b] = self.layer_ranges[b]
            lower[2 * b + 1], upper[2 * b + 1] = self.growth_ranges[b]
        return lower, upper

    def to_dict(self) -> dict:
        return {
            "layerRanges": [list(r) for r in self.layer_ranges],
            "growthRanges": [list(r) for r in self.growth_ranges],
            "inputHeight": self.input_height,
            "inputWidth": self.input_width,
            "inputChannels": self.input_channels,
            "numClasses": self.num_classes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SearchSpace":
        return cls(
            layer_ranges=tuple(tuple(r) for r in d["layerRanges"]),
            growth_ranges=tuple(tuple(r) for r in d["growthRanges"]),
            input_height=d["inputHeight"],
            input_width=d["inputWidth"],
            input_channels=d["inputChannels"],
            num_classes=d["numClasses"],
        )


def default_space() -> SearchSpace:
    """The four-block CIFAR-10 search space: layers 4-6/4-12/4-24/4-16, growth 8-32."""
    return SearchSpace(
        layer_ranges=((4, 6), (4, 12), (4, 24), (4, 16)),
        growth_ranges=((8, 32), (8, 32), (8, 32), (8, 32)),
    )


@dataclass(frozen=True)
class DecodedGenotype:
    """Integer (num_layers, growth_rate) per block."""

    per_block: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "per_block", tuple(tuple(p) for p in self.per_block))

    @property
    def key(self) -> tuple[int, ...]:
        """Flat integer tuple used as the memoization cache key."""
        return tuple(v for block in self.per_block for v in block)

    @classmethod
    def from_key(cls, key) -> "DecodedGenotype":
        key = tuple(int(v) for v in key)
        if len(key) % 2 != 0:
            raise ValueError("decoded key length must be even")
        return cls(tuple((key[i], key[i + 1]) for i in range(0, len(key), 2)))


def random_genotype(space: SearchSpace, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw per dimension within its range."""
    lower, upper = space.bounds()
    return rng.uniform(lower, upper)


def init_population(space: SearchSpace, pop_size: int, rng: np.random.Generator) -> list[np.ndarray]:
    if pop_size < 1:
        raise ValueError("pop_size must be >= 1")
    return [random_genotype(space, rng) for _ in range(pop_size)]


def clamp(genotype: np.ndarray, space: SearchSpace) -> np.ndarray:
    """Project each coordinate onto its [min, max] interval."""
    genotype = np.asarray(genotype, dtype=float)
    if genotype.shape != (space.dimension,):
        raise ValueError(f"genotype length {genotype.shape} != dimension {space.dimension}")
    lower, upper = space.bounds()
    return np.clip(genotype, lower, upper)


def decode(genotype: np.ndarray, space: SearchSpace) -> DecodedGenotype:
    """Half-up rounding to integers; requires an already-clamped genotype."""
    genotype = np.asarray(genotype, dtype=float)
    if genotype.shape != (space.dimension,):
        raise ValueError(f"genotype length {genotype.shape} != dimension {space.dimension}")
    lower, upper = space.bounds()
    if np.any(genotype < lower) or np.any(genotype > upper):
        raise ValueError("genotype must be clamped before decoding")
    per_block = []
    for b in range(space.num_blocks):
        layers = _round_half_up(genotype[2 * b], *space.layer_ranges[b])
        growth = _round_half_up(genotype[2 * b + 1], *space.growth_ranges[b])
        per_block.append((layers, growth))
    return DecodedGenotype(tuple(per_block))


def _round_half_up(value: float, lo: int, hi: int) -> int:
    return int(min(max(math.floor(value + 0.5), lo), hi))
