"""Expansion of decoded genotypes into concrete layer sequences and their cost.

Cost conventions (fixed so numbers are reproducible):
  * a convolution counts 2 * kh * kw * C_in * C_out * H_out * W_out FLOPs
    (multiply-add = 2 ops) and kh * kw * C_in * C_out weights (no bias);
  * the classifier counts 2 * in_features * num_classes FLOPs and
    in_features * num_classes + num_classes weights;
  * batch norm, ReLU and pooling count zero.

Structural conventions: the stem is a 3x3 stride-1 convolution with
2 * (growth rate of block 1) output channels; transitions are a 1x1
convolution with unchanged channel count followed by 2x2 average pooling;
dense layers are plain BN-ReLU-3x3conv (no bottleneck, no compression).
"""

from __future__ import annotations

from dataclasses import dataclass

from .encoding import DecodedGenotype, SearchSpace
from .errors import InfeasibleArchitectureError


@dataclass(frozen=True)
class LayerSpec:
    kind: str  # initial_conv | dense_layer | transition_conv | transition_pool | global_pool | classifier
    in_channels: int
    out_channels: int
    kernel: int  # 0 for non-conv layers
    in_height: int
    in_width: int
    out_height: int
    out_width: int

    @property
    def is_conv(self) -> bool:
        return self.kind in ("initial_conv", "dense_layer", "transition_conv")


@dataclass(frozen=True)
class ArchitectureSpec:
    layers: tuple[LayerSpec, ...]
    num_classes: int


@dataclass(frozen=True)
class FlopsBreakdown:
    per_layer: tuple[tuple[int, int], ...]  # (layer index, flops)
    total: int
    params: int

    def to_dict(self) -> dict:
        return {
            "perLayer": [list(p) for p in self.per_layer],
            "total": self.total,
            "params": self.params,
        }


def expand(decoded: DecodedGenotype, space: SearchSpace) -> ArchitectureSpec:
    """Stem -> blocks with transitions -> global pool -> classifier."""
    if len(decoded.per_block) != space.num_blocks:
        raise ValueError("decoded genotype does not match space block count")
    layers: list[LayerSpec] = []
    h, w = space.input_height, space.input_width
    channels = space.input_channels
    first_growth = decoded.per_block[0][1]

    stem_out = 2 * first_growth
    layers.append(LayerSpec("initial_conv", channels, stem_out, 3, h, w, h, w))
    channels = stem_out

    for b, (num_layers, growth) in enumerate(decoded.per_block):
        if h < 1 or w < 1:
            raise InfeasibleArchitectureError(
                f"spatial size collapsed to {h}x{w} before block {b}"
            )
        for _ in range(num_layers):
            layers.append(LayerSpec("dense_layer", channels, growth, 3, h, w, h, w))
            channels += growth
        if b < space.num_blocks - 1:
            layers.append(LayerSpec("transition_conv", channels, channels, 1, h, w, h, w))
            layers.append(LayerSpec("transition_pool", channels, channels, 0, h, w, h // 2, w // 2))
            h, w = h // 2, w // 2

    layers.append(LayerSpec("global_pool", channels, channels, 0, h, w, 1, 1))
    layers.append(LayerSpec("classifier", channels, space.num_classes, 0, 1, 1, 1, 1))
    return ArchitectureSpec(tuple(layers), space.num_classes)


def flops(arch: ArchitectureSpec) -> FlopsBreakdown:
    per_layer = []
    total = 0
    for i, layer in enumerate(arch.layers):
        if layer.is_conv:
            f = 2 * layer.kernel * layer.kernel * layer.in_channels * layer.out_channels
            f *= layer.out_height * layer.out_width
        elif layer.kind == "classifier":
            f = 2 * layer.in_channels * layer.out_channels
        else:
            f = 0
        per_layer.append((i, f))
        total += f
    return FlopsBreakdown(tuple(per_layer), total, param_count(arch))


def param_count(arch: ArchitectureSpec) -> int:
    params = 0
    for layer in arch.layers:
        if layer.is_conv:
            params += layer.kernel * layer.kernel * layer.in_channels * layer.out_channels
        elif layer.kind == "classifier":
            params += layer.in_channels * layer.out_channels + layer.out_channels
    return params


def genotype_flops(decoded: DecodedGenotype, space: SearchSpace) -> int:
    """Total FLOPs of the expanded architecture."""
    return flops(expand(decoded, space)).total
