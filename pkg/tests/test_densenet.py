import pytest

from swarmnas.densenet import ArchitectureSpec, LayerSpec, expand, flops, param_count
from swarmnas.encoding import DecodedGenotype, SearchSpace, default_space
from swarmnas.errors import InfeasibleArchitectureError


def small_space(blocks, h=8, w=8, c=3, classes=10):
    return SearchSpace(
        layer_ranges=tuple((n, n) for n, _ in blocks),
        growth_ranges=tuple((k, k) for _, k in blocks),
        input_height=h,
        input_width=w,
        input_channels=c,
        num_classes=classes,
    )


def layer_oracle(blocks, h, w, c, classes):
    """Independent cost table: explicit (kh, kw, cin, cout, hout, wout) rows."""
    rows = []
    first_growth = blocks[0][1]
    rows.append((3, 3, c, 2 * first_growth, h, w))
    channels = 2 * first_growth
    for b, (num_layers, growth) in enumerate(blocks):
        for _ in range(num_layers):
            rows.append((3, 3, channels, growth, h, w))
            channels += growth
        if b < len(blocks) - 1:
            rows.append((1, 1, channels, channels, h, w))
            h, w = h // 2, w // 2
    conv_flops = sum(2 * kh * kw * cin * cout * ho * wo for kh, kw, cin, cout, ho, wo in rows)
    conv_params = sum(kh * kw * cin * cout for kh, kw, cin, cout, _, _ in rows)
    total_flops = conv_flops + 2 * channels * classes
    total_params = conv_params + channels * classes + classes
    return total_flops, total_params


def test_expand_single_block_by_hand():
    blocks = ((2, 8),)
    arch = expand(DecodedGenotype(blocks), small_space(blocks))
    kinds = [l.kind for l in arch.layers]
    assert kinds == ["initial_conv", "dense_layer", "dense_layer", "global_pool", "classifier"]
    stem, d1, d2 = arch.layers[0], arch.layers[1], arch.layers[2]
    assert stem.out_channels == 16
    assert (d1.in_channels, d2.in_channels) == (16, 24)
    assert arch.layers[-1].in_channels == 32


def test_expand_transition_count():
    blocks = ((4, 8), (4, 8), (4, 8), (4, 8))
    arch = expand(DecodedGenotype(blocks), small_space(blocks, h=32, w=32))
    assert sum(1 for l in arch.layers if l.kind == "transition_conv") == 3
    assert sum(1 for l in arch.layers if l.kind == "transition_pool") == 3


def test_expand_spatial_halving_sequence():
    blocks = ((6, 32), (12, 32), (24, 32), (16, 32))
    arch = expand(DecodedGenotype(blocks), small_space(blocks, h=32, w=32))
    block_entry_sizes = [l.in_height for l in arch.layers if l.kind == "dense_layer"]
    seen = sorted(set(block_entry_sizes), reverse=True)
    assert seen == [32, 16, 8, 4]


def test_expand_infeasible_spatial_collapse():
    blocks = ((2, 8), (2, 8), (2, 8), (2, 8))
    with pytest.raises(InfeasibleArchitectureError):
        expand(DecodedGenotype(blocks), small_space(blocks, h=4, w=4))


def test_expand_channel_bookkeeping_invariant():
    blocks = ((6, 32), (12, 16), (24, 8), (16, 24))
    arch = expand(DecodedGenotype(blocks), small_space(blocks, h=32, w=32))
    entry = None
    count = 0
    for layer in arch.layers:
        if layer.kind == "dense_layer":
            if entry is None:
                entry, count = layer.in_channels, 0
            assert layer.in_channels == entry + count * layer.out_channels
            count += 1
        elif layer.kind == "transition_conv":
            entry, count = None, 0


def test_flops_single_pointwise_conv():
    arch = ArchitectureSpec(
        (
            LayerSpec("transition_conv", 16, 32, 1, 32, 32, 32, 32),
            LayerSpec("classifier", 32, 10, 0, 1, 1, 1, 1),
        ),
        10,
    )
    breakdown = flops(arch)
    assert breakdown.per_layer[0][1] == 1_048_576
    assert breakdown.total == 1_048_576 + 2 * 32 * 10


def test_flops_without_convolutions_is_classifier_only():
    arch = ArchitectureSpec(
        (
            LayerSpec("global_pool", 64, 64, 0, 4, 4, 1, 1),
            LayerSpec("classifier", 64, 10, 0, 1, 1, 1, 1),
        ),
        10,
    )
    assert flops(arch).total == 2 * 64 * 10


def test_flops_breakdown_sums_and_nonnegative():
    blocks = ((4, 8), (5, 12))
    arch = expand(DecodedGenotype(blocks), small_space(blocks, h=16, w=16))
    breakdown = flops(arch)
    assert breakdown.total == sum(f for _, f in breakdown.per_layer)
    assert all(f >= 0 for _, f in breakdown.per_layer)


REFERENCE_SHAPE = ((6, 32), (12, 32), (24, 32), (16, 32))
REFERENCE_FLOPS = 3_010_106_880
REFERENCE_PARAMS = 18_781_642


@pytest.mark.parametrize(
    "blocks,h,w,c,classes",
    [
        (REFERENCE_SHAPE, 32, 32, 3, 10),
        (((2, 8),), 8, 8, 3, 10),
        (((2, 8), (3, 16)), 16, 16, 3, 10),
        (((4, 8), (4, 8), (4, 8), (4, 8)), 32, 32, 3, 10),
    ],
)
def test_flops_matches_independent_oracle(blocks, h, w, c, classes):
    arch = expand(DecodedGenotype(blocks), small_space(blocks, h=h, w=w, c=c, classes=classes))
    breakdown = flops(arch)
    oracle_flops, oracle_params = layer_oracle(blocks, h, w, c, classes)
    assert breakdown.total == oracle_flops
    assert breakdown.params == oracle_params


def test_reference_network_frozen_totals():
    arch = expand(DecodedGenotype(REFERENCE_SHAPE), small_space(REFERENCE_SHAPE, h=32, w=32))
    breakdown = flops(arch)
    assert breakdown.total == REFERENCE_FLOPS
    assert breakdown.params == REFERENCE_PARAMS


def test_param_count_fixtures():
    conv3 = ArchitectureSpec((LayerSpec("dense_layer", 16, 8, 3, 8, 8, 8, 8),), 10)
    assert param_count(conv3) == 1152
    conv1 = ArchitectureSpec((LayerSpec("transition_conv", 64, 32, 1, 8, 8, 8, 8),), 10)
    assert param_count(conv1) == 2048
    cls_only = ArchitectureSpec((LayerSpec("classifier", 64, 10, 0, 1, 1, 1, 1),), 10)
    assert param_count(cls_only) == 64 * 10 + 10


def test_flops_monotone_in_growth_and_layers():
    space = default_space()
    base = ((5, 16), (8, 16), (12, 16), (8, 16))
    base_total = flops(expand(DecodedGenotype(base), space)).total
    for b in range(4):
        more_layers = list(base)
        more_layers[b] = (base[b][0] + 1, base[b][1])
        more_growth = list(base)
        more_growth[b] = (base[b][0], base[b][1] + 1)
        assert flops(expand(DecodedGenotype(tuple(more_layers)), space)).total >= base_total
        assert flops(expand(DecodedGenotype(tuple(more_growth)), space)).total >= base_total


def test_flops_pure():
    blocks = ((4, 12), (6, 20))
    space = small_space(blocks, h=16, w=16)
    a = flops(expand(DecodedGenotype(blocks), space))
    b = flops(expand(DecodedGenotype(blocks), space))
    assert a == b
