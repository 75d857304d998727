from network.complexity import conv2d_flops, count_flops, dense_flops, flop_breakdown
from network.model import ModelConfig

PUBLISHED_FLOPS = 0.077e9


def test_hand_counts():
    assert conv2d_flops(2, 2, 1, 1, 1, 1) == 8
    assert dense_flops(51, 64, 336, bias=False) == 2193408
    assert dense_flops(51, 64, 336) == 2193408 + 51 * 336


def test_default_total_near_published():
    total = count_flops(ModelConfig())
    assert PUBLISHED_FLOPS / 2 <= total <= PUBLISHED_FLOPS * 2


def test_breakdown_sums_to_total():
    config = ModelConfig()
    rows = flop_breakdown(config)
    assert sum(v for _, v in rows) == count_flops(config)
    assert rows[0][0] == 'conv1'
    assert all(v > 0 for _, v in rows)


def test_deterministic_and_se_costs_extra():
    assert count_flops(ModelConfig()) == count_flops(ModelConfig())
    assert count_flops(ModelConfig(use_se=False)) < count_flops(ModelConfig())
