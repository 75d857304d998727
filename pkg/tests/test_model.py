import dataclasses

import numpy as np
import pytest

from errors import ConfigurationError, DimensionError
from network.model import (ModelConfig, ModelWeights, build, count_params, forward, parameter_shapes, patchify,
                           unpatchify)
from numeric import ops
from numeric.gradcheck import gradient_error
from numeric.tensor import Tensor

DEFAULT_PARAMS = 129712
SE_PARAMS = 2 * (64 * 64 // 4) + 64 // 4 + 64

# mirrors the tiny_config fixture, which parametrize cannot reach
TINY = ModelConfig(n_subcarriers=24, n_symbols=4, kernel1=(3, 2), kernel2=(2, 3), c1=2, c=2, patch=6, d=8, heads=2,
                   reduction=2, dropout_rate=0.1)

DEFAULT_STAGES = [
    ('input', (612, 14, 2)),
    ('conv1', (612, 14, 8)),
    ('conv2', (612, 14, 8)),
    ('patchify', (51, 1344)),
    ('embed', (51, 64)),
    ('mhsa', (51, 64)),
    ('se', (51, 64)),
    ('recon', (51, 336)),
    ('unpatchify', (612, 14, 2)),
    ('output', (612, 14, 2)),
]


def test_default_config_derived_sizes():
    config = ModelConfig()
    assert config.n_tokens == 51
    assert config.token_dim == 1344
    assert config.patch_out == 336
    assert config.head_dim == 16


@pytest.mark.parametrize('changes,field', [
    ({'patch': 7}, 'patch'),
    ({'heads': 3}, 'heads'),
    ({'reduction': 5}, 'reduction'),
    ({'d': 0}, 'd'),
    ({'dropout_rate': 1.0}, 'dropout_rate'),
])
def test_invalid_configs(changes, field):
    with pytest.raises(ConfigurationError) as e:
        ModelConfig(**changes).validate()
    assert e.value.field == field


def test_config_dict_round_trip():
    config = ModelConfig(use_se=False, kernel1=(6, 3))
    assert ModelConfig.from_dict(config.to_dict()) == config


def test_default_parameter_count(rng):
    weights = build(ModelConfig(), rng)
    assert count_params(weights) == DEFAULT_PARAMS
    assert 0.10e6 <= DEFAULT_PARAMS <= 0.14e6


def test_se_removal_parameter_delta(rng):
    with_se = count_params(build(ModelConfig(), rng))
    without = count_params(build(ModelConfig(use_se=False), rng))
    assert with_se - without == SE_PARAMS


def test_count_params_edge_cases():
    assert count_params({}) == 0
    assert count_params({'recon.weight': Tensor(np.zeros((64, 336))), 'recon.bias': Tensor(np.zeros(336))}) == 21840


def test_build_is_deterministic():
    a = build(ModelConfig(), np.random.default_rng(3))
    b = build(ModelConfig(), np.random.default_rng(3))
    for (name, x), (_, y) in zip(a.items(), b.items()):
        assert np.array_equal(x.numpy(), y.numpy()), name


def test_build_initial_values(rng):
    weights = build(ModelConfig(), rng)
    assert np.all(weights['mhsa.norm.gamma'].numpy() == 1)
    assert np.all(weights['mhsa.norm.beta'].numpy() == 0)
    assert np.all(weights['embed.bias'].numpy() == 0)
    bound = np.sqrt(6.0 / (1344 + 64))
    assert np.abs(weights['embed.weight'].numpy()).max() <= bound * (1 + 1e-6)


def test_parameter_order_starts_with_convs():
    names = list(parameter_shapes(ModelConfig()))
    assert names[:4] == ['conv1.kernel', 'conv1.bias', 'conv2.kernel', 'conv2.bias']
    assert names[-2:] == ['recon.weight', 'recon.bias']
    assert 'se.w1' not in parameter_shapes(ModelConfig(use_se=False))


def test_patchify_shapes(rng):
    assert patchify(Tensor(np.zeros((612, 14, 8))), 12).shape == (51, 1344)
    assert patchify(Tensor(np.zeros((24, 4, 2))), 24).shape == (1, 192)
    with pytest.raises(ConfigurationError):
        patchify(Tensor(np.zeros((24, 4, 2))), 5)


def test_patch_round_trip(rng):
    config = ModelConfig()
    x = rng.standard_normal((612, 14, 2))
    back = unpatchify(patchify(Tensor(x), config.patch), config)
    np.testing.assert_array_equal(back.numpy(), x.astype(np.float32))
    assert not unpatchify(Tensor(np.zeros((51, 336))), config).numpy().any()


def test_unpatchify_rejects_wrong_shape():
    with pytest.raises(DimensionError):
        unpatchify(Tensor(np.zeros((50, 336))), ModelConfig())


def test_stage_chain(rng):
    weights = build(ModelConfig(), rng)
    stages = []
    out = forward(weights, Tensor(rng.standard_normal((612, 14, 2))), stages=stages)
    assert stages == DEFAULT_STAGES
    assert out.shape == (612, 14, 2)


def test_mhsa_variant_skips_se(rng):
    stages = []
    forward(build(ModelConfig(use_se=False), rng), Tensor(np.zeros((612, 14, 2))), stages=stages)
    assert 'se' not in [name for name, _ in stages]


def test_saturated_excitation_matches_attention_only(tiny_config, float64, rng):
    weights = build(tiny_config, rng)
    d = tiny_config.d
    weights = weights.replace({'se.w2': Tensor(np.zeros((tiny_config.bottleneck, d))),
                               'se.b2': Tensor(np.full(d, 30.0))})
    plain = ModelWeights(dataclasses.replace(tiny_config, use_se=False),
                         {n: t for n, t in weights.items() if not n.startswith('se.')})
    x = Tensor(rng.standard_normal((2, 24, 4, 2)))
    np.testing.assert_allclose(forward(weights, x).numpy(), forward(plain, x).numpy(), atol=1e-4)


def test_zero_network_passes_input_through(rng):
    config = ModelConfig()
    h_lr = Tensor(rng.standard_normal((612, 14, 2)))
    out = forward(ModelWeights.zeros(config), h_lr)
    assert np.array_equal(out.numpy(), h_lr.numpy())


def test_inference_is_deterministic(tiny_config, rng):
    weights = build(tiny_config, rng)
    x = Tensor(rng.standard_normal((24, 4, 2)))
    assert np.array_equal(forward(weights, x).numpy(), forward(weights, x).numpy())


def test_batched_forward_matches_single(tiny_config, rng, float64):
    weights = build(tiny_config, rng)
    x = rng.standard_normal((3, 24, 4, 2))
    batched = forward(weights, Tensor(x)).numpy()
    for b in range(3):
        np.testing.assert_allclose(batched[b], forward(weights, Tensor(x[b])).numpy(), atol=1e-12)


def test_forward_rejects_wrong_grid(tiny_config, rng):
    with pytest.raises(DimensionError):
        forward(build(tiny_config, rng), Tensor(np.zeros((24, 5, 2))))


def test_training_forward_needs_generator(tiny_config, rng):
    with pytest.raises(ConfigurationError):
        forward(build(tiny_config, rng), Tensor(np.zeros((24, 4, 2))), training=True)


@pytest.mark.parametrize('name', list(parameter_shapes(TINY)))
def test_end_to_end_gradients(tiny_config, float64, name):
    rng = np.random.default_rng(11)
    weights = build(tiny_config, rng)
    x = Tensor(rng.standard_normal((24, 4, 2)))
    y = Tensor(rng.standard_normal((24, 4, 2)))

    def loss(t):
        pred = forward(weights.replace({name: t}), x)
        diff = ops.sub(pred, y)
        return ops.mean(ops.mul(diff, diff))

    assert gradient_error(loss, weights[name]) < 1e-4


def test_end_to_end_input_gradient(tiny_config, float64):
    rng = np.random.default_rng(12)
    weights = build(tiny_config, rng)
    y = Tensor(rng.standard_normal((24, 4, 2)))

    def loss(t):
        diff = ops.sub(forward(weights, t), y)
        return ops.mean(ops.mul(diff, diff))

    assert gradient_error(loss, Tensor(rng.standard_normal((24, 4, 2)))) < 1e-4
