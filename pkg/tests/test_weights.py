import struct

import numpy as np
import pytest

from errors import FormatError
from network.model import ModelConfig, build, count_params
from network.weights import WEIGHTS_MAGIC, decode_entries, encode_weights, load_weights, save_weights


def test_save_then_load_is_bit_exact(tmp_path, tiny_config, rng):
    weights = build(tiny_config, rng)
    path = str(tmp_path / 'w.bin')
    save_weights(weights, path)
    loaded = load_weights(path, tiny_config)
    assert count_params(loaded) == count_params(weights)
    for (name, a), (other, b) in zip(weights.items(), loaded.items()):
        assert name == other
        assert np.array_equal(a.numpy(), b.numpy())


def test_file_layout(tiny_config, rng):
    weights = build(tiny_config, rng)
    blob = encode_weights(weights)
    assert blob.startswith(WEIGHTS_MAGIC)
    assert struct.unpack('<I', blob[5:9])[0] == len(weights)
    names = [name for name, _ in decode_entries(blob)]
    assert names == weights.names()


def test_wrong_patch_names_embedding(tmp_path, rng):
    config = ModelConfig()
    path = str(tmp_path / 'w.bin')
    save_weights(build(config, rng), path)
    with pytest.raises(FormatError) as e:
        load_weights(path, ModelConfig(patch=6))
    assert e.value.entry == 'embed.weight'
    assert 'embed.weight' in str(e.value)


def test_missing_se_entries(tmp_path, tiny_config, rng):
    path = str(tmp_path / 'w.bin')
    save_weights(build(tiny_config, rng), path)
    with pytest.raises(FormatError):
        load_weights(path, ModelConfig(**dict(tiny_config.to_dict(), use_se=False,
                                               kernel1=tiny_config.kernel1, kernel2=tiny_config.kernel2)))


def test_corrupted_magic(tmp_path, tiny_config, rng):
    path = tmp_path / 'w.bin'
    blob = bytearray(encode_weights(build(tiny_config, rng)))
    blob[0:5] = b'XXXXX'
    path.write_bytes(bytes(blob))
    with pytest.raises(FormatError):
        load_weights(str(path), tiny_config)


def test_truncated_file(tmp_path, tiny_config, rng):
    path = tmp_path / 'w.bin'
    path.write_bytes(encode_weights(build(tiny_config, rng))[:-3])
    with pytest.raises(FormatError):
        load_weights(str(path), tiny_config)
