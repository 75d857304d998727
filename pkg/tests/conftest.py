import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from network.model import ModelConfig  # noqa: E402
from numeric.tensor import set_default_dtype  # noqa: E402


@pytest.fixture
def float64():
    set_default_dtype('float64')
    yield np.float64
    set_default_dtype('float32')


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config():
    """Shrunken HELENA used for gradient checks and quick training runs."""
    return ModelConfig(n_subcarriers=24, n_symbols=4, kernel1=(3, 2), kernel2=(2, 3), c1=2, c=2, patch=6,
                       d=8, heads=2, reduction=2, dropout_rate=0.1)


@pytest.fixture
def tiny_dataset(tmp_path):
    from chansim.dataset import generate_dataset
    return generate_dataset(22, str(tmp_path / 'tiny.bin'), master_seed=7, n_subcarriers=24, n_symbols=4)
