from typing import Optional

import numpy as np

from chansim.channel import interpolate_planes
from chansim.grid import PilotPattern
from errors import ConfigurationError
from network.model import ModelWeights, forward
from numeric.tensor import Tensor


class Estimator:
    """Maps a batch of pilot LS grids [B, N_S, N_D, 2] to channel estimates of the same shape."""
    name = 'estimator'

    def estimate(self, h_lr: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, h_lr: np.ndarray) -> np.ndarray:
        return self.estimate(h_lr)


class LsEstimator(Estimator):
    name = 'ls'

    def estimate(self, h_lr: np.ndarray) -> np.ndarray:
        return np.asarray(h_lr)


class LsLiEstimator(Estimator):
    name = 'lsli'

    def __init__(self, pattern: Optional[PilotPattern] = None):
        self.pattern = pattern or PilotPattern()

    def estimate(self, h_lr: np.ndarray) -> np.ndarray:
        return interpolate_planes(np.asarray(h_lr), self.pattern)


class HelenaEstimator(Estimator):
    name = 'helena'

    def __init__(self, weights: ModelWeights, input_mode: str = 'pilots', pattern: Optional[PilotPattern] = None):
        self.weights = weights.frozen()
        self.input_mode = input_mode
        self.pattern = pattern or PilotPattern()

    def estimate(self, h_lr: np.ndarray) -> np.ndarray:
        x = np.asarray(h_lr)
        if self.input_mode == 'interpolated':
            x = interpolate_planes(x, self.pattern)
        return forward(self.weights, Tensor(x), training=False).numpy()


METHODS = ('helena', 'ls', 'lsli')


def resolve_methods(method: str):
    if method == 'all':
        return list(METHODS)
    if method not in METHODS:
        raise ConfigurationError(f"method must be 'all' or one of {list(METHODS)}, got {method!r}", field='method')
    return [method]
