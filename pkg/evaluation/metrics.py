import math
from typing import Tuple

import numpy as np

from chansim.grid import ChannelGrid
from errors import DimensionError, NumericError

NMSE_FLOOR_DB = -100.0


def _planes(value) -> np.ndarray:
    if isinstance(value, ChannelGrid):
        return value.planes
    return np.asarray(getattr(value, 'data', value), dtype=np.float64)


def squared_errors(h_hat, h) -> Tuple[np.ndarray, np.ndarray]:
    """Per-sample ‖Ĥ−H‖² and ‖H‖² in float64 for grids [..., N_S, N_D, 2]."""
    a, b = _planes(h_hat).astype(np.float64), _planes(h).astype(np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"nmse shapes differ: estimate {list(a.shape)} vs truth {list(b.shape)}")
    if a.ndim < 3 or a.shape[-1] != 2:
        raise DimensionError(f"nmse expects [..., N_S, N_D, 2] planes, got {list(a.shape)}")
    axes = (-3, -2, -1)
    return ((a - b) ** 2).sum(axis=axes), (b ** 2).sum(axis=axes)


def ratio(errors: np.ndarray, energies: np.ndarray) -> float:
    energy = float(np.sum(energies))
    if energy == 0.0:
        raise NumericError("true channel has zero energy; NMSE is undefined")
    return float(np.sum(errors)) / energy


def nmse(h_hat, h) -> float:
    """E[‖Ĥ−H‖²] / E[‖H‖²] over the batch."""
    return ratio(*squared_errors(h_hat, h))


def nmse_db(linear: float) -> float:
    if linear <= 0.0:
        return NMSE_FLOOR_DB
    return max(10.0 * math.log10(linear), NMSE_FLOOR_DB)
