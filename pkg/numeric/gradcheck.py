import math
from typing import Callable, Union

import numpy as np

from errors import NumericError
from numeric.tensor import Tape, Tensor

ScalarFn = Callable[[Tensor], Union[Tensor, float]]


def _scalar(value) -> float:
    if isinstance(value, Tensor):
        if value.size != 1:
            raise NumericError(f"gradient oracle needs a scalar function, got shape {list(value.shape)}")
        return value.item()
    return float(value)


def finite_diff_grad(f: ScalarFn, x: Tensor, h: float = 1e-5) -> Tensor:
    """Central-difference estimate of df/dx, one coordinate at a time."""
    base = np.array(x.data, copy=True)
    grad = np.zeros_like(base)
    flat = base.reshape(-1)
    for idx in range(flat.size):
        orig = flat[idx]
        flat[idx] = orig + h
        f_plus = _scalar(f(Tensor(base.copy(), dtype=base.dtype)))
        flat[idx] = orig - h
        f_minus = _scalar(f(Tensor(base.copy(), dtype=base.dtype)))
        flat[idx] = orig
        if not (math.isfinite(f_plus) and math.isfinite(f_minus)):
            raise NumericError(f"function is not finite around coordinate {idx}")
        grad.reshape(-1)[idx] = (f_plus - f_minus) / (2 * h)
    return Tensor(grad, dtype=base.dtype)


def tape_grad(f: ScalarFn, x: Tensor) -> Tensor:
    leaf = Tensor(np.array(x.data, copy=True), requires_grad=True, dtype=x.dtype)
    with Tape() as tape:
        out = f(leaf)
    tape.backward(out)
    if leaf.grad is None:
        return Tensor(np.zeros_like(leaf.data), dtype=x.dtype)
    return leaf.grad


def max_relative_error(analytic: Tensor, numeric: Tensor) -> float:
    """Largest absolute deviation scaled by the largest gradient magnitude of either estimate."""
    a = np.asarray(analytic.data, dtype=np.float64)
    n = np.asarray(numeric.data, dtype=np.float64)
    scale = max(np.abs(a).max(initial=0.0), np.abs(n).max(initial=0.0))
    if scale == 0.0:
        return 0.0
    return float(np.abs(a - n).max() / scale)


def gradient_error(f: ScalarFn, x: Tensor, h: float = 1e-5) -> float:
    return max_relative_error(tape_grad(f, x), finite_diff_grad(f, x, h))
