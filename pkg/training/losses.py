from numeric import ops
from numeric.tensor import Tensor
from errors import DimensionError


def mse_loss(pred: Tensor, label: Tensor) -> Tensor:
    """Mean of squared elementwise differences over every element."""
    if pred.shape != label.shape:
        raise DimensionError(f"mse_loss shapes differ: pred {list(pred.shape)} vs label {list(label.shape)}")
    diff = ops.sub(pred, label)
    return ops.mean(ops.mul(diff, diff))
