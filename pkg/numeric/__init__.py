from .tensor import Tensor, Tape, set_default_dtype, get_default_dtype, active_tape, record
from .ops import (add, sub, mul, scale, relu, sigmoid, elementwise, matmul, transpose, reshape,
                  concat, broadcast_to, softmax, reduce, mean, conv2d_same, same_padding)
from .gradcheck import finite_diff_grad, tape_grad, max_relative_error, gradient_error

__all__ = [
    'Tensor', 'Tape', 'set_default_dtype', 'get_default_dtype', 'active_tape', 'record',
    'add', 'sub', 'mul', 'scale', 'relu', 'sigmoid', 'elementwise', 'matmul', 'transpose',
    'reshape', 'concat', 'broadcast_to', 'softmax', 'reduce', 'mean', 'conv2d_same', 'same_padding',
    'finite_diff_grad', 'tape_grad', 'max_relative_error', 'gradient_error',
]
