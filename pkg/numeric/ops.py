from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from errors import ConfigurationError, DimensionError
from numeric.tensor import Tensor, record

Axis = Optional[int]


def _new(data: np.ndarray, like: Tensor) -> Tensor:
    return Tensor(data, dtype=like.dtype)


def _broadcast_kind(a: Tensor, b: Tensor, op: str) -> str:
    if a.shape == b.shape:
        return 'same'
    if b.ndim == 1 and a.ndim >= 1 and b.shape[0] == a.shape[-1]:
        return 'b_vector'
    if a.ndim == 1 and b.ndim >= 1 and a.shape[0] == b.shape[-1]:
        return 'a_vector'
    raise DimensionError(f"{op}: shapes {list(a.shape)} and {list(b.shape)} are not broadcastable "
                         f"(only equal shapes or a last-axis vector are allowed)")


def _unbroadcast(grad: np.ndarray, target_shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == target_shape:
        return grad
    return grad.reshape(-1, target_shape[-1]).sum(axis=0)


def add(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_kind(a, b, 'add')
    out = _new(a.data + b.data, a)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return record('add', out, (a, b), backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_kind(a, b, 'sub')
    out = _new(a.data - b.data, a)

    def backward(g):
        return _unbroadcast(g, a.shape), -_unbroadcast(g, b.shape)

    return record('sub', out, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_kind(a, b, 'mul')
    out = _new(a.data * b.data, a)

    def backward(g):
        ga = _unbroadcast(g * b.data, a.shape) if a.requires_grad else None
        gb = _unbroadcast(g * a.data, b.shape) if b.requires_grad else None
        return ga, gb

    return record('mul', out, (a, b), backward)


def scale(x: Tensor, factor: float) -> Tensor:
    out = _new(x.data * factor, x)

    def backward(g):
        return (g * factor,)

    return record('scale', out, (x,), backward)


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    out = _new(np.where(mask, x.data, 0), x)

    def backward(g):
        return (g * mask,)

    return record('relu', out, (x,), backward)


def sigmoid(x: Tensor) -> Tensor:
    s = expit(x.data).astype(x.dtype, copy=False)
    out = _new(s, x)

    def backward(g):
        return (g * s * (1 - s),)

    return record('sigmoid', out, (x,), backward)


_ELEMENTWISE = {
    'add': add,
    'mul': mul,
    'relu': relu,
    'sigmoid': sigmoid,
}


def elementwise(op: str, *operands: Tensor) -> Tensor:
    if op not in _ELEMENTWISE:
        raise ConfigurationError(f"unknown elementwise op {op!r}; expected one of {sorted(_ELEMENTWISE)}", field='op')
    return _ELEMENTWISE[op](*operands)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product over the last two axes.

    ``b`` is either a plain matrix shared by every leading index of ``a`` or carries the
    same leading axes as ``a``.
    """
    if a.ndim < 2 or b.ndim < 2:
        raise DimensionError(f"matmul needs matrices, got {list(a.shape)} x {list(b.shape)}")
    if a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul inner extents differ: {list(a.shape)} x {list(b.shape)}")
    if b.ndim > 2 and a.shape[:-2] != b.shape[:-2]:
        raise DimensionError(f"matmul batch extents differ: {list(a.shape)} x {list(b.shape)}")
    out = _new(np.matmul(a.data, b.data), a)

    def backward(g):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2)) if a.requires_grad else None
        gb = None
        if b.requires_grad:
            if b.ndim == 2:
                gb = a.data.reshape(-1, a.shape[-1]).T @ g.reshape(-1, g.shape[-1])
            else:
                gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return ga, gb

    return record('matmul', out, (a, b), backward)


def transpose(x: Tensor) -> Tensor:
    if x.ndim < 2:
        raise DimensionError(f"transpose needs at least 2 axes, got {list(x.shape)}")
    out = _new(np.swapaxes(x.data, -1, -2), x)

    def backward(g):
        return (np.swapaxes(g, -1, -2),)

    return record('transpose', out, (x,), backward)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    shape = tuple(shape)
    if int(np.prod(shape)) != x.size:
        raise DimensionError(f"cannot reshape {list(x.shape)} into {list(shape)}")
    out = _new(x.data.reshape(shape), x)

    def backward(g):
        return (g.reshape(x.shape),)

    return record('reshape', out, (x,), backward)


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    if not tensors:
        raise DimensionError("concat of an empty sequence")
    ref = tensors[0].shape
    ax = axis % len(ref)
    for t in tensors[1:]:
        if len(t.shape) != len(ref) or any(t.shape[i] != ref[i] for i in range(len(ref)) if i != ax):
            raise DimensionError(f"concat: {list(t.shape)} does not match {list(ref)} off axis {axis}")
    out = _new(np.concatenate([t.data for t in tensors], axis=ax), tensors[0])
    splits = np.cumsum([t.shape[ax] for t in tensors])[:-1]

    def backward(g):
        return tuple(np.split(g, splits, axis=ax))

    return record('concat', out, tuple(tensors), backward)


def broadcast_to(x: Tensor, shape: Sequence[int]) -> Tensor:
    """Explicitly repeat unit axes of ``x`` up to ``shape``."""
    shape = tuple(shape)
    if x.ndim != len(shape) or any(s != t and s != 1 for s, t in zip(x.shape, shape)):
        raise DimensionError(f"cannot broadcast {list(x.shape)} to {list(shape)}")
    out = _new(np.broadcast_to(x.data, shape).copy(), x)
    axes = tuple(i for i, (s, t) in enumerate(zip(x.shape, shape)) if s == 1 and t != 1)

    def backward(g):
        return (g.sum(axis=axes, keepdims=True) if axes else g,)

    return record('broadcast_to', out, (x,), backward)


def softmax(x: Tensor) -> Tensor:
    """Softmax along the last axis with max subtraction."""
    if x.ndim == 0 or x.shape[-1] < 1:
        raise DimensionError(f"softmax needs a non-empty last axis, got {list(x.shape)}")
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=-1, keepdims=True)
    out = _new(s, x)

    def backward(g):
        return (s * (g - (g * s).sum(axis=-1, keepdims=True)),)

    return record('softmax', out, (x,), backward)


def _normalize_axis(x: Tensor, axis: Axis) -> Axis:
    if axis is None:
        return None
    if not -x.ndim <= axis < x.ndim:
        raise DimensionError(f"axis {axis} is invalid for shape {list(x.shape)}")
    return axis % x.ndim


def reduce(op: str, x: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:
    if op not in ('sum', 'mean'):
        raise ConfigurationError(f"unknown reduction {op!r}; expected 'sum' or 'mean'", field='op')
    ax = _normalize_axis(x, axis)
    n = x.size if ax is None else x.shape[ax]
    data = x.data.sum(axis=ax, keepdims=keepdims)
    if op == 'mean':
        data = data / n
    out = _new(data, x)

    def backward(g):
        if ax is not None and not keepdims:
            g = np.expand_dims(g, ax)
        g = np.broadcast_to(g, x.shape)
        if op == 'mean':
            g = g / n
        return (g,)

    return record(op, out, (x,), backward)


def sum(x: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:
    return reduce('sum', x, axis, keepdims)


def mean(x: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:
    return reduce('mean', x, axis, keepdims)


def same_padding(kernel_extent: int) -> Tuple[int, int]:
    """Leading and trailing zero padding that keeps a stride-1 axis length unchanged."""
    lead = (kernel_extent - 1) // 2
    return lead, kernel_extent - 1 - lead


def conv2d_same(x: Tensor, kernel: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """Stride-1 cross-correlation with "same" zero padding.

    ``x`` is ``[..., H, W, Cin]`` and ``kernel`` is ``[kh, kw, Cin, Cout]``. Each kernel tap
    contributes one shifted matrix product, which keeps memory linear in the input size.
    """
    if x.ndim < 3 or kernel.ndim != 4:
        raise DimensionError(f"conv2d_same expects [..., H, W, Cin] and [kh, kw, Cin, Cout], "
                             f"got {list(x.shape)} and {list(kernel.shape)}")
    kh, kw, cin, cout = kernel.shape
    if x.shape[-1] != cin:
        raise DimensionError(f"conv2d_same: input has {x.shape[-1]} channels but kernel "
                             f"{list(kernel.shape)} expects {cin}")
    if bias is not None and bias.shape != (cout,):
        raise DimensionError(f"conv2d_same: bias {list(bias.shape)} does not match {cout} filters")
    h, w = x.shape[-3], x.shape[-2]
    lead = x.shape[:-3]
    pt, pb = same_padding(kh)
    pl, pr = same_padding(kw)
    xp = np.pad(x.data, [(0, 0)] * len(lead) + [(pt, pb), (pl, pr), (0, 0)])
    k = kernel.data
    out = np.zeros(lead + (h, w, cout), dtype=x.dtype)
    for i in range(kh):
        for j in range(kw):
            out += xp[..., i:i + h, j:j + w, :] @ k[i, j]
    if bias is not None:
        out += bias.data
    result = _new(out, x)
    inputs = (x, kernel) if bias is None else (x, kernel, bias)

    def backward(g):
        g2 = g.reshape(-1, cout)
        gk = np.empty_like(k) if kernel.requires_grad else None
        gxp = np.zeros_like(xp) if x.requires_grad else None
        for i in range(kh):
            for j in range(kw):
                if gk is not None:
                    gk[i, j] = xp[..., i:i + h, j:j + w, :].reshape(-1, cin).T @ g2
                if gxp is not None:
                    gxp[..., i:i + h, j:j + w, :] += g @ k[i, j].T
        gx = gxp[..., pt:pt + h, pl:pl + w, :] if gxp is not None else None
        grads = [gx, gk]
        if bias is not None:
            grads.append(g2.sum(axis=0))
        return tuple(grads)

    return record('conv2d_same', result, inputs, backward)
