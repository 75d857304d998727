import threading
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from errors import ConsistencyError, ConfigurationError

SUPPORTED_DTYPES = {'float32': np.float32, 'float64': np.float64}

_default_dtype = np.float32
_tape_state = threading.local()


def set_default_dtype(dtype) -> None:
    """Select the scalar precision of newly created tensors (float32 or float64)."""
    global _default_dtype
    if isinstance(dtype, str):
        if dtype not in SUPPORTED_DTYPES:
            raise ConfigurationError(f"precision must be one of {sorted(SUPPORTED_DTYPES)}, got {dtype!r}",
                                     field='precision')
        dtype = SUPPORTED_DTYPES[dtype]
    dtype = np.dtype(dtype).type
    if dtype not in (np.float32, np.float64):
        raise ConfigurationError(f"unsupported tensor dtype {dtype.__name__}", field='precision')
    _default_dtype = dtype


def get_default_dtype():
    return _default_dtype


class Tensor:
    def __init__(self, data, requires_grad: bool = False, dtype=None):
        self.data = np.asarray(data, dtype=dtype or _default_dtype)
        self.requires_grad = requires_grad
        self.grad: Optional['Tensor'] = None
        self._tape: Optional['Tape'] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def detach(self) -> 'Tensor':
        return Tensor(self.data, dtype=self.data.dtype)

    def backward(self):
        if self._tape is None:
            raise ConsistencyError("tensor was not produced on a tape; run the forward pass inside `with Tape()`")
        self._tape.backward(self)

    def _accumulate(self, grad: np.ndarray):
        if self.grad is None:
            self.grad = Tensor(np.array(grad, dtype=self.data.dtype), dtype=self.data.dtype)
        else:
            self.grad = Tensor(self.grad.data + grad, dtype=self.data.dtype)

    def __add__(self, other):
        from numeric import ops
        return ops.add(self, _as_tensor(other, self))

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        from numeric import ops
        return ops.sub(self, _as_tensor(other, self))

    def __mul__(self, other):
        from numeric import ops
        if np.isscalar(other):
            return ops.scale(self, float(other))
        return ops.mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        from numeric import ops
        return ops.scale(self, -1.0)

    def __matmul__(self, other):
        from numeric import ops
        return ops.matmul(self, other)

    def __repr__(self):
        flag = ', requires_grad=True' if self.requires_grad else ''
        return f"Tensor(shape={list(self.shape)}, dtype={self.data.dtype.name}{flag})"


def _as_tensor(value, like: Tensor) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(np.full(like.shape, value, dtype=like.dtype), dtype=like.dtype)


BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class TapeEntry:
    def __init__(self, name: str, output: Tensor, inputs: Sequence[Tensor], backward_fn: BackwardFn):
        self.name = name
        self.output = output
        self.inputs = tuple(inputs)
        self.backward_fn = backward_fn


class Tape:
    """Records differentiable operations and replays their backward rules in reverse order.

    A tape serves exactly one backward pass.
    """

    def __init__(self):
        self.entries: List[TapeEntry] = []
        self.used = False

    def __enter__(self) -> 'Tape':
        _stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        stack = _stack()
        if stack and stack[-1] is self:
            stack.pop()
        return False

    def __len__(self):
        return len(self.entries)

    def record(self, name: str, output: Tensor, inputs: Sequence[Tensor], backward_fn: BackwardFn):
        if self.used:
            raise ConsistencyError("tape already replayed; record the next forward pass on a fresh tape")
        output._tape = self
        self.entries.append(TapeEntry(name, output, inputs, backward_fn))

    def backward(self, loss: Tensor):
        if self.used:
            raise ConsistencyError("tape already replayed; gradients are single-use per forward pass")
        if loss.size != 1:
            raise ConsistencyError(f"backward needs a scalar loss, got shape {list(loss.shape)}")
        self.used = True
        loss._accumulate(np.ones_like(loss.data))
        for entry in reversed(self.entries):
            if entry.output.grad is None:
                continue
            grads = entry.backward_fn(entry.output.grad.data)
            for tensor, grad in zip(entry.inputs, grads):
                if grad is None or not tensor.requires_grad:
                    continue
                tensor._accumulate(grad)


def _stack() -> List[Tape]:
    if not hasattr(_tape_state, 'stack'):
        _tape_state.stack = []
    return _tape_state.stack


def active_tape() -> Optional[Tape]:
    stack = _stack()
    return stack[-1] if stack else None


def record(name: str, output: Tensor, inputs: Sequence[Tensor], backward_fn: BackwardFn) -> Tensor:
    """Attach ``output`` to the active tape when any input participates in differentiation."""
    output.requires_grad = any(t.requires_grad for t in inputs)
    tape = active_tape()
    if tape is not None and output.requires_grad:
        tape.record(name, output, inputs, backward_fn)
    return output
