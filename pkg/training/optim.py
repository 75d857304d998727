from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from errors import ConsistencyError, DimensionError
from network.model import ModelWeights
from numeric.tensor import Tensor

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8

GradLike = Union[Tensor, np.ndarray, None]


@dataclass
class AdamState:
    """First/second moment estimates per parameter name, plus the step counter."""
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0
    beta1: float = BETA1
    beta2: float = BETA2
    eps: float = EPSILON

    @classmethod
    def zeros(cls, weights: ModelWeights, **hyper) -> 'AdamState':
        return cls(m={name: np.zeros_like(t.data) for name, t in weights.items()},
                   v={name: np.zeros_like(t.data) for name, t in weights.items()}, **hyper)


def _grad_array(name: str, grad: GradLike, like: Tensor) -> np.ndarray:
    if grad is None:
        raise ConsistencyError(f"no gradient for parameter {name}")
    data = grad.data if isinstance(grad, Tensor) else np.asarray(grad)
    if data.shape != like.shape:
        raise DimensionError(f"gradient for {name} has shape {list(data.shape)}, parameter is {list(like.shape)}")
    return data


def adam_step(weights: ModelWeights, grads: Mapping[str, GradLike], state: AdamState,
              lr: float) -> Tuple[ModelWeights, AdamState]:
    """One bias-corrected Adam update; returns new weights and a new state, inputs are left as they were."""
    step = state.step + 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1 ** step
    correction2 = 1.0 - b2 ** step
    updated, m_next, v_next = {}, {}, {}
    for name, param in weights.items():
        g = _grad_array(name, grads.get(name), param)
        m_prev: Optional[np.ndarray] = state.m.get(name)
        v_prev: Optional[np.ndarray] = state.v.get(name)
        if m_prev is None or v_prev is None:
            m_prev = np.zeros_like(param.data)
            v_prev = np.zeros_like(param.data)
        m = b1 * m_prev + (1.0 - b1) * g
        v = b2 * v_prev + (1.0 - b2) * (g * g)
        delta = lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
        updated[name] = Tensor((param.data - delta).astype(param.dtype), dtype=param.dtype)
        m_next[name] = m.astype(param.dtype)
        v_next[name] = v.astype(param.dtype)
    next_state = AdamState(m_next, v_next, step, state.beta1, state.beta2, state.eps)
    return weights.replace(updated).frozen(), next_state
