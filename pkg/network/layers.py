import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from errors import ConfigurationError, DimensionError
from numeric import ops
from numeric.tensor import Tensor, record

LAYERNORM_EPS = 1e-5


@dataclass
class DenseParams:
    weight: Tensor
    bias: Tensor

    def __post_init__(self):
        if self.weight.ndim != 2 or self.bias.shape != (self.weight.shape[1],):
            raise DimensionError(f"dense bias {list(self.bias.shape)} does not match weight "
                                 f"{list(self.weight.shape)}")

    @property
    def in_features(self) -> int:
        return self.weight.shape[0]

    @property
    def out_features(self) -> int:
        return self.weight.shape[1]


@dataclass
class MhsaParams:
    wq: List[Tensor]
    wk: List[Tensor]
    wv: List[Tensor]
    out: DenseParams
    gamma: Tensor
    beta: Tensor

    @property
    def heads(self) -> int:
        return len(self.wq)

    @property
    def head_dim(self) -> int:
        return self.wq[0].shape[1]

    def validate(self, d: int):
        h = self.heads
        if h == 0 or not (len(self.wk) == len(self.wv) == h):
            raise ConfigurationError(f"mhsa needs the same positive number of query/key/value projections, "
                                     f"got {len(self.wq)}/{len(self.wk)}/{len(self.wv)}", field='h')
        if self.head_dim * h != d:
            raise ConfigurationError(f"mhsa head_dim {self.head_dim} x heads {h} != model dim {d}", field='h')
        for w in self.wq + self.wk + self.wv:
            if w.shape != (d, self.head_dim):
                raise DimensionError(f"mhsa projection {list(w.shape)} should be {[d, self.head_dim]}")
        if self.out.weight.shape != (h * self.head_dim, d):
            raise DimensionError(f"mhsa output projection {list(self.out.weight.shape)} should be "
                                 f"{[h * self.head_dim, d]}")


@dataclass
class SeParams:
    w1: Tensor
    b1: Tensor
    w2: Tensor
    b2: Tensor
    reduction: int

    def validate(self, d: int):
        if self.reduction <= 0 or d % self.reduction != 0:
            raise ConfigurationError(f"SE reduction {self.reduction} must divide model dim {d}", field='r')
        bottleneck = d // self.reduction
        if self.w1.shape != (d, bottleneck) or self.w2.shape != (bottleneck, d):
            raise DimensionError(f"SE weights {list(self.w1.shape)}/{list(self.w2.shape)} do not match "
                                 f"a {d} -> {bottleneck} -> {d} bottleneck")


def dense(x: Tensor, p: DenseParams) -> Tensor:
    if x.shape[-1] != p.in_features:
        raise DimensionError(f"dense: input {list(x.shape)} does not end in {p.in_features}")
    if x.ndim == 1:
        row = ops.reshape(x, (1, p.in_features))
        return ops.reshape(ops.add(ops.matmul(row, p.weight), p.bias), (p.out_features,))
    return ops.add(ops.matmul(x, p.weight), p.bias)


def layernorm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = LAYERNORM_EPS) -> Tensor:
    d = x.shape[-1]
    if d < 2:
        raise DimensionError(f"layernorm needs at least 2 features, got {list(x.shape)}")
    if gamma.shape != (d,) or beta.shape != (d,):
        raise DimensionError(f"layernorm gain/offset {list(gamma.shape)}/{list(beta.shape)} do not match {d}")
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    inv_std = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True) + eps)
    xhat = centered * inv_std
    out = Tensor(xhat * gamma.data + beta.data, dtype=x.dtype)

    def backward(g):
        gx = None
        if x.requires_grad:
            dxhat = g * gamma.data
            gx = inv_std / d * (d * dxhat - dxhat.sum(axis=-1, keepdims=True)
                                - xhat * (dxhat * xhat).sum(axis=-1, keepdims=True))
        ggamma = (g * xhat).reshape(-1, d).sum(axis=0) if gamma.requires_grad else None
        gbeta = g.reshape(-1, d).sum(axis=0) if beta.requires_grad else None
        return gx, ggamma, gbeta

    return record('layernorm', out, (x, gamma, beta), backward)


def dropout(x: Tensor, rate: float, training: bool, rng: Optional[np.random.Generator] = None) -> Tensor:
    """Inverted dropout; the inference path returns ``x`` itself."""
    if not 0.0 <= rate < 1.0:
        raise ConfigurationError(f"dropout rate must lie in [0, 1), got {rate}", field='dropout_rate')
    if not training or rate == 0.0:
        return x
    if rng is None:
        raise ConfigurationError("dropout in training mode needs an explicit generator", field='rng')
    keep = (rng.random(x.shape) >= rate).astype(x.dtype)
    keep *= 1.0 / (1.0 - rate)
    out = Tensor(x.data * keep, dtype=x.dtype)

    def backward(g):
        return (g * keep,)

    return record('dropout', out, (x,), backward)


def attention_weights(q: Tensor, k: Tensor) -> Tensor:
    scores = ops.scale(ops.matmul(q, ops.transpose(k)), 1.0 / math.sqrt(q.shape[-1]))
    return ops.softmax(scores)


def mhsa(z: Tensor, p: MhsaParams) -> Tensor:
    """Post-norm multi-head self-attention: LayerNorm(Z + Concat(head_1..head_h) W^O)."""
    p.validate(z.shape[-1])
    heads = []
    for wq, wk, wv in zip(p.wq, p.wk, p.wv):
        q = ops.matmul(z, wq)
        k = ops.matmul(z, wk)
        v = ops.matmul(z, wv)
        heads.append(ops.matmul(attention_weights(q, k), v))
    attended = dense(ops.concat(heads, axis=-1), p.out)
    return layernorm(ops.add(z, attended), p.gamma, p.beta)


def excitation(z_att: Tensor, p: SeParams) -> Tensor:
    p.validate(z_att.shape[-1])
    squeezed = ops.mean(z_att, axis=-2, keepdims=True)
    hidden = ops.relu(dense(squeezed, DenseParams(p.w1, p.b1)))
    return ops.sigmoid(dense(hidden, DenseParams(p.w2, p.b2)))


def se_block(z_att: Tensor, p: SeParams) -> Tensor:
    e = excitation(z_att, p)
    return ops.mul(z_att, ops.broadcast_to(e, z_att.shape))
