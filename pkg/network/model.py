"""HELENA: shallow CNN, patch embedding, multi-head self-attention, squeeze-and-excitation,
linear reconstruction and a global residual around the whole network."""
import logging
import math
from collections import OrderedDict
from dataclasses import asdict, dataclass
from typing import List, Mapping, Optional, Tuple, Union

import numpy as np

from errors import ConfigurationError, DimensionError
from network.layers import DenseParams, MhsaParams, SeParams, dense, dropout, mhsa, se_block
from numeric import ops
from numeric.tensor import Tensor, get_default_dtype

logger = logging.getLogger(__name__)

Shape = Tuple[int, ...]


@dataclass(frozen=True)
class ModelConfig:
    n_subcarriers: int = 612
    n_symbols: int = 14
    kernel1: Tuple[int, int] = (12, 2)
    kernel2: Tuple[int, int] = (6, 7)
    c1: int = 8
    c: int = 8
    patch: int = 12
    d: int = 64
    heads: int = 4
    reduction: int = 4
    dropout_rate: float = 0.1
    use_se: bool = True

    @property
    def n_tokens(self) -> int:
        return self.n_subcarriers // self.patch

    @property
    def token_dim(self) -> int:
        return self.patch * self.n_symbols * self.c

    @property
    def patch_out(self) -> int:
        return self.patch * self.n_symbols * 2

    @property
    def head_dim(self) -> int:
        return self.d // self.heads

    @property
    def bottleneck(self) -> int:
        return self.d // self.reduction

    @property
    def grid_shape(self) -> Shape:
        return (self.n_subcarriers, self.n_symbols, 2)

    def validate(self) -> 'ModelConfig':
        if len(self.kernel1) != 2 or len(self.kernel2) != 2:
            raise ConfigurationError("kernels are (frequency, time) pairs", field='kernel1')
        positives = {
            'n_subcarriers': self.n_subcarriers, 'n_symbols': self.n_symbols, 'c1': self.c1, 'c': self.c,
            'patch': self.patch, 'd': self.d, 'heads': self.heads, 'reduction': self.reduction,
            'kernel1': min(self.kernel1), 'kernel2': min(self.kernel2),
        }
        for name, value in positives.items():
            if value <= 0:
                raise ConfigurationError(f"{name} must be positive, got {value}", field=name)
        if self.n_subcarriers % self.patch != 0:
            raise ConfigurationError(f"patch {self.patch} does not divide n_subcarriers {self.n_subcarriers}",
                                     field='patch')
        if self.d % self.heads != 0:
            raise ConfigurationError(f"heads {self.heads} does not divide d {self.d}", field='heads')
        if self.d % self.reduction != 0:
            raise ConfigurationError(f"reduction {self.reduction} does not divide d {self.d}", field='reduction')
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigurationError(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}",
                                     field='dropout_rate')
        return self

    def to_dict(self) -> dict:
        data = asdict(self)
        data['kernel1'] = list(self.kernel1)
        data['kernel2'] = list(self.kernel2)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'ModelConfig':
        data = dict(data)
        for key in ('kernel1', 'kernel2'):
            if key in data:
                data[key] = tuple(int(v) for v in data[key])
        return cls(**data)


def parameter_shapes(config: ModelConfig) -> 'OrderedDict[str, Shape]':
    """Name -> shape table of every learnable tensor, in serialization order."""
    config.validate()
    f1, t1 = config.kernel1
    f2, t2 = config.kernel2
    d, dk = config.d, config.head_dim
    shapes: 'OrderedDict[str, Shape]' = OrderedDict()
    shapes['conv1.kernel'] = (f1, t1, 2, config.c1)
    shapes['conv1.bias'] = (config.c1,)
    shapes['conv2.kernel'] = (f2, t2, config.c1, config.c)
    shapes['conv2.bias'] = (config.c,)
    shapes['embed.weight'] = (config.token_dim, d)
    shapes['embed.bias'] = (d,)
    for j in range(config.heads):
        for proj in ('wq', 'wk', 'wv'):
            shapes[f'mhsa.head{j}.{proj}'] = (d, dk)
    shapes['mhsa.out.weight'] = (config.heads * dk, d)
    shapes['mhsa.out.bias'] = (d,)
    shapes['mhsa.norm.gamma'] = (d,)
    shapes['mhsa.norm.beta'] = (d,)
    if config.use_se:
        shapes['se.w1'] = (d, config.bottleneck)
        shapes['se.b1'] = (config.bottleneck,)
        shapes['se.w2'] = (config.bottleneck, d)
        shapes['se.b2'] = (d,)
    shapes['recon.weight'] = (d, config.patch_out)
    shapes['recon.bias'] = (config.patch_out,)
    return shapes


def _fans(shape: Shape) -> Tuple[int, int]:
    if len(shape) == 4:
        receptive = shape[0] * shape[1]
        return receptive * shape[2], receptive * shape[3]
    return shape[0], shape[1]


class ModelWeights:
    def __init__(self, config: ModelConfig, tensors: Mapping[str, Tensor]):
        self.config = config
        self.tensors: 'OrderedDict[str, Tensor]' = OrderedDict(tensors)

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self.tensors

    def __len__(self):
        return len(self.tensors)

    def names(self) -> List[str]:
        return list(self.tensors)

    def items(self):
        return self.tensors.items()

    def count_params(self) -> int:
        return count_params(self)

    def replace(self, tensors: Mapping[str, Tensor]) -> 'ModelWeights':
        merged = OrderedDict(self.tensors)
        merged.update(tensors)
        return ModelWeights(self.config, merged)

    def trainable(self) -> 'ModelWeights':
        """Fresh leaf tensors sharing data, marked for differentiation."""
        return ModelWeights(self.config, OrderedDict(
            (name, Tensor(t.data, requires_grad=True, dtype=t.dtype)) for name, t in self.tensors.items()))

    def frozen(self) -> 'ModelWeights':
        return ModelWeights(self.config, OrderedDict((name, t.detach()) for name, t in self.tensors.items()))

    def astype(self, dtype) -> 'ModelWeights':
        return ModelWeights(self.config, OrderedDict(
            (name, Tensor(t.data.astype(dtype), dtype=dtype)) for name, t in self.tensors.items()))

    def dense(self, prefix: str) -> DenseParams:
        return DenseParams(self.tensors[f'{prefix}.weight'], self.tensors[f'{prefix}.bias'])

    def mhsa_params(self) -> MhsaParams:
        h = self.config.heads
        return MhsaParams(
            wq=[self.tensors[f'mhsa.head{j}.wq'] for j in range(h)],
            wk=[self.tensors[f'mhsa.head{j}.wk'] for j in range(h)],
            wv=[self.tensors[f'mhsa.head{j}.wv'] for j in range(h)],
            out=self.dense('mhsa.out'),
            gamma=self.tensors['mhsa.norm.gamma'],
            beta=self.tensors['mhsa.norm.beta'],
        )

    def se_params(self) -> SeParams:
        return SeParams(self.tensors['se.w1'], self.tensors['se.b1'],
                        self.tensors['se.w2'], self.tensors['se.b2'], self.config.reduction)

    @classmethod
    def zeros(cls, config: ModelConfig) -> 'ModelWeights':
        dtype = get_default_dtype()
        return cls(config, OrderedDict(
            (name, Tensor(np.zeros(shape, dtype=dtype))) for name, shape in parameter_shapes(config).items()))


def build(config: ModelConfig, rng: np.random.Generator) -> ModelWeights:
    """Glorot-uniform weights, zero biases, unit layernorm gain and zero offset."""
    shapes = parameter_shapes(config)
    dtype = get_default_dtype()
    tensors = OrderedDict()
    for name, shape in shapes.items():
        if name.endswith('gamma'):
            data = np.ones(shape)
        elif len(shape) == 1:
            data = np.zeros(shape)
        else:
            fan_in, fan_out = _fans(shape)
            bound = math.sqrt(6.0 / (fan_in + fan_out))
            data = rng.uniform(-bound, bound, size=shape)
        tensors[name] = Tensor(data.astype(dtype), dtype=dtype)
    weights = ModelWeights(config, tensors)
    logger.debug("built HELENA weights: %d tensors, %d parameters", len(weights), count_params(weights))
    return weights


def count_params(weights: Union[ModelWeights, Mapping[str, Tensor]]) -> int:
    items = weights.items() if weights is not None else []
    return int(sum(int(t.size) for _, t in items))


def patchify(features: Tensor, patch: int) -> Tensor:
    """[..., N_S, N_D, C] -> [..., N_S/p, p*N_D*C], flattened in (frequency, symbol, channel) order."""
    if features.ndim < 3:
        raise DimensionError(f"patchify expects [..., N_S, N_D, C], got {list(features.shape)}")
    n_s, n_d, ch = features.shape[-3:]
    if patch <= 0 or n_s % patch != 0:
        raise ConfigurationError(f"patch {patch} does not divide {n_s} subcarriers", field='patch')
    lead = features.shape[:-3]
    return ops.reshape(features, lead + (n_s // patch, patch * n_d * ch))


def unpatchify(patches: Tensor, config: ModelConfig) -> Tensor:
    """Inverse of ``patchify`` for the two real/imaginary planes."""
    expected = (config.n_tokens, config.patch_out)
    if patches.ndim < 2 or patches.shape[-2:] != expected:
        raise DimensionError(f"unpatchify expects [..., {expected[0]}, {expected[1]}], got {list(patches.shape)}")
    return ops.reshape(patches, patches.shape[:-2] + config.grid_shape)


def forward(weights: ModelWeights, h_lr: Tensor, training: bool = False,
            rng: Optional[np.random.Generator] = None,
            stages: Optional[List[Tuple[str, Shape]]] = None) -> Tensor:
    """Ĥ = H_LR + HELENA(H_LR) for one grid [N_S, N_D, 2] or a batch [B, N_S, N_D, 2].

    When ``stages`` is given, the (stage, shape) chain is appended to it.
    """
    config = weights.config
    if h_lr.ndim not in (3, 4) or h_lr.shape[-3:] != config.grid_shape:
        raise DimensionError(f"forward expects [..., {', '.join(map(str, config.grid_shape))}], "
                             f"got {list(h_lr.shape)}")

    def trace(name: str, t: Tensor) -> Tensor:
        if stages is not None:
            stages.append((name, tuple(t.shape)))
        return t

    w = weights.tensors
    x = trace('input', h_lr)
    x = trace('conv1', ops.relu(ops.conv2d_same(x, w['conv1.kernel'], w['conv1.bias'])))
    x = trace('conv2', ops.relu(ops.conv2d_same(x, w['conv2.kernel'], w['conv2.bias'])))
    x = dropout(x, config.dropout_rate, training, rng)
    x = trace('patchify', patchify(x, config.patch))
    x = trace('embed', dense(x, weights.dense('embed')))
    x = trace('mhsa', mhsa(x, weights.mhsa_params()))
    if config.use_se:
        x = trace('se', se_block(x, weights.se_params()))
    x = trace('recon', dense(x, weights.dense('recon')))
    x = trace('unpatchify', unpatchify(x, config))
    return trace('output', ops.add(h_lr, x))
