"""Analytic inference cost of HELENA.

Conventions: a multiply-accumulate is 2 FLOPs, bias additions, activations, softmax,
scaling, residual additions and layernorm cost 1 FLOP per output element, dropout is free
at inference.
"""
from typing import List, Tuple

from network.model import ModelConfig


def conv2d_flops(h: int, w: int, kh: int, kw: int, cin: int, cout: int) -> int:
    return h * w * kh * kw * cin * cout * 2


def dense_flops(tokens: int, fan_in: int, fan_out: int, bias: bool = True) -> int:
    return tokens * fan_in * fan_out * 2 + (tokens * fan_out if bias else 0)


def flop_breakdown(config: ModelConfig) -> List[Tuple[str, int]]:
    config.validate()
    n_s, n_d = config.n_subcarriers, config.n_symbols
    cells = n_s * n_d
    n, d, h, dk = config.n_tokens, config.d, config.heads, config.head_dim
    f1, t1 = config.kernel1
    f2, t2 = config.kernel2
    rows = [
        ('conv1', conv2d_flops(n_s, n_d, f1, t1, 2, config.c1) + cells * config.c1),
        ('relu1', cells * config.c1),
        ('conv2', conv2d_flops(n_s, n_d, f2, t2, config.c1, config.c) + cells * config.c),
        ('relu2', cells * config.c),
        ('embed', dense_flops(n, config.token_dim, d)),
        ('mhsa.qkv', 3 * h * dense_flops(n, d, dk, bias=False)),
        ('mhsa.scores', h * n * n * dk * 2 + h * n * n),
        ('mhsa.softmax', h * n * n),
        ('mhsa.context', h * n * n * dk * 2),
        ('mhsa.out', dense_flops(n, h * dk, d)),
        ('mhsa.residual_norm', n * d + n * d),
    ]
    if config.use_se:
        r = config.bottleneck
        rows += [
            ('se.squeeze', n * d),
            ('se.fc1', dense_flops(1, d, r) + r),
            ('se.fc2', dense_flops(1, r, d) + d),
            ('se.scale', n * d),
        ]
    rows += [
        ('recon', dense_flops(n, d, config.patch_out)),
        ('residual', n_s * n_d * 2),
    ]
    return rows


def count_flops(config: ModelConfig) -> int:
    return sum(flops for _, flops in flop_breakdown(config))
