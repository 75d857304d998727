from .layers import (DenseParams, MhsaParams, SeParams, dense, layernorm, dropout, mhsa, se_block,
                     attention_weights, excitation)
from .model import (ModelConfig, ModelWeights, parameter_shapes, build, count_params, patchify, unpatchify,
                    forward)
from .complexity import conv2d_flops, dense_flops, flop_breakdown, count_flops
from .weights import save_weights, load_weights, encode_weights, decode_entries

__all__ = [
    'DenseParams', 'MhsaParams', 'SeParams', 'dense', 'layernorm', 'dropout', 'mhsa', 'se_block',
    'attention_weights', 'excitation',
    'ModelConfig', 'ModelWeights', 'parameter_shapes', 'build', 'count_params', 'patchify', 'unpatchify',
    'forward',
    'conv2d_flops', 'dense_flops', 'flop_breakdown', 'count_flops',
    'save_weights', 'load_weights', 'encode_weights', 'decode_entries',
]
