import logging
import struct
from collections import OrderedDict
from typing import List, Tuple

import numpy as np

from errors import FormatError
from fileio import atomic_write
from network.model import ModelConfig, ModelWeights, parameter_shapes
from numeric.tensor import Tensor, get_default_dtype

logger = logging.getLogger(__name__)

WEIGHTS_MAGIC = b'HELW1'


def encode_weights(weights: ModelWeights) -> bytes:
    chunks = [WEIGHTS_MAGIC, struct.pack('<I', len(weights))]
    for name, tensor in weights.items():
        encoded = name.encode('utf-8')
        chunks.append(struct.pack('<H', len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack('<B', tensor.ndim))
        chunks.append(struct.pack(f'<{tensor.ndim}I', *tensor.shape))
        chunks.append(np.ascontiguousarray(tensor.data, dtype='<f4').tobytes())
    return b''.join(chunks)


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.blob):
            raise FormatError(f"weight file truncated while reading {what}", entry=what)
        chunk = self.blob[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def decode_entries(blob: bytes) -> List[Tuple[str, np.ndarray]]:
    reader = _Reader(blob)
    if reader.take(len(WEIGHTS_MAGIC), 'magic') != WEIGHTS_MAGIC:
        raise FormatError("not a HELENA weight file (bad magic bytes)", entry='magic')
    (count,) = reader.unpack('<I', 'entry count')
    entries = []
    for index in range(count):
        what = f'entry {index}'
        (name_len,) = reader.unpack('<H', what)
        try:
            name = reader.take(name_len, what).decode('utf-8')
        except UnicodeDecodeError:
            raise FormatError(f"entry {index} has an undecodable name", entry=what)
        (rank,) = reader.unpack('<B', name)
        shape = reader.unpack(f'<{rank}I', name) if rank else ()
        n_values = int(np.prod(shape)) if shape else 1
        values = np.frombuffer(reader.take(4 * n_values, name), dtype='<f4').reshape(shape)
        entries.append((name, values))
    if reader.pos != len(blob):
        raise FormatError(f"{len(blob) - reader.pos} trailing bytes after {count} entries", entry='trailer')
    return entries


def save_weights(weights: ModelWeights, path: str):
    with atomic_write(path, 'wb') as f:
        f.write(encode_weights(weights))
    logger.info("saved %d weight tensors to %s", len(weights), path)


def load_weights(path: str, config: ModelConfig) -> ModelWeights:
    """Read a weight file and check it against the name/shape table of ``config``."""
    with open(path, 'rb') as f:
        blob = f.read()
    entries = decode_entries(blob)
    expected = list(parameter_shapes(config).items())
    for index in range(max(len(entries), len(expected))):
        if index >= len(entries):
            name = expected[index][0]
            raise FormatError(f"weight file lacks {name!r} required by the model config", entry=name)
        if index >= len(expected):
            name = entries[index][0]
            raise FormatError(f"weight file has unexpected entry {name!r}", entry=name)
        (name, values), (want_name, want_shape) = entries[index], expected[index]
        if name != want_name:
            raise FormatError(f"entry {index} is {name!r}, model config expects {want_name!r}", entry=want_name)
        if values.shape != want_shape:
            raise FormatError(f"{name!r} has shape {list(values.shape)}, model config expects {list(want_shape)}",
                              entry=name)
    dtype = get_default_dtype()
    tensors = OrderedDict((name, Tensor(values.astype(dtype), dtype=dtype)) for name, values in entries)
    return ModelWeights(config, tensors)
