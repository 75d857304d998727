import logging
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from chansim.channel import generate_channel, interpolate_planes, ls_at_pilots, simulate_rx
from chansim.grid import (DELAY_SPREAD_RANGE_S, DOPPLER_RANGE_HZ, N_SUBCARRIERS, N_SYMBOLS, PilotPattern,
                          SampleSpec, SNR_VALUES_DB)
from chansim.profiles import PROFILES, profile_name
from errors import ConfigurationError, FormatError
from fileio import atomic_write

logger = logging.getLogger(__name__)

DATASET_MAGIC = b'HCED1'
HEADER_FORMAT = '<IIIB'
HEADER_SIZE = len(DATASET_MAGIC) + struct.calcsize(HEADER_FORMAT)
PLANES = 2

INPUT_MODES = ('pilots', 'interpolated')


def record_dtype(n_subcarriers: int, n_symbols: int) -> np.dtype:
    grid = (n_subcarriers, n_symbols, PLANES)
    return np.dtype([
        ('profile_id', 'u1'),
        ('delay_spread', '<f4'),
        ('doppler', '<f4'),
        ('snr_db', '<f4'),
        ('seed', '<u8'),
        ('input', '<f4', grid),
        ('label', '<f4', grid),
    ])


def encode_header(count: int, n_subcarriers: int, n_symbols: int) -> bytes:
    return DATASET_MAGIC + struct.pack(HEADER_FORMAT, count, n_subcarriers, n_symbols, PLANES)


def decode_header(blob: bytes) -> Tuple[int, int, int]:
    if len(blob) < HEADER_SIZE:
        raise FormatError("dataset file truncated inside the header", entry='header')
    if blob[:len(DATASET_MAGIC)] != DATASET_MAGIC:
        raise FormatError("not a channel-estimation dataset (bad magic bytes)", entry='magic')
    count, n_s, n_d, planes = struct.unpack(HEADER_FORMAT, blob[len(DATASET_MAGIC):HEADER_SIZE])
    if planes != PLANES:
        raise FormatError(f"dataset stores {planes} planes per grid, expected {PLANES}", entry='planes')
    return count, n_s, n_d


class Dataset:
    """Ordered samples of (pilot LS input, true channel label, metadata), backed by a record array."""

    def __init__(self, records: np.ndarray, path: Optional[str] = None):
        self.records = records
        self.path = path

    @classmethod
    def load(cls, path: str) -> 'Dataset':
        with open(path, 'rb') as f:
            header = f.read(HEADER_SIZE)
        count, n_s, n_d = decode_header(header)
        dtype = record_dtype(n_s, n_d)
        expected = HEADER_SIZE + count * dtype.itemsize
        actual = os.path.getsize(path)
        if actual != expected:
            raise FormatError(f"dataset {path} holds {actual} bytes, header implies {expected}", entry='records')
        if count == 0:
            return cls(np.zeros(0, dtype=dtype), path)
        return cls(np.memmap(path, dtype=dtype, mode='r', offset=HEADER_SIZE, shape=(count,)), path)

    @classmethod
    def from_arrays(cls, inputs: np.ndarray, labels: np.ndarray, snr_db: Sequence[float],
                    profile_ids: Optional[Sequence[int]] = None, delay_spread: Optional[Sequence[float]] = None,
                    doppler: Optional[Sequence[float]] = None, seeds: Optional[Sequence[int]] = None) -> 'Dataset':
        n, n_s, n_d, _ = inputs.shape
        records = np.zeros(n, dtype=record_dtype(n_s, n_d))
        records['input'] = inputs
        records['label'] = labels
        records['snr_db'] = snr_db
        records['profile_id'] = profile_ids if profile_ids is not None else 0
        records['delay_spread'] = delay_spread if delay_spread is not None else 0
        records['doppler'] = doppler if doppler is not None else 0
        records['seed'] = seeds if seeds is not None else np.arange(n)
        return cls(records)

    def __len__(self):
        return len(self.records)

    @property
    def grid_shape(self) -> Tuple[int, int, int]:
        return tuple(self.records.dtype['input'].shape)

    @property
    def shape(self) -> List[int]:
        return [len(self)] + list(self.grid_shape)

    @property
    def snr_db(self) -> np.ndarray:
        return np.asarray(self.records['snr_db'], dtype=np.float64)

    @property
    def profile_ids(self) -> np.ndarray:
        return np.asarray(self.records['profile_id'])

    def profiles(self) -> List[str]:
        return [profile_name(int(p)) for p in self.profile_ids]

    def inputs(self, indices: Sequence[int], mode: str = 'pilots',
               pattern: Optional[PilotPattern] = None) -> np.ndarray:
        if mode not in INPUT_MODES:
            raise ConfigurationError(f"input_mode must be one of {list(INPUT_MODES)}, got {mode!r}",
                                     field='input_mode')
        planes = np.asarray(self.records['input'][np.asarray(indices, dtype=np.int64)])
        if mode == 'interpolated':
            planes = interpolate_planes(planes, pattern or PilotPattern())
        return planes

    def labels(self, indices: Sequence[int]) -> np.ndarray:
        return np.asarray(self.records['label'][np.asarray(indices, dtype=np.int64)])

    def save(self, path: str):
        with atomic_write(path, 'wb') as f:
            n_s, n_d, _ = self.grid_shape
            f.write(encode_header(len(self), n_s, n_d))
            f.write(np.ascontiguousarray(self.records).tobytes())


def snr_schedule(count: int, snr_counts: Optional[Dict[float, int]] = None) -> List[float]:
    """SNR tag of every sample, bucket after bucket."""
    if snr_counts is not None:
        unknown = [s for s in snr_counts if float(s) not in SNR_VALUES_DB]
        if unknown:
            raise ConfigurationError(f"snr_counts uses SNR values {unknown} outside {list(SNR_VALUES_DB)}",
                                     field='snr_counts')
        if any(c < 0 for c in snr_counts.values()):
            raise ConfigurationError("snr_counts must be non-negative", field='snr_counts')
        schedule = [float(s) for s in sorted(snr_counts) for _ in range(snr_counts[s])]
        if not schedule:
            raise ConfigurationError("snr_counts requests no samples", field='samples')
        return schedule
    if count <= 0:
        raise ConfigurationError(f"samples must be positive, got {count}", field='samples')
    if count % len(SNR_VALUES_DB) != 0:
        raise ConfigurationError(f"samples {count} is not divisible by the {len(SNR_VALUES_DB)} SNR values",
                                 field='samples')
    per_bucket = count // len(SNR_VALUES_DB)
    return [snr for snr in SNR_VALUES_DB for _ in range(per_bucket)]


def sample_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1, np.uint64)[0])


def draw_spec(master_seed: int, index: int, snr_db: float) -> SampleSpec:
    seed = sample_seed(master_seed, index)
    rng = np.random.default_rng(seed)
    profile = PROFILES[int(rng.integers(0, len(PROFILES)))]
    delay_spread = float(rng.uniform(*DELAY_SPREAD_RANGE_S))
    doppler = float(rng.uniform(*DOPPLER_RANGE_HZ))
    return SampleSpec(profile, delay_spread, doppler, snr_db, seed).validate()


def synthesize_sample(spec: SampleSpec, pattern: PilotPattern, n_subcarriers: int = N_SUBCARRIERS,
                      n_symbols: int = N_SYMBOLS) -> Tuple[np.ndarray, np.ndarray]:
    """(pilot LS planes, true channel planes) for one drawn sample."""
    h = generate_channel(spec, n_subcarriers, n_symbols)
    y, x = simulate_rx(h, spec, pattern)
    return ls_at_pilots(y, x, pattern).planes, h.planes


def generate_dataset(count: int, out_path: str, master_seed: int,
                     snr_counts: Optional[Dict[float, int]] = None,
                     pattern: Optional[PilotPattern] = None,
                     n_subcarriers: int = N_SUBCARRIERS, n_symbols: int = N_SYMBOLS,
                     threads: int = 1, progress: bool = False) -> Dataset:
    """Synthesize and write a dataset; the file depends only on its arguments, not on ``threads``."""
    pattern = (pattern or PilotPattern()).validate(n_subcarriers, n_symbols)
    schedule = snr_schedule(count, snr_counts)
    if threads < 1:
        raise ConfigurationError(f"threads must be positive, got {threads}", field='threads')
    dtype = record_dtype(n_subcarriers, n_symbols)

    def make(index: int) -> bytes:
        spec = draw_spec(master_seed, index, schedule[index])
        h_lr, h = synthesize_sample(spec, pattern, n_subcarriers, n_symbols)
        record = np.zeros(1, dtype=dtype)
        record['profile_id'] = PROFILES.index(spec.profile)
        record['delay_spread'] = spec.delay_spread
        record['doppler'] = spec.doppler
        record['snr_db'] = spec.snr_db
        record['seed'] = spec.seed
        record['input'] = h_lr
        record['label'] = h
        return record.tobytes()

    with atomic_write(out_path, 'wb') as f:
        f.write(encode_header(len(schedule), n_subcarriers, n_symbols))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for blob in tqdm(pool.map(make, range(len(schedule))), total=len(schedule),
                             desc='generate', disable=not progress):
                f.write(blob)
    logger.info("wrote %d samples (%d per SNR bucket at most) to %s", len(schedule),
                max(schedule.count(s) for s in set(schedule)), out_path)
    return Dataset.load(out_path)
