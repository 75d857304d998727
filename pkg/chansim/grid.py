import math
from dataclasses import asdict, dataclass
from typing import Tuple

import numpy as np

from chansim.profiles import profile_id
from errors import ConfigurationError, DimensionError

RB_SUBCARRIERS = 12
N_RB = 51
N_SUBCARRIERS = N_RB * RB_SUBCARRIERS
N_SYMBOLS = 14
SUBCARRIER_SPACING_HZ = 30e3
SLOT_DURATION_S = 0.5e-3
SYMBOL_DURATION_S = SLOT_DURATION_S / N_SYMBOLS
SNR_VALUES_DB = tuple(float(v) for v in range(0, 21, 2))

DELAY_SPREAD_RANGE_S = (1e-9, 300e-9)
DOPPLER_RANGE_HZ = (5.0, 400.0)


class ChannelGrid:
    """Complex channel over an N_S x N_D time-frequency grid, held as real/imaginary planes."""

    def __init__(self, planes: np.ndarray):
        planes = np.asarray(planes, dtype=np.float64)
        if planes.ndim != 3 or planes.shape[-1] != 2:
            raise DimensionError(f"channel grid planes must be [N_S, N_D, 2], got {list(planes.shape)}")
        self.planes = planes

    @classmethod
    def from_complex(cls, values: np.ndarray) -> 'ChannelGrid':
        values = np.asarray(values)
        return cls(np.stack([values.real, values.imag], axis=-1))

    @classmethod
    def zeros(cls, n_subcarriers: int = N_SUBCARRIERS, n_symbols: int = N_SYMBOLS) -> 'ChannelGrid':
        return cls(np.zeros((n_subcarriers, n_symbols, 2)))

    @property
    def values(self) -> np.ndarray:
        return self.planes[..., 0] + 1j * self.planes[..., 1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.planes.shape[0], self.planes.shape[1]

    def power(self) -> float:
        return float((self.planes ** 2).sum(axis=-1).mean())


@dataclass(frozen=True)
class PilotPattern:
    """DM-RS positions: pilot OFDM symbols, and subcarrier offsets repeated in every resource block."""
    symbol_indices: Tuple[int, ...] = (2,)
    rb_offsets: Tuple[int, ...] = (0, 1, 6, 7)
    rb_size: int = RB_SUBCARRIERS

    def validate(self, n_subcarriers: int, n_symbols: int) -> 'PilotPattern':
        if not self.symbol_indices:
            raise ConfigurationError("pilot pattern has no pilot symbols", field='pilot_symbols')
        if not self.rb_offsets:
            raise ConfigurationError("pilot pattern has no pilot subcarriers per resource block",
                                     field='pilot_offsets')
        if any(not 0 <= k < n_symbols for k in self.symbol_indices):
            raise ConfigurationError(f"pilot symbols {list(self.symbol_indices)} outside 0..{n_symbols - 1}",
                                     field='pilot_symbols')
        if any(not 0 <= o < self.rb_size for o in self.rb_offsets):
            raise ConfigurationError(f"pilot offsets {list(self.rb_offsets)} outside 0..{self.rb_size - 1}",
                                     field='pilot_offsets')
        if n_subcarriers % self.rb_size != 0:
            raise ConfigurationError(f"{n_subcarriers} subcarriers is not a whole number of "
                                     f"{self.rb_size}-subcarrier resource blocks", field='n_subcarriers')
        return self

    def subcarriers(self, n_subcarriers: int) -> np.ndarray:
        starts = np.arange(0, n_subcarriers, self.rb_size)
        return np.sort((starts[:, None] + np.asarray(self.rb_offsets)[None, :]).reshape(-1))

    def symbols(self) -> np.ndarray:
        return np.asarray(sorted(set(self.symbol_indices)))

    def mask(self, n_subcarriers: int, n_symbols: int) -> np.ndarray:
        self.validate(n_subcarriers, n_symbols)
        mask = np.zeros((n_subcarriers, n_symbols), dtype=bool)
        mask[np.ix_(self.subcarriers(n_subcarriers), self.symbols())] = True
        return mask

    def pilots_per_rb(self) -> int:
        return len(set(self.rb_offsets)) * len(set(self.symbol_indices))

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


@dataclass(frozen=True)
class SampleSpec:
    profile: str
    delay_spread: float
    doppler: float
    snr_db: float
    seed: int

    def validate(self) -> 'SampleSpec':
        """Check the dataset parameter ranges."""
        profile_id(self.profile)
        lo, hi = DELAY_SPREAD_RANGE_S
        if not lo <= self.delay_spread <= hi:
            raise ConfigurationError(f"delay_spread {self.delay_spread} s outside [{lo}, {hi}]", field='delay_spread')
        lo, hi = DOPPLER_RANGE_HZ
        if not lo <= self.doppler <= hi:
            raise ConfigurationError(f"doppler {self.doppler} Hz outside [{lo}, {hi}]", field='doppler')
        if float(self.snr_db) not in SNR_VALUES_DB:
            raise ConfigurationError(f"snr_db {self.snr_db} is not one of {list(SNR_VALUES_DB)}", field='snr_db')
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError(f"seed {self.seed} is not a u64", field='seed')
        return self

    def check_physical(self):
        profile_id(self.profile)
        if self.delay_spread < 0:
            raise ConfigurationError(f"delay_spread must be non-negative, got {self.delay_spread}",
                                     field='delay_spread')
        if self.doppler < 0:
            raise ConfigurationError(f"doppler must be non-negative, got {self.doppler}", field='doppler')
        if math.isnan(self.snr_db):
            raise ConfigurationError("snr_db is NaN", field='snr_db')

    @property
    def noise_variance(self) -> float:
        return 0.0 if math.isinf(self.snr_db) and self.snr_db > 0 else 10.0 ** (-self.snr_db / 10.0)


