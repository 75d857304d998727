from typing import Tuple

import numpy as np

from chansim.grid import (ChannelGrid, N_SUBCARRIERS, N_SYMBOLS, PilotPattern, SampleSpec,
                          SUBCARRIER_SPACING_HZ, SYMBOL_DURATION_S)
from chansim.profiles import tap_table
from errors import ConfigurationError, DimensionError, NumericError

N_SINUSOIDS = 32

CHANNEL_STREAM = 0
PILOT_STREAM = 1
NOISE_STREAM = 2


def stream(seed: int, which: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), which])


def tap_gains(powers: np.ndarray, doppler: float, n_symbols: int, rng: np.random.Generator,
              n_sinusoids: int = N_SINUSOIDS, symbol_duration: float = SYMBOL_DURATION_S) -> np.ndarray:
    """Sum-of-sinusoids Rayleigh fading per tap, sampled once per OFDM symbol.

    Arrival angles and phases are uniform, so E[g(k) g*(k+m)] = P J0(2 pi f_D m T_sym).
    Returns complex gains of shape [taps, n_symbols].
    """
    n_taps = len(powers)
    angles = rng.uniform(0.0, 2 * np.pi, size=(n_taps, n_sinusoids))
    phases = rng.uniform(0.0, 2 * np.pi, size=(n_taps, n_sinusoids))
    t = np.arange(n_symbols) * symbol_duration
    doppler_shifts = doppler * np.cos(angles)
    arg = 2 * np.pi * doppler_shifts[:, :, None] * t[None, None, :] + phases[:, :, None]
    gains = np.exp(1j * arg).sum(axis=1)
    return gains * np.sqrt(powers / n_sinusoids)[:, None]


def generate_channel(spec: SampleSpec, n_subcarriers: int = N_SUBCARRIERS,
                     n_symbols: int = N_SYMBOLS) -> ChannelGrid:
    """Frequency response H[i, k] = sum_t g_t(k) exp(-j 2 pi f_i tau_t) of one TDL realization."""
    spec.check_physical()
    delays, powers = tap_table(spec.profile, spec.delay_spread)
    gains = tap_gains(powers, spec.doppler, n_symbols, stream(spec.seed, CHANNEL_STREAM))
    freqs = np.arange(n_subcarriers) * SUBCARRIER_SPACING_HZ
    steering = np.exp(-2j * np.pi * np.outer(freqs, delays))
    return ChannelGrid.from_complex(steering @ gains)


def qpsk_pilots(rng: np.random.Generator, count: int) -> np.ndarray:
    return np.exp(1j * np.pi / 4 * (2 * rng.integers(0, 4, size=count) + 1))


def simulate_rx(h: ChannelGrid, spec: SampleSpec, pattern: PilotPattern) -> Tuple[np.ndarray, np.ndarray]:
    """Y = H X + Z on pilot resource elements; both grids are zero off the pilot pattern."""
    n_s, n_d = h.shape
    mask = pattern.mask(n_s, n_d)
    n_pilots = int(mask.sum())
    x = np.zeros((n_s, n_d), dtype=np.complex128)
    x[mask] = qpsk_pilots(stream(spec.seed, PILOT_STREAM), n_pilots)
    y = np.zeros_like(x)
    y[mask] = h.values[mask] * x[mask]
    variance = spec.noise_variance
    if variance > 0:
        noise_rng = stream(spec.seed, NOISE_STREAM)
        noise = noise_rng.standard_normal(n_pilots) + 1j * noise_rng.standard_normal(n_pilots)
        y[mask] += np.sqrt(variance / 2) * noise
    return y, x


def ls_at_pilots(y: np.ndarray, x: np.ndarray, pattern: PilotPattern) -> ChannelGrid:
    """Per-pilot least squares Y/X, exactly zero elsewhere."""
    if y.shape != x.shape or y.ndim != 2:
        raise DimensionError(f"received and pilot grids differ: {list(y.shape)} vs {list(x.shape)}")
    mask = pattern.mask(*y.shape)
    if np.any(x[mask] == 0):
        raise NumericError("zero pilot symbol; least squares division is undefined")
    h_ls = np.zeros_like(y, dtype=np.complex128)
    h_ls[mask] = y[mask] / x[mask]
    return ChannelGrid.from_complex(h_ls)


def _interp_along_last(values: np.ndarray, xs: np.ndarray, xq: np.ndarray) -> np.ndarray:
    """Piecewise-linear interpolation with constant extension beyond the outermost samples."""
    if len(xs) == 1:
        return np.repeat(values[..., :1], len(xq), axis=-1)
    right = np.clip(np.searchsorted(xs, xq, side='right'), 1, len(xs) - 1)
    left = right - 1
    t = np.clip((xq - xs[left]) / (xs[right] - xs[left]), 0.0, 1.0)
    return values[..., left] * (1 - t) + values[..., right] * t


def linear_interpolate(h_lr: ChannelGrid, pattern: PilotPattern) -> ChannelGrid:
    """LS+LI: interpolate along frequency inside each pilot symbol, then along time across them."""
    n_s, n_d = h_lr.shape
    pattern.validate(n_s, n_d)
    sub = pattern.subcarriers(n_s)
    sym = pattern.symbols()
    if len(sub) < 2:
        raise ConfigurationError("linear interpolation needs at least two pilot subcarriers", field='pilot_offsets')
    values = h_lr.values
    pilots = values[np.ix_(sub, sym)]
    along_freq = _interp_along_last(pilots.T, sub.astype(np.float64), np.arange(n_s, dtype=np.float64)).T
    dense = _interp_along_last(along_freq, sym.astype(np.float64), np.arange(n_d, dtype=np.float64))
    return ChannelGrid.from_complex(dense)


def interpolate_planes(planes: np.ndarray, pattern: PilotPattern) -> np.ndarray:
    """``linear_interpolate`` for a stack of [..., N_S, N_D, 2] real-plane grids."""
    flat = planes.reshape((-1,) + planes.shape[-3:])
    out = np.stack([linear_interpolate(ChannelGrid(g), pattern).planes for g in flat])
    return out.reshape(planes.shape).astype(planes.dtype)
