from .profiles import PROFILES, TDL_DELAYS, TDL_POWERS_DB, profile_id, profile_name, tap_table
from .grid import (ChannelGrid, PilotPattern, SampleSpec, N_SUBCARRIERS, N_SYMBOLS, SNR_VALUES_DB,
                   SUBCARRIER_SPACING_HZ, SLOT_DURATION_S, SYMBOL_DURATION_S)
from .channel import (tap_gains, generate_channel, qpsk_pilots, simulate_rx, ls_at_pilots, linear_interpolate,
                      interpolate_planes)
from .dataset import Dataset, generate_dataset, snr_schedule, sample_seed, draw_spec, synthesize_sample

__all__ = [
    'PROFILES', 'TDL_DELAYS', 'TDL_POWERS_DB', 'profile_id', 'profile_name', 'tap_table',
    'ChannelGrid', 'PilotPattern', 'SampleSpec', 'N_SUBCARRIERS', 'N_SYMBOLS', 'SNR_VALUES_DB',
    'SUBCARRIER_SPACING_HZ', 'SLOT_DURATION_S', 'SYMBOL_DURATION_S',
    'tap_gains', 'generate_channel', 'qpsk_pilots', 'simulate_rx', 'ls_at_pilots', 'linear_interpolate',
    'interpolate_planes',
    'Dataset', 'generate_dataset', 'snr_schedule', 'sample_seed', 'draw_spec', 'synthesize_sample',
]
