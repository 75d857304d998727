import logging
import time
from typing import Optional

import numpy as np

from errors import ConfigurationError
from evaluation.report import LatencyStats
from network.model import ModelWeights, forward
from numeric.tensor import Tensor

logger = logging.getLogger(__name__)

WARMUP_RUNS = 10


def benchmark_inference(weights: ModelWeights, runs: int = 100, warmup: int = WARMUP_RUNS,
                        sample: Optional[np.ndarray] = None, seed: int = 0) -> LatencyStats:
    """Wall-clock latency of single-sample inference, measured after ``warmup`` untimed runs."""
    if runs < 1:
        raise ConfigurationError(f"runs must be at least 1, got {runs}", field='runs')
    if warmup < 0:
        raise ConfigurationError(f"warmup must be non-negative, got {warmup}", field='warmup')
    frozen = weights.frozen()
    if sample is None:
        sample = np.random.default_rng(seed).standard_normal(frozen.config.grid_shape)
    x = Tensor(sample)
    for _ in range(warmup):
        forward(frozen, x)
    timings = np.empty(runs, dtype=np.float64)
    for i in range(runs):
        start = time.perf_counter()
        forward(frozen, x)
        timings[i] = (time.perf_counter() - start) * 1e3
    stats = LatencyStats(float(timings.mean()), float(timings.std()), float(timings.min()), float(timings.max()),
                         runs)
    logger.info("inference latency %.3f ms mean over %d runs (%.1f%% of the TTI budget)", stats.mean_ms, runs,
                100.0 * stats.budget_fraction)
    return stats
