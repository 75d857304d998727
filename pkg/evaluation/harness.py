import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence

import numpy as np

from chansim.profiles import profile_name
from errors import ConfigurationError
from evaluation.metrics import ratio, squared_errors
from evaluation.report import MethodResult, SnrRow

logger = logging.getLogger(__name__)


def evaluate(estimator: Callable[[np.ndarray], np.ndarray], ds, indices: Sequence[int],
             batch_size: int = 64, threads: int = 1, method: Optional[str] = None) -> MethodResult:
    """NMSE of ``estimator`` on the samples ``indices``, per SNR bucket, per profile and pooled.

    Batches are fixed by ``batch_size`` and reassembled in order, so the result does not
    depend on ``threads``.
    """
    indices = [int(i) for i in indices]
    if not indices:
        raise ConfigurationError("evaluation split is empty", field='split')
    if threads < 1:
        raise ConfigurationError(f"threads must be positive, got {threads}", field='threads')
    method = method or getattr(estimator, 'name', 'estimator')
    chunks = [indices[start:start + batch_size] for start in range(0, len(indices), batch_size)]

    def run(chunk):
        return squared_errors(estimator(ds.inputs(chunk)), ds.labels(chunk))

    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(run, chunks))
    errors = np.concatenate([p[0] for p in parts])
    energies = np.concatenate([p[1] for p in parts])

    snr = ds.snr_db[indices]
    rows = []
    for bucket in np.unique(snr):
        members = snr == bucket
        rows.append(SnrRow(float(bucket), ratio(errors[members], energies[members]), int(members.sum())))
    pids = ds.profile_ids[indices]
    profiles = {profile_name(int(p)): ratio(errors[pids == p], energies[pids == p]) for p in np.unique(pids)}

    result = MethodResult(method, rows, ratio(errors, energies), len(indices), profiles)
    logger.info("%s: NMSE %.3f dB over %d samples", method, result.nmse_db, len(indices))
    return result
