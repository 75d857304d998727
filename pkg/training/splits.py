from typing import List, Sequence, Tuple

import numpy as np

from errors import ConfigurationError
from training.config import validate_ratios

SPLIT_STREAM = 3


def split_dataset(ds, ratios: Sequence[float] = (0.70, 0.15, 0.15),
                  seed: int = 0) -> Tuple[List[int], List[int], List[int]]:
    """Seeded, SNR-stratified partition into (train, val, test) index lists.

    Every sample gets a fractional rank inside its SNR bucket; sorting on that rank
    interleaves the buckets, so each cut takes each bucket in proportion while the
    global sizes follow the ratios exactly.
    """
    ratios = validate_ratios(ratios)
    n = len(ds)
    if n == 0:
        raise ConfigurationError("cannot split an empty dataset", field='dataset')
    rng = np.random.default_rng([int(seed), SPLIT_STREAM])
    snr = np.asarray(ds.snr_db)
    rank = np.empty(n, dtype=np.float64)
    for bucket in np.unique(snr):
        members = np.flatnonzero(snr == bucket)
        shuffled = rng.permutation(members)
        rank[shuffled] = (np.arange(len(members)) + 0.5) / len(members)
    tie_break = rng.random(n)
    order = np.lexsort((tie_break, rank))

    n_train = int(round(n * ratios[0]))
    n_val = min(int(round(n * ratios[1])), n - n_train)
    train = sorted(int(i) for i in order[:n_train])
    val = sorted(int(i) for i in order[n_train:n_train + n_val])
    test = sorted(int(i) for i in order[n_train + n_val:])
    return train, val, test
