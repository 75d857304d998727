"""Desk-scale learning check: minutes to hours on one thread, deselected by default."""
import numpy as np
import pytest

from chansim.dataset import generate_dataset
from evaluation import EvalReport, HelenaEstimator, LsEstimator, LsLiEstimator, evaluate
from network.model import ModelConfig, build
from training import TrainConfig, fit, split_dataset

pytestmark = pytest.mark.slow


@pytest.fixture(scope='module')
def desk_dataset(tmp_path_factory):
    path = tmp_path_factory.mktemp('desk') / 'desk.bin'
    return generate_dataset(2200, str(path), master_seed=2024)


def train_variant(ds, use_se, cfg):
    config = ModelConfig(use_se=use_se)
    train_idx, val_idx, _ = split_dataset(ds, cfg.ratios, cfg.seed)
    best, _ = fit(build(config, np.random.default_rng([cfg.seed, 6])), ds, cfg, train_idx, val_idx)
    return best


def test_helena_beats_interpolation(desk_dataset):
    cfg = TrainConfig(max_epochs=150)
    _, _, test_idx = split_dataset(desk_dataset, cfg.ratios, cfg.seed)
    report = EvalReport()
    report.add(evaluate(HelenaEstimator(train_variant(desk_dataset, True, cfg)), desk_dataset, test_idx))
    mhsa_only = evaluate(HelenaEstimator(train_variant(desk_dataset, False, cfg)), desk_dataset, test_idx,
                         method='helena-mhsa')
    report.add(evaluate(LsEstimator(), desk_dataset, test_idx))
    report.add(evaluate(LsLiEstimator(), desk_dataset, test_idx))

    helena, ls, lsli = (report.result(m) for m in ('helena', 'ls', 'lsli'))
    gain_over_ls = np.mean([ls.row(r.snr_db).nmse_db - r.nmse_db for r in helena.rows])
    assert gain_over_ls >= 10.0
    for row in helena.rows:
        assert row.nmse_db < lsli.row(row.snr_db).nmse_db
        if row.snr_db >= 10.0:
            assert lsli.row(row.snr_db).nmse_db - row.nmse_db >= 3.0
    assert helena.nmse_db <= mhsa_only.nmse_db
