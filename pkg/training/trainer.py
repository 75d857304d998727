import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from chansim.grid import PilotPattern
from errors import ConfigurationError, TrainingError
from network.model import ModelWeights, forward
from numeric.tensor import Tape, Tensor
from training.checkpoint import discard_checkpoint, promote_checkpoint, save_checkpoint, staging_path
from training.config import TrainConfig
from training.history import EpochRecord, TrainingHistory
from training.losses import mse_loss
from training.optim import AdamState, adam_step
from training.schedule import EarlyStopping, PlateauScheduler
from training.splits import split_dataset

logger = logging.getLogger(__name__)

SHUFFLE_STREAM = 4
DROPOUT_STREAM = 5


def batches(indices: Sequence[int], batch_size: int):
    for start in range(0, len(indices), batch_size):
        yield indices[start:start + batch_size]


def _tensors(ds, batch, cfg: TrainConfig, pattern: Optional[PilotPattern]) -> Tuple[Tensor, Tensor]:
    return Tensor(ds.inputs(batch, cfg.input_mode, pattern)), Tensor(ds.labels(batch))


def evaluate_loss(weights: ModelWeights, ds, indices: Sequence[int], cfg: TrainConfig,
                  pattern: Optional[PilotPattern] = None) -> float:
    """Sample-weighted MSE in inference mode."""
    frozen = weights.frozen()
    total = 0.0
    for batch in batches(list(indices), cfg.batch_size):
        x, y = _tensors(ds, batch, cfg, pattern)
        total += mse_loss(forward(frozen, x, training=False), y).item() * len(batch)
    return total / len(indices)


def train_step(weights: ModelWeights, x: Tensor, y: Tensor, state: AdamState, lr: float,
               rng: np.random.Generator) -> Tuple[ModelWeights, AdamState, float]:
    params = weights.trainable()
    with Tape() as tape:
        loss = mse_loss(forward(params, x, training=True, rng=rng), y)
    value = loss.item()
    if not math.isfinite(value):
        return weights, state, value
    tape.backward(loss)
    grads = {name: t.grad for name, t in params.items()}
    weights, state = adam_step(weights, grads, state, lr)
    return weights, state, value


def fit(weights: ModelWeights, ds, cfg: TrainConfig,
        train_idx: Optional[Sequence[int]] = None, val_idx: Optional[Sequence[int]] = None,
        checkpoint_path: Optional[str] = None, pattern: Optional[PilotPattern] = None,
        progress: bool = False) -> Tuple[ModelWeights, TrainingHistory]:
    """Adam on MSE with a plateau learning-rate schedule and early stopping.

    Returns the weights of the epoch with the lowest validation loss (earliest on ties)
    and the per-epoch history. Without explicit index lists the dataset is split with
    ``split_dataset`` using the config ratios and seed.

    Improving checkpoints are staged beside ``checkpoint_path`` and moved onto it only
    when training ends without diverging.
    """
    cfg.validate()
    if len(ds) == 0:
        raise ConfigurationError("cannot train on an empty dataset", field='dataset')
    if train_idx is None or val_idx is None:
        train_idx, val_idx, _ = split_dataset(ds, cfg.ratios, cfg.seed)
    train_idx, val_idx = list(train_idx), list(val_idx)
    if not train_idx:
        raise ConfigurationError("training split is empty", field='train_ratio')
    if not val_idx:
        raise ConfigurationError("validation split is empty", field='val_ratio')

    history = TrainingHistory()
    if cfg.max_epochs == 0:
        return weights, history

    shuffle_rng = np.random.default_rng([cfg.seed, SHUFFLE_STREAM])
    dropout_rng = np.random.default_rng([cfg.seed, DROPOUT_STREAM])
    scheduler = PlateauScheduler(cfg.lr0, cfg.lr_factor, cfg.lr_patience_epochs, cfg.lr_min)
    stopper = EarlyStopping(cfg.early_stop_patience)
    state = AdamState.zeros(weights)
    current = weights.frozen()
    best, best_val = current, math.inf
    lr = cfg.lr0
    staged = staging_path(checkpoint_path) if checkpoint_path else None

    logger.info("training on %d samples, validating on %d, up to %d epochs", len(train_idx), len(val_idx),
                cfg.max_epochs)
    try:
        for epoch in tqdm(range(1, cfg.max_epochs + 1), desc='train', disable=not progress):
            order = [int(i) for i in shuffle_rng.permutation(train_idx)]
            total = 0.0
            for batch in batches(order, cfg.batch_size):
                x, y = _tensors(ds, batch, cfg, pattern)
                current, state, value = train_step(current, x, y, state, lr, dropout_rng)
                if not math.isfinite(value):
                    raise TrainingError(f"training loss became {value} in epoch {epoch}", history=history)
                total += value * len(batch)
            train_loss = total / len(order)
            val_loss = evaluate_loss(current, ds, val_idx, cfg, pattern)
            if not math.isfinite(val_loss):
                raise TrainingError(f"validation loss became {val_loss} in epoch {epoch}", history=history)

            history.add(EpochRecord(epoch, train_loss, val_loss, lr))
            logger.info("epoch %d train_loss %.6g val_loss %.6g lr %.3g", epoch, train_loss, val_loss, lr)
            if val_loss < best_val:
                best, best_val = current, val_loss
                if staged:
                    save_checkpoint(staged, best, epoch, val_loss, lr)
            lr = scheduler.step(val_loss)
            if stopper(val_loss):
                break
    except TrainingError:
        if staged:
            discard_checkpoint(staged)
        raise
    if staged:
        promote_checkpoint(staged, checkpoint_path)
    return best, history
