from .config import TrainConfig, validate_ratios
from .splits import split_dataset
from .losses import mse_loss
from .optim import AdamState, adam_step
from .schedule import PlateauScheduler, EarlyStopping
from .history import EpochRecord, TrainingHistory
from .checkpoint import save_checkpoint, load_checkpoint, read_checkpoint_meta
from .trainer import fit, evaluate_loss, train_step

__all__ = [
    'TrainConfig', 'validate_ratios', 'split_dataset', 'mse_loss', 'AdamState', 'adam_step',
    'PlateauScheduler', 'EarlyStopping', 'EpochRecord', 'TrainingHistory',
    'save_checkpoint', 'load_checkpoint', 'read_checkpoint_meta', 'fit', 'evaluate_loss', 'train_step',
]
