import logging
import math

logger = logging.getLogger(__name__)


class PlateauScheduler:
    """Multiply the learning rate by ``factor`` after ``patience`` epochs without a new best
    validation loss, never going below ``min_lr``. The wait counter restarts on improvement
    and on every reduction."""

    def __init__(self, lr0: float, factor: float = 0.8, patience: int = 40, min_lr: float = 1e-5):
        self.lr = lr0
        self.factor = factor
        self.patience = patience
        self.min_lr = min_lr
        self.best_loss = math.inf
        self.counter = 0

    def step(self, val_loss: float) -> float:
        if val_loss < self.best_loss:
            self.best_loss = val_loss
            self.counter = 0
            return self.lr
        self.counter += 1
        if self.counter >= self.patience:
            reduced = max(self.lr * self.factor, self.min_lr)
            if reduced < self.lr:
                logger.info("validation loss flat for %d epochs; lr %.3g -> %.3g", self.counter, self.lr, reduced)
            self.lr = reduced
            self.counter = 0
        return self.lr


class EarlyStopping:
    """Stop once the validation loss has not improved for ``patience`` epochs."""

    def __init__(self, patience: int = 50):
        self.patience = patience
        self.counter = 0
        self.best_loss = math.inf
        self.early_stop = False

    def __call__(self, val_loss: float) -> bool:
        if val_loss < self.best_loss:
            self.best_loss = val_loss
            self.counter = 0
        else:
            self.counter += 1
            logger.debug("early stopping counter %d of %d", self.counter, self.patience)
            if self.counter >= self.patience:
                logger.info("early stopping: no improvement for %d epochs", self.counter)
                self.early_stop = True
        return self.early_stop
