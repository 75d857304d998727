import math
from dataclasses import asdict, dataclass
from typing import Tuple

from errors import ConfigurationError

INPUT_MODES = ('pilots', 'interpolated')


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 64
    lr0: float = 0.01
    lr_factor: float = 0.8
    lr_patience_epochs: int = 40
    lr_min: float = 1e-5
    early_stop_patience: int = 50
    max_epochs: int = 500
    seed: int = 0
    train_ratio: float = 0.70
    val_ratio: float = 0.15
    test_ratio: float = 0.15
    input_mode: str = 'pilots'

    @property
    def ratios(self) -> Tuple[float, float, float]:
        return self.train_ratio, self.val_ratio, self.test_ratio

    def validate(self) -> 'TrainConfig':
        for name in ('batch_size', 'lr_patience_epochs', 'early_stop_patience'):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}", field=name)
        if self.max_epochs < 0:
            raise ConfigurationError(f"max_epochs must be non-negative, got {self.max_epochs}", field='max_epochs')
        if not 0 < self.lr_min <= self.lr0:
            raise ConfigurationError(f"need 0 < lr_min <= lr0, got lr_min={self.lr_min} lr0={self.lr0}",
                                     field='lr_min')
        if not 0 < self.lr_factor < 1:
            raise ConfigurationError(f"lr_factor must lie in (0, 1), got {self.lr_factor}", field='lr_factor')
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError(f"seed {self.seed} is not a u64", field='seed')
        validate_ratios(self.ratios)
        if self.input_mode not in INPUT_MODES:
            raise ConfigurationError(f"input_mode must be one of {list(INPUT_MODES)}, got {self.input_mode!r}",
                                     field='input_mode')
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> 'TrainConfig':
        return cls(**data)


def validate_ratios(ratios) -> Tuple[float, float, float]:
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3:
        raise ConfigurationError(f"expected train/val/test ratios, got {list(ratios)}", field='ratios')
    if any(r < 0 for r in ratios) or ratios[0] <= 0:
        raise ConfigurationError(f"split ratios must be non-negative with a positive train share, got {list(ratios)}",
                                 field='ratios')
    if not math.isclose(sum(ratios), 1.0, abs_tol=1e-9):
        raise ConfigurationError(f"split ratios must sum to 1, got {sum(ratios)}", field='ratios')
    return ratios
