"""Run configuration: a flat key=value file merged with command-line overrides."""
import logging
from collections import OrderedDict
from typing import Dict, Iterable, Optional, Tuple

from chansim.grid import PilotPattern
from errors import ConfigurationError
from network.model import ModelConfig
from numeric.tensor import SUPPORTED_DTYPES
from training.config import TrainConfig

logger = logging.getLogger(__name__)

DEFAULTS = OrderedDict([
    # model
    ('n_subcarriers', 612),
    ('n_symbols', 14),
    ('kernel1', '12,2'),
    ('kernel2', '6,7'),
    ('c1', 8),
    ('c', 8),
    ('patch', 12),
    ('d', 64),
    ('heads', 4),
    ('reduction', 4),
    ('dropout_rate', 0.1),
    ('use_se', True),
    # training
    ('batch_size', 64),
    ('lr0', 0.01),
    ('lr_factor', 0.8),
    ('lr_patience_epochs', 40),
    ('lr_min', 1e-5),
    ('early_stop_patience', 50),
    ('max_epochs', 500),
    ('train_ratio', 0.70),
    ('val_ratio', 0.15),
    ('test_ratio', 0.15),
    ('input_mode', 'pilots'),
    # dataset
    ('samples', 2200),
    ('pilot_symbols', '2'),
    ('pilot_offsets', '0,1,6,7'),
    # paths
    ('dataset', 'dataset.bin'),
    ('checkpoint', 'helena.weights'),
    ('out', ''),
    # run
    ('seed', 0),
    ('threads', 1),
    ('precision', 'float32'),
    ('method', 'all'),
    ('runs', 100),
    ('warmup', 10),
])

TRUE_WORDS = ('1', 'true', 'yes', 'on')
FALSE_WORDS = ('0', 'false', 'no', 'off')


class RunConfig:
    def __init__(self, values: Optional[Dict[str, object]] = None):
        self.values: Dict[str, object] = OrderedDict(DEFAULTS)
        self.sources: Dict[str, str] = {key: 'default' for key in DEFAULTS}
        for key, value in (values or {}).items():
            self.set(key, value)

    @classmethod
    def load(cls, path: Optional[str] = None, overrides: Optional[Dict[str, object]] = None) -> 'RunConfig':
        config = cls()
        if path:
            config.update(parse_config_file(path), source=path)
        if overrides:
            config.update({k: v for k, v in overrides.items() if v is not None}, source='command line')
        return config

    def update(self, values: Dict[str, object], source: str = 'override'):
        for key, value in values.items():
            self.set(key, value, source)

    def set(self, key: str, value, source: str = 'override'):
        if key not in DEFAULTS:
            raise ConfigurationError(f"unknown config key {key!r}", field=key)
        self.values[key] = value
        self.sources[key] = source

    def get(self, key: str, default=None):
        if key not in DEFAULTS:
            raise ConfigurationError(f"unknown config key {key!r}", field=key)
        value = self.values.get(key, default)
        return default if value is None else value

    def get_int(self, key: str) -> int:
        value = self.get(key)
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigurationError(f"{key} must be an integer, got {value!r}", field=key)

    def get_float(self, key: str) -> float:
        value = self.get(key)
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigurationError(f"{key} must be a number, got {value!r}", field=key)

    def get_bool(self, key: str) -> bool:
        value = self.get(key)
        if isinstance(value, bool):
            return value
        word = str(value).strip().lower()
        if word in TRUE_WORDS:
            return True
        if word in FALSE_WORDS:
            return False
        raise ConfigurationError(f"{key} must be a boolean, got {value!r}", field=key)

    def get_ints(self, key: str) -> Tuple[int, ...]:
        value = self.get(key)
        items = value if isinstance(value, (list, tuple)) else str(value).split(',')
        try:
            return tuple(int(str(v).strip()) for v in items if str(v).strip())
        except ValueError:
            raise ConfigurationError(f"{key} must be a comma-separated list of integers, got {value!r}", field=key)

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            n_subcarriers=self.get_int('n_subcarriers'), n_symbols=self.get_int('n_symbols'),
            kernel1=self.get_ints('kernel1'), kernel2=self.get_ints('kernel2'),
            c1=self.get_int('c1'), c=self.get_int('c'), patch=self.get_int('patch'), d=self.get_int('d'),
            heads=self.get_int('heads'), reduction=self.get_int('reduction'),
            dropout_rate=self.get_float('dropout_rate'), use_se=self.get_bool('use_se'),
        ).validate()

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            batch_size=self.get_int('batch_size'), lr0=self.get_float('lr0'), lr_factor=self.get_float('lr_factor'),
            lr_patience_epochs=self.get_int('lr_patience_epochs'), lr_min=self.get_float('lr_min'),
            early_stop_patience=self.get_int('early_stop_patience'), max_epochs=self.get_int('max_epochs'),
            seed=self.get_int('seed'), train_ratio=self.get_float('train_ratio'),
            val_ratio=self.get_float('val_ratio'), test_ratio=self.get_float('test_ratio'),
            input_mode=str(self.get('input_mode')),
        ).validate()

    def pilot_pattern(self) -> PilotPattern:
        pattern = PilotPattern(symbol_indices=self.get_ints('pilot_symbols'), rb_offsets=self.get_ints('pilot_offsets'))
        return pattern.validate(self.get_int('n_subcarriers'), self.get_int('n_symbols'))

    def validate(self) -> 'RunConfig':
        """Resolve every typed view so nothing fails after work has started."""
        self.model_config()
        self.train_config()
        self.pilot_pattern()
        for key in ('threads', 'runs'):
            if self.get_int(key) < 1:
                raise ConfigurationError(f"{key} must be at least 1, got {self.get(key)}", field=key)
        if self.get_int('warmup') < 0:
            raise ConfigurationError(f"warmup must be non-negative, got {self.get('warmup')}", field='warmup')
        if self.get('precision') not in SUPPORTED_DTYPES:
            raise ConfigurationError(f"precision must be one of {sorted(SUPPORTED_DTYPES)}, "
                                     f"got {self.get('precision')!r}", field='precision')
        return self

    def items(self) -> Iterable[Tuple[str, object]]:
        return self.values.items()

    def to_text(self) -> str:
        lines = []
        for key, value in self.values.items():
            if isinstance(value, (list, tuple)):
                value = ','.join(str(v) for v in value)
            lines.append(f"{key}={value}")
        return '\n'.join(lines) + '\n'


def parse_config_file(path: str) -> Dict[str, str]:
    values = OrderedDict()
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition('=')
            if not sep or not key.strip():
                raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}", field=key.strip())
            key = key.strip()
            if key not in DEFAULTS:
                raise ConfigurationError(f"{path}:{lineno}: unknown config key {key!r}", field=key)
            values[key] = value.strip()
    logger.debug("read %d keys from %s", len(values), path)
    return values
