import logging
import os
from typing import Dict

from errors import FormatError
from fileio import write_text_atomic
from network.model import ModelConfig, ModelWeights
from network.weights import load_weights, save_weights

logger = logging.getLogger(__name__)

META_SUFFIX = '.meta'


def meta_path(path: str) -> str:
    return path + META_SUFFIX


def save_checkpoint(path: str, weights: ModelWeights, epoch: int, val_loss: float, lr: float):
    """Weight file plus a key=value sidecar naming the epoch it was taken at."""
    save_weights(weights, path)
    write_text_atomic(meta_path(path), f"epoch={epoch}\nval_loss={val_loss!r}\nlr={lr!r}\n")
    logger.info("checkpoint epoch %d (val_loss %.6g) -> %s", epoch, val_loss, path)


def read_checkpoint_meta(path: str) -> Dict[str, float]:
    meta = {}
    with open(meta_path(path), 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            key, sep, value = line.partition('=')
            if not sep:
                raise FormatError(f"{meta_path(path)}:{lineno}: expected key=value", entry=line)
            try:
                meta[key.strip()] = int(value) if key.strip() == 'epoch' else float(value)
            except ValueError:
                raise FormatError(f"{meta_path(path)}:{lineno}: bad value for {key.strip()}", entry=key.strip())
    return meta


def load_checkpoint(path: str, config: ModelConfig) -> ModelWeights:
    weights = load_weights(path, config)
    if os.path.exists(meta_path(path)):
        meta = read_checkpoint_meta(path)
        logger.info("loaded checkpoint %s (epoch %s, val_loss %s)", path, meta.get('epoch'), meta.get('val_loss'))
    return weights


STAGING_SUFFIX = '.partial'


def staging_path(path: str) -> str:
    return path + STAGING_SUFFIX


def promote_checkpoint(staged: str, path: str):
    """Move a staged checkpoint and its sidecar onto ``path``."""
    os.replace(meta_path(staged), meta_path(path))
    os.replace(staged, path)


def discard_checkpoint(staged: str):
    for leftover in (staged, meta_path(staged)):
        if os.path.exists(leftover):
            os.remove(leftover)
