import csv
import math
from typing import List, Optional

from fileio import atomic_write

HISTORY_COLUMNS = ['epoch', 'train_loss', 'val_loss', 'lr']


class EpochRecord:
    def __init__(self, epoch: int, train_loss: float, val_loss: float, lr: float):
        self.epoch = epoch
        self.train_loss = train_loss
        self.val_loss = val_loss
        self.lr = lr

    def to_dict(self) -> dict:
        return {
            'epoch': self.epoch,
            'train_loss': self.train_loss,
            'val_loss': self.val_loss,
            'lr': self.lr,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'EpochRecord':
        return cls(int(data['epoch']), float(data['train_loss']), float(data['val_loss']), float(data['lr']))

    def __repr__(self):
        return (f"EpochRecord(epoch={self.epoch}, train_loss={self.train_loss:.6g}, "
                f"val_loss={self.val_loss:.6g}, lr={self.lr:.3g})")


class TrainingHistory:
    def __init__(self, records: Optional[List[EpochRecord]] = None):
        self.records: List[EpochRecord] = list(records or [])

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, index: int) -> EpochRecord:
        return self.records[index]

    def add(self, record: EpochRecord):
        self.records.append(record)

    def train_losses(self) -> List[float]:
        return [r.train_loss for r in self.records]

    def val_losses(self) -> List[float]:
        return [r.val_loss for r in self.records]

    def learning_rates(self) -> List[float]:
        return [r.lr for r in self.records]

    def best_val_curve(self) -> List[float]:
        """Running minimum of the validation loss."""
        curve, best = [], math.inf
        for r in self.records:
            best = min(best, r.val_loss)
            curve.append(best)
        return curve

    def best_epoch(self) -> Optional[EpochRecord]:
        best = None
        for r in self.records:
            if best is None or r.val_loss < best.val_loss:
                best = r
        return best

    def to_dict(self) -> dict:
        return {'history': [r.to_dict() for r in self.records]}

    @classmethod
    def from_dict(cls, data: dict) -> 'TrainingHistory':
        return cls([EpochRecord.from_dict(r) for r in data.get('history', [])])

    def export_csv(self, filepath: str):
        with atomic_write(filepath, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(HISTORY_COLUMNS)
            for r in self.records:
                writer.writerow([r.epoch, repr(r.train_loss), repr(r.val_loss), repr(r.lr)])

    @classmethod
    def import_csv(cls, filepath: str) -> 'TrainingHistory':
        with open(filepath, 'r', encoding='utf-8', newline='') as f:
            return cls([EpochRecord.from_dict(row) for row in csv.DictReader(f)])
