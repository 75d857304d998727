import csv
import json
from typing import Dict, List, Optional

from evaluation.metrics import nmse_db
from fileio import atomic_write

REPORT_COLUMNS = ['method', 'snr_db', 'nmse_linear', 'nmse_db', 'sample_count']
TTI_BUDGET_MS = 0.5


class SnrRow:
    def __init__(self, snr_db: float, nmse_linear: float, sample_count: int):
        self.snr_db = snr_db
        self.nmse_linear = nmse_linear
        self.sample_count = sample_count

    @property
    def nmse_db(self) -> float:
        return nmse_db(self.nmse_linear)

    def to_dict(self) -> dict:
        return {
            'snr_db': self.snr_db,
            'nmse_linear': self.nmse_linear,
            'nmse_db': self.nmse_db,
            'sample_count': self.sample_count,
        }


class MethodResult:
    """Per-SNR rows, per-profile NMSE and the pooled NMSE of one estimator on one split."""

    def __init__(self, method: str, rows: List[SnrRow], nmse_linear: float, sample_count: int,
                 profiles: Optional[Dict[str, float]] = None):
        self.method = method
        self.rows = rows
        self.nmse_linear = nmse_linear
        self.sample_count = sample_count
        self.profiles = profiles or {}

    @property
    def nmse_db(self) -> float:
        return nmse_db(self.nmse_linear)

    def row(self, snr_db: float) -> Optional[SnrRow]:
        for r in self.rows:
            if r.snr_db == snr_db:
                return r
        return None

    def to_dict(self) -> dict:
        return {
            'method': self.method,
            'nmse_linear': self.nmse_linear,
            'nmse_db': self.nmse_db,
            'sample_count': self.sample_count,
            'rows': [r.to_dict() for r in self.rows],
            'profiles': {name: {'nmse_linear': v, 'nmse_db': nmse_db(v)} for name, v in self.profiles.items()},
        }


class LatencyStats:
    def __init__(self, mean_ms: float, std_ms: float, min_ms: float, max_ms: float, runs: int):
        self.mean_ms = mean_ms
        self.std_ms = std_ms
        self.min_ms = min_ms
        self.max_ms = max_ms
        self.runs = runs

    @property
    def budget_fraction(self) -> float:
        """Share of the per-TTI channel-estimation budget used by the mean latency."""
        return self.mean_ms / TTI_BUDGET_MS

    def to_dict(self) -> dict:
        return {
            'mean_ms': self.mean_ms,
            'std_ms': self.std_ms,
            'min_ms': self.min_ms,
            'max_ms': self.max_ms,
            'runs': self.runs,
            'budget_ms': TTI_BUDGET_MS,
            'budget_fraction': self.budget_fraction,
        }


class EvalReport:
    def __init__(self, results: Optional[List[MethodResult]] = None, param_count: Optional[int] = None,
                 flop_count: Optional[int] = None, latency: Optional[LatencyStats] = None):
        self.results: List[MethodResult] = list(results or [])
        self.param_count = param_count
        self.flop_count = flop_count
        self.latency = latency

    def add(self, result: MethodResult):
        self.results.append(result)

    def methods(self) -> List[str]:
        return [r.method for r in self.results]

    def result(self, method: str) -> Optional[MethodResult]:
        for r in self.results:
            if r.method == method:
                return r
        return None

    @property
    def reference(self) -> Optional[str]:
        if not self.results:
            return None
        return 'helena' if self.result('helena') else self.results[0].method

    def relative_change(self, method: str) -> Optional[float]:
        """100·(ref_db − method_db)/ref_db; positive when ``method`` is worse than the reference."""
        ref = self.result(self.reference) if self.reference else None
        other = self.result(method)
        if ref is None or other is None or ref.nmse_db == 0.0:
            return None
        return 100.0 * (ref.nmse_db - other.nmse_db) / ref.nmse_db

    def to_dict(self) -> dict:
        return {
            'reference': self.reference,
            'param_count': self.param_count,
            'flop_count': self.flop_count,
            'latency': self.latency.to_dict() if self.latency else None,
            'methods': [dict(r.to_dict(), relative_change_pct=self.relative_change(r.method)) for r in self.results],
        }

    def export_csv(self, filepath: str):
        with atomic_write(filepath, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(REPORT_COLUMNS)
            for result in self.results:
                for r in result.rows:
                    writer.writerow([result.method, repr(r.snr_db), repr(r.nmse_linear), repr(r.nmse_db),
                                     r.sample_count])

    def export_json(self, filepath: str):
        with atomic_write(filepath, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write('\n')
