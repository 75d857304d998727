from .metrics import NMSE_FLOOR_DB, nmse, nmse_db, squared_errors
from .estimators import Estimator, HelenaEstimator, LsEstimator, LsLiEstimator, METHODS, resolve_methods
from .report import SnrRow, MethodResult, LatencyStats, EvalReport, TTI_BUDGET_MS
from .harness import evaluate
from .bench import benchmark_inference

__all__ = [
    'NMSE_FLOOR_DB', 'nmse', 'nmse_db', 'squared_errors',
    'Estimator', 'HelenaEstimator', 'LsEstimator', 'LsLiEstimator', 'METHODS', 'resolve_methods',
    'SnrRow', 'MethodResult', 'LatencyStats', 'EvalReport', 'TTI_BUDGET_MS',
    'evaluate', 'benchmark_inference',
]
