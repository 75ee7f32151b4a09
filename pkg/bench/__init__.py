"""
Benchmark experiments, result records and reports.
"""

from .records import BenchRecord, read_records, write_records
from .experiments import Bench, run_experiment_a, run_experiment_b, run_experiment_c
from .report import ReportSummary, report, summarize

__all__ = [
    'BenchRecord',
    'read_records',
    'write_records',
    'Bench',
    'run_experiment_a',
    'run_experiment_b',
    'run_experiment_c',
    'ReportSummary',
    'report',
    'summarize',
]
