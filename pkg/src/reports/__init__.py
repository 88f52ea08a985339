"""Report generation modules for benchmark results.

This package provides the CSV output used by the benchmark sweep.
"""

from reports.csv_formatter import CSVFormatter

__all__ = ["CSVFormatter"]
