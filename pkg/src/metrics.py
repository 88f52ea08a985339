"""Metric aggregation for benchmark records.

Groups run records by their experiment coordinates and reports per-metric
means and sample standard deviations, plus a log-log growth fit used to
judge how CI counts scale with graph size.
"""

import logging
from collections import OrderedDict
from dataclasses import asdict, is_dataclass
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_GROUP_BY = ("family", "density", "p", "tester", "algo")

METRICS = (
    "shd",
    "normalized_shd",
    "true_positives",
    "false_positives",
    "false_negatives",
    "precision",
    "recall",
    "f1",
    "distinct_ci",
    "total_ci",
    "max_level",
    "wall_seconds",
)


def _as_dict(record: Any) -> Dict[str, Any]:
    return asdict(record) if is_dataclass(record) else dict(record)


def mean_std(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and sample standard deviation (n - 1 denominator; 0 for one value).

    Raises:
        ConfigurationError: If values is empty
    """
    if len(values) == 0:
        raise ConfigurationError("Cannot aggregate an empty group")
    array = np.asarray(values, dtype=float)
    std = float(array.std(ddof=1)) if len(array) > 1 else 0.0
    return float(array.mean()), std


def aggregate(records: Iterable[Any], group_by: Sequence[str] = DEFAULT_GROUP_BY,
              metrics: Sequence[str] = METRICS) -> List[Dict[str, Any]]:
    """Group records and compute mean/std of each metric.

    Records that carry an error are left out of the statistics but counted in
    the ``errors`` column of their group.

    Args:
        records: RunRecord objects or equivalent dicts
        group_by: Fields identifying a group
        metrics: Numeric fields to summarize

    Returns:
        One row per group, in first-seen order, with ``count``, ``errors`` and
        ``<metric>_mean`` / ``<metric>_std`` columns

    Raises:
        ConfigurationError: If there are no records
    """
    rows = [_as_dict(r) for r in records]
    if not rows:
        raise ConfigurationError("No records to aggregate")

    groups: "OrderedDict[Tuple, List[Dict[str, Any]]]" = OrderedDict()
    for row in rows:
        key = tuple(row.get(field) for field in group_by)
        groups.setdefault(key, []).append(row)

    table = []
    for key, members in groups.items():
        ok = [m for m in members if not m.get("error")]
        out: Dict[str, Any] = dict(zip(group_by, key))
        out["count"] = len(ok)
        out["errors"] = len(members) - len(ok)
        for metric in metrics:
            values = [m[metric] for m in ok if m.get(metric) is not None]
            if values:
                out[f"{metric}_mean"], out[f"{metric}_std"] = mean_std(values)
            else:
                out[f"{metric}_mean"] = out[f"{metric}_std"] = None
        table.append(out)

    logger.debug("Aggregated %d records into %d groups", len(rows), len(table))
    return table


def growth_exponent(sizes: Sequence[float], counts: Sequence[float]) -> float:
    """Slope of log(count) against log(size), the exponent of a power-law fit.

    Raises:
        ConfigurationError: With fewer than two points or non-positive values
    """
    if len(sizes) != len(counts) or len(sizes) < 2:
        raise ConfigurationError("Need at least two (size, count) points")
    xs, ys = np.asarray(sizes, dtype=float), np.asarray(counts, dtype=float)
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ConfigurationError("Sizes and counts must be positive for a log-log fit")
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)
