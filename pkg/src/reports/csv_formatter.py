"""CSV output formatter for benchmark results.

Exports run records and aggregate tables for analysis in spreadsheet or
plotting tools.
"""

import csv
import logging
from dataclasses import asdict, fields, is_dataclass
from pathlib import Path
from typing import Any, Dict, List, Sequence

logger = logging.getLogger(__name__)


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


class CSVFormatter:
    """Formats benchmark results as CSV files."""

    @staticmethod
    def write_records(records: Sequence[Any], output_path: Path,
                      exclude: Sequence[str] = ()):
        """Write one row per run record.

        Columns are the record's dataclass fields in declaration order. A None
        sample size is written as ``inf`` (oracle runs).

        Args:
            records: RunRecord objects
            output_path: Path to output CSV file
            exclude: Columns to leave out
        """
        if not records:
            logger.warning("No records to write to CSV")
            headers: List[str] = []
        else:
            headers = [f.name for f in fields(records[0]) if f.name not in exclude]

        logger.info(f"Writing results to CSV: {output_path}")

        with open(output_path, 'w', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=headers, extrasaction="ignore")
            writer.writeheader()

            for record in records:
                row = asdict(record) if is_dataclass(record) else dict(record)
                if "n" in row and row["n"] is None:
                    row["n"] = "inf"
                writer.writerow({k: _cell(v) for k, v in row.items()})

        logger.info(f"CSV export complete: {len(records)} rows written")

    @staticmethod
    def write_aggregate(table: List[Dict[str, Any]], output_path: Path):
        """Write an aggregate table produced by metrics.aggregate.

        Args:
            table: Aggregate rows
            output_path: Path to output CSV file
        """
        if not table:
            logger.warning("No aggregate rows to write to CSV")

        headers: List[str] = []
        for row in table:
            headers.extend(k for k in row if k not in headers)

        logger.info(f"Writing aggregate to CSV: {output_path}")

        with open(output_path, 'w', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=headers)
            writer.writeheader()
            for row in table:
                writer.writerow({k: _cell(row.get(k)) for k in headers})

        logger.info(f"Aggregate CSV export complete: {len(table)} groups")
