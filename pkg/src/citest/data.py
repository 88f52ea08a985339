"""CSV sample matrices.

One header row of variable names, then one comma-separated row per sample.
Column order defines the node id of each variable.
"""

import csv
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


def read_data_csv(path: Union[str, Path]) -> Tuple[List[str], np.ndarray]:
    """Read a sample matrix.

    Args:
        path: CSV file path

    Returns:
        Tuple of (variable names, n x p float array)

    Raises:
        ConfigurationError: If the file is missing, empty or malformed
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError("Data file not found", str(path))

    with open(path, "r", newline="") as f:
        reader = csv.reader(f)
        try:
            names = [name.strip() for name in next(reader)]
        except StopIteration:
            raise ConfigurationError("Data file is empty", str(path))

        rows = []
        for lineno, row in enumerate(reader, 2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(names):
                raise ConfigurationError("Row has wrong number of columns",
                                         f"{path}:{lineno}: expected {len(names)}, got {len(row)}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                raise ConfigurationError("Non-numeric value in data file", f"{path}:{lineno}")

    if not rows:
        raise ConfigurationError("Data file has no samples", str(path))

    data = np.asarray(rows, dtype=float)
    logger.info(f"Loaded {data.shape[0]} samples of {data.shape[1]} variables from {path}")
    return names, data


def write_data_csv(data: np.ndarray, path: Union[str, Path],
                   names: Optional[Sequence[str]] = None):
    """Write a sample matrix with a header row (default names X0..X{p-1})."""
    data = np.asarray(data, dtype=float)
    if names is None:
        names = [f"X{j}" for j in range(data.shape[1])]
    if len(names) != data.shape[1]:
        raise ConfigurationError("Column name count does not match data",
                                 f"{len(names)} != {data.shape[1]}")

    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(names)
        for row in data:
            writer.writerow(repr(float(x)) for x in row)

    logger.info(f"Wrote {data.shape[0]} samples to {path}")
