"""Host description stored next to benchmark output.

Wall-time columns are only comparable on the same machine, so every
benchmark summary records the host it ran on.
"""

import logging
import os
import platform
import sys
from typing import Any, Dict

import numpy as np
import psutil

logger = logging.getLogger(__name__)


def get_total_memory() -> float:
    """Total system memory in GB."""
    return psutil.virtual_memory().total / (1024 ** 3)


def get_available_memory() -> float:
    """Available system memory in GB."""
    return psutil.virtual_memory().available / (1024 ** 3)


def get_cpu_count() -> int:
    """Number of logical CPU cores."""
    return psutil.cpu_count(logical=True) or os.cpu_count() or 1


def get_hardware_info() -> Dict[str, Any]:
    """Get host and runtime details.

    Returns:
        Dictionary of hardware and interpreter details
    """
    info: Dict[str, Any] = {
        "platform": platform.system(),
        "platform_release": platform.release(),
        "architecture": platform.machine(),
        "processor": platform.processor(),
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "cpu_cores": get_cpu_count(),
    }
    try:
        info["total_memory_gb"] = round(get_total_memory(), 2)
        info["available_memory_gb"] = round(get_available_memory(), 2)
    except (OSError, RuntimeError) as e:
        logger.warning(f"Could not read memory statistics: {e}")
    return info
