"""Formatting utilities for CLI output.

This module provides helpers for durations, aligned text tables and
optional terminal colors.
"""

import logging
from typing import Any, List, Optional, Sequence

logger = logging.getLogger(__name__)


def format_duration(seconds: float) -> str:
    """Format duration as human-readable string.

    Args:
        seconds: Duration in seconds

    Returns:
        Formatted string (e.g., "2h 15m", "45s", "0.012s")
    """
    if seconds < 1:
        return f"{seconds:.3f}s"
    elif seconds < 60:
        return f"{seconds:.1f}s"
    elif seconds < 3600:
        return f"{int(seconds // 60)}m {seconds % 60:.0f}s"
    else:
        return f"{int(seconds // 3600)}h {int((seconds % 3600) // 60)}m"


def format_value(value: Any, precision: int = 3) -> str:
    """Render a table cell; floats are rounded, None becomes '-'."""
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.{precision}f}"
    if isinstance(value, (list, tuple)):
        return "{" + ",".join(str(v) for v in value) + "}"
    return str(value)


def format_table_row(columns: list, widths: list) -> str:
    """Format a table row with aligned columns.

    Args:
        columns: List of column values
        widths: List of column widths

    Returns:
        Formatted row string
    """
    parts = []
    for col, width in zip(columns, widths):
        parts.append(str(col).ljust(width))

    return " ".join(parts).rstrip()


def format_table(headers: Sequence[str], rows: Sequence[Sequence[Any]],
                 precision: int = 3) -> str:
    """Format rows as an aligned plain-text table with a header rule."""
    cells: List[List[str]] = [[format_value(v, precision) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    lines = [format_table_row(list(headers), widths),
             format_table_row(["-" * w for w in widths], widths)]
    lines.extend(format_table_row(row, widths) for row in cells)
    return "\n".join(lines)


def colorize(text: str, color: Optional[str]) -> str:
    """Add ANSI color codes to text (if supported).

    Args:
        text: Text to colorize
        color: Color name (red, green, yellow) or None for plain text

    Returns:
        Colorized text with ANSI codes
    """
    colors = {
        'red': '\033[91m',
        'green': '\033[92m',
        'yellow': '\033[93m',
        'reset': '\033[0m'
    }

    color_code = colors.get((color or "").lower(), '')
    return f"{color_code}{text}{colors['reset']}" if color_code else text
