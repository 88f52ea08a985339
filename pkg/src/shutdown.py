"""Shared shutdown state for graceful termination.

A global flag set by SIGINT/SIGTERM. The benchmark sweep checks it between
cells, saves its checkpoint and stops; a second signal interrupts at once.
"""

import logging
import signal

logger = logging.getLogger(__name__)

# Global flag for graceful shutdown
_shutdown_requested = False


def is_shutdown_requested() -> bool:
    """Check if shutdown has been requested."""
    return _shutdown_requested


def request_shutdown() -> None:
    """Request graceful shutdown."""
    global _shutdown_requested
    _shutdown_requested = True


def reset_shutdown() -> None:
    """Reset shutdown flag (mainly for testing)."""
    global _shutdown_requested
    _shutdown_requested = False


def signal_handler(signum, frame):
    """Set the flag on the first signal, interrupt on the second.

    Args:
        signum: Signal number
        frame: Current stack frame

    Raises:
        KeyboardInterrupt: If shutdown was already requested
    """
    if not is_shutdown_requested():
        request_shutdown()
        logger.warning("Shutdown requested (signal %d). Finishing current cell and "
                       "saving progress; signal again to stop immediately", signum)
    else:
        raise KeyboardInterrupt


def install_signal_handlers() -> None:
    """Route SIGINT and SIGTERM to :func:`signal_handler`."""
    signal.signal(signal.SIGINT, signal_handler)
    signal.signal(signal.SIGTERM, signal_handler)
