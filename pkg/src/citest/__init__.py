"""Conditional-independence testers.

This package contains the CI backends the discovery algorithms query. Each
backend shares the canonical query type and accounting of ``CiTester``.
"""

import logging

from citest.base import CiQuery, CiStats, CiTester
from citest.fisherz import FisherZTester, PValueResult, fisherz_independent, fisherz_test
from citest.oracle import OracleTester, oracle_independent
from citest.unfaithful import UnfaithfulOracleTester, unfaithful_oracle_independent
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

# Tester registry
TESTERS = {
    "oracle": OracleTester,
    "fisherz": FisherZTester,
    "unfaithful": UnfaithfulOracleTester,
}


def get_tester(name: str, *args, **kwargs) -> CiTester:
    """Create a tester by name.

    Args:
        name: Tester name (e.g., "oracle", "fisherz")
        *args: Positional constructor arguments (a Dag or a data matrix)
        **kwargs: Keyword constructor arguments

    Returns:
        Fresh tester instance

    Raises:
        ConfigurationError: If tester not found
    """
    if name not in TESTERS:
        raise ConfigurationError(f"Unknown tester: {name}", f"Available: {list_testers()}")

    return TESTERS[name](*args, **kwargs)


def list_testers() -> list:
    """Get list of available tester names."""
    return list(TESTERS.keys())


__all__ = [
    "CiQuery",
    "CiStats",
    "CiTester",
    "FisherZTester",
    "OracleTester",
    "PValueResult",
    "TESTERS",
    "UnfaithfulOracleTester",
    "fisherz_independent",
    "fisherz_test",
    "get_tester",
    "list_testers",
    "oracle_independent",
    "unfaithful_oracle_independent",
]
