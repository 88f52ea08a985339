"""Pytest configuration and shared fixtures.

This module provides the small reference graphs used across the suite, an
exhaustive list of 4-node DAGs, a pool of random instances for the oracle
exactness checks, and temporary benchmark config files.
"""

from itertools import combinations, product
from typing import Any, Dict, List

import pytest
import yaml

from graph import Dag
from synth import barabasi_albert_dag, erdos_renyi_dag
from utils.errors import GraphError


@pytest.fixture
def temp_dir(tmp_path):
    """Provide a temporary directory for tests.

    Args:
        tmp_path: Pytest tmp_path fixture

    Returns:
        Path to temporary directory

    """
    return tmp_path


@pytest.fixture
def worked_dag() -> Dag:
    """Five-node DAG 0->2, 1->2, 1->4, 2->3, 3->4 (its own essential graph)."""
    return Dag.from_edges(5, [(0, 2), (1, 2), (1, 4), (2, 3), (3, 4)])


@pytest.fixture
def collider_dag() -> Dag:
    """Collider 0 -> 1 <- 2."""
    return Dag.from_edges(3, [(0, 1), (2, 1)])


@pytest.fixture
def chain_dag() -> Dag:
    """Chain 0 -> 1 -> 2."""
    return Dag.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def unfaithful_dag() -> Dag:
    """Graph 0->1, 0->3, 1->3, 2->3 used with an injected independence."""
    return Dag.from_edges(4, [(0, 1), (0, 3), (1, 3), (2, 3)])


def _all_dags(p: int) -> List[Dag]:
    pairs = list(combinations(range(p), 2))
    dags = []
    for states in product((0, 1, 2), repeat=len(pairs)):
        edges = []
        for (a, b), state in zip(pairs, states):
            if state == 1:
                edges.append((a, b))
            elif state == 2:
                edges.append((b, a))
        try:
            dags.append(Dag.from_edges(p, edges))
        except GraphError:
            continue
    return dags


@pytest.fixture(scope="session")
def all_dags_4() -> List[Dag]:
    """Every labelled DAG on 4 nodes (543 of them)."""
    return _all_dags(4)


@pytest.fixture(scope="session")
def all_dags_3() -> List[Dag]:
    """Every labelled DAG on 3 nodes (25 of them)."""
    return _all_dags(3)


@pytest.fixture(scope="session")
def random_instances() -> List[Dag]:
    """202 random DAGs: ER p=4..12 at k=1,2,3 and BA p=6..10 at m=1,2."""
    dags = []
    for p in range(4, 13):
        for k in (1, 2, 3):
            for seed in range(6):
                dags.append(erdos_renyi_dag(p, expected_neighbors=k, seed=seed))
    for p in range(6, 11):
        for m in (1, 2):
            for seed in range(4):
                dags.append(barabasi_albert_dag(p, m, seed=seed))
    return dags


@pytest.fixture
def small_experiment() -> Dict[str, Any]:
    """Experiment section for a fast oracle sweep."""
    return {
        "family": "er",
        "sizes": [4, 5],
        "densities": [1, 2],
        "density_kind": "neighbors",
        "seeds": [0, 1],
        "algos": ["gas", "gas+", "pc"],
        "testers": ["oracle"],
    }


@pytest.fixture
def config_file(tmp_path, small_experiment):
    """YAML benchmark config holding the small experiment."""
    path = tmp_path / "config.yaml"
    path.write_text(yaml.dump({
        "experiment": small_experiment,
        "output": {"dir": str(tmp_path / "results")},
        "advanced": {"show_progress": False},
    }))
    return path
