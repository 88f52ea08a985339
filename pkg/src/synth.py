"""Synthetic DAGs and linear Gaussian structural equation models.

Graph generators (Erdos-Renyi, Barabasi-Albert, the two-hub parallel-paths
family) and a linear SEM X_j = sum_i a_ij X_i + e_j with Gaussian noise.
Every generator takes an explicit seed; the same seed always yields the same
graph, weights and samples.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from graph import Dag, Edge
from utils.errors import SynthError

logger = logging.getLogger(__name__)

WEIGHT_LOW = 0.25
WEIGHT_HIGH = 1.0


@dataclass(frozen=True)
class SemModel:
    """Linear Gaussian SEM over a DAG.

    Attributes:
        dag: Causal graph
        weights: Edge (i, j) -> coefficient a_ij of X_i in X_j's equation
        noise_std: Per-node noise standard deviation
    """
    dag: Dag
    weights: Dict[Edge, float]
    noise_std: Tuple[float, ...]

    def __post_init__(self):
        if set(self.weights) != set(self.dag.edges):
            raise SynthError("Weight keys must match the DAG's edges")
        if len(self.noise_std) != self.dag.p:
            raise SynthError("Need one noise level per node",
                             f"{len(self.noise_std)} != {self.dag.p}")
        if any(s <= 0 for s in self.noise_std):
            raise SynthError("Noise standard deviations must be positive")

    @property
    def p(self) -> int:
        return self.dag.p

    def weight_matrix(self) -> np.ndarray:
        """p x p matrix A with A[i, j] = a_ij."""
        matrix = np.zeros((self.p, self.p))
        for (i, j), a in self.weights.items():
            matrix[i, j] = a
        return matrix


def _rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def _orient_by_permutation(p: int, undirected: Sequence[Edge], rng: np.random.Generator) -> Dag:
    rank = np.empty(p, dtype=int)
    rank[rng.permutation(p)] = np.arange(p)
    edges = [(a, b) if rank[a] < rank[b] else (b, a) for a, b in undirected]
    return Dag.from_edges(p, edges)


# ============================================================================
# Graph generators
# ============================================================================

def erdos_renyi_dag(p: int, edge_prob: Optional[float] = None,
                    expected_neighbors: Optional[float] = None,
                    seed: Optional[int] = None) -> Dag:
    """Random DAG with independent edges oriented along a random permutation.

    Exactly one of edge_prob or expected_neighbors must be given; an expected
    neighbourhood size k maps to edge probability k / (p - 1).

    Args:
        p: Number of nodes (>= 1)
        edge_prob: Probability q in [0, 1] of each pair being an edge
        expected_neighbors: Expected degree k in [0, p - 1]
        seed: RNG seed

    Returns:
        Random Dag

    Raises:
        SynthError: On invalid parameters
    """
    if p < 1:
        raise SynthError("Erdos-Renyi graph needs p >= 1", str(p))
    if (edge_prob is None) == (expected_neighbors is None):
        raise SynthError("Give exactly one of edge_prob or expected_neighbors")

    if expected_neighbors is not None:
        if not 0 <= expected_neighbors <= p - 1:
            raise SynthError("Expected neighbourhood size out of range",
                             f"{expected_neighbors} not in [0, {p - 1}]")
        q = expected_neighbors / (p - 1) if p > 1 else 0.0
    else:
        q = edge_prob
        if not 0.0 <= q <= 1.0:
            raise SynthError("Edge probability out of range", f"{q} not in [0, 1]")

    rng = _rng(seed)
    order = rng.permutation(p)
    draws = rng.random((p, p))
    edges = [(int(order[i]), int(order[j]))
             for i in range(p) for j in range(i + 1, p) if draws[i, j] < q]

    logger.debug("ER graph p=%d q=%.3f seed=%s: %d edges", p, q, seed, len(edges))
    return Dag.from_edges(p, edges)


def barabasi_albert_dag(p: int, m: int, seed: Optional[int] = None) -> Dag:
    """Preferential-attachment graph oriented along a random permutation.

    Starts from m isolated nodes; every later node attaches to m distinct
    earlier nodes chosen with probability proportional to degree + 1. The
    result has m * (p - m) edges.

    Raises:
        SynthError: Unless 1 <= m < p
    """
    if not 1 <= m < p:
        raise SynthError("Barabasi-Albert attachment count out of range", f"m={m}, p={p}")

    rng = _rng(seed)
    degree = np.zeros(p)
    undirected = []
    for node in range(m, p):
        weights = degree[:node] + 1.0
        targets = rng.choice(node, size=m, replace=False, p=weights / weights.sum())
        for target in sorted(int(t) for t in targets):
            undirected.append((target, node))
            degree[target] += 1
        degree[node] += m

    dag = _orient_by_permutation(p, undirected, rng)
    logger.debug("BA graph p=%d m=%d seed=%s: %d edges", p, m, seed, len(undirected))
    return dag


def parallel_paths_dag(p: int) -> Dag:
    """Two hubs joined by p - 2 parallel paths 0 -> i -> 1.

    Max degree is p - 2 while the largest undirected clique of the essential
    graph stays 2 for every p.

    Raises:
        SynthError: If p < 3
    """
    if p < 3:
        raise SynthError("Parallel-paths graph needs p >= 3", str(p))
    edges = [(0, i) for i in range(2, p)] + [(i, 1) for i in range(2, p)]
    return Dag.from_edges(p, edges)


# ============================================================================
# Structural equation models
# ============================================================================

def random_weights(dag: Dag, seed: Optional[int] = None) -> Dict[Edge, float]:
    """Edge weights with a fair-coin sign and magnitude uniform on [0.25, 1]."""
    rng = _rng(seed)
    weights = {}
    for edge in dag.sorted_edges():
        magnitude = rng.uniform(WEIGHT_LOW, WEIGHT_HIGH)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        weights[edge] = float(sign * magnitude)
    return weights


def random_sem(dag: Dag, seed: Optional[int] = None, noise_std: float = 1.0) -> SemModel:
    """SEM on dag with random weights and equal noise levels."""
    return SemModel(dag=dag, weights=random_weights(dag, seed), noise_std=(float(noise_std),) * dag.p)


def unfaithful_weights() -> SemModel:
    """SEM on {0->1, 0->3, 1->3, 2->3} that is Markov but not faithful.

    The weights satisfy a03 * a13 = a01, which cancels the two paths between
    X0 and X1 once X2 and X3 are given, so X0 _||_ X1 | {X2, X3} holds although
    0 -> 1 is an edge.
    """
    dag = Dag.from_edges(4, [(0, 1), (0, 3), (1, 3), (2, 3)])
    weights = {(0, 1): 0.5, (0, 3): 1.0, (1, 3): 0.5, (2, 3): 0.7}
    return SemModel(dag=dag, weights=weights, noise_std=(1.0,) * 4)


def sample_sem(model: SemModel, n: int, seed: Optional[int] = None) -> np.ndarray:
    """Draw n samples by ancestral sampling.

    Returns:
        n x p array with column j holding X_j

    Raises:
        SynthError: If n < 1
    """
    if n < 1:
        raise SynthError("Sample count must be >= 1", str(n))

    rng = _rng(seed)
    noise = rng.standard_normal((n, model.p)) * np.asarray(model.noise_std)
    data = np.zeros((n, model.p))
    for j in model.dag.topological_order():
        column = noise[:, j].copy()
        for i in model.dag.parents(j):
            column += model.weights[(i, j)] * data[:, i]
        data[:, j] = column
    return data


def population_covariance(model: SemModel) -> np.ndarray:
    """Exact covariance (I - A)^-T D (I - A)^-1 of the SEM."""
    eye = np.eye(model.p)
    inverse = np.linalg.inv(eye - model.weight_matrix())
    noise = np.diag(np.asarray(model.noise_std) ** 2)
    cov = inverse.T @ noise @ inverse
    return (cov + cov.T) / 2


# ============================================================================
# Weights sidecar
# ============================================================================

def write_weights(model: SemModel, path: Union[str, Path]):
    """Write weights as ``u v a_uv`` lines."""
    with open(path, "w") as f:
        for (i, j), a in sorted(model.weights.items()):
            f.write(f"{i} {j} {a!r}\n")


def read_weights(dag: Dag, path: Union[str, Path], noise_std: float = 1.0) -> SemModel:
    """Read a weights sidecar written by :func:`write_weights`."""
    weights = {}
    with open(path, "r") as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise SynthError("Malformed weights line", f"{path}:{lineno}")
            weights[(int(parts[0]), int(parts[1]))] = float(parts[2])
    return SemModel(dag=dag, weights=weights, noise_std=(float(noise_std),) * dag.p)
