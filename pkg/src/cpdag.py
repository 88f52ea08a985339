"""Essential graphs, Markov equivalence and structural comparison metrics."""

import logging
from dataclasses import asdict, dataclass
from itertools import combinations, product
from typing import Dict, List, Optional, Tuple

from graph import Dag, Edge, Pdag, pair
from utils.errors import GraphError, InconsistentGraphError

logger = logging.getLogger(__name__)

MAX_ENUMERATION_EDGES = 16


@dataclass
class SkeletonMetrics:
    """Skeleton comparison counts and ratios for a predicted graph."""
    true_positives: int
    false_positives: int
    false_negatives: int
    precision: float
    recall: float
    f1: float

    @property
    def missing_edges(self) -> int:
        return self.false_negatives

    @property
    def extra_edges(self) -> int:
        return self.false_positives

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["missing_edges"] = self.missing_edges
        data["extra_edges"] = self.extra_edges
        return data


def _check_same_size(a, b):
    if a.p != b.p:
        raise GraphError("Graphs have different node counts", f"{a.p} != {b.p}")


# ============================================================================
# Meek rules
# ============================================================================

def _meek_rule(g: Pdag, i: int, j: int) -> Optional[str]:
    """Name of the first rule (R1..R4) that orients the undirected edge i - j as i -> j."""
    # R1: k -> i - j, k and j nonadjacent
    for k in g.parents(i):
        if k != j and not g.adjacent(k, j):
            return "R1"

    # R2: i -> k -> j
    for k in g.children(i):
        if g.is_directed(k, j):
            return "R2"

    # R3: i - k -> j, i - l -> j, k and l nonadjacent
    into_j = sorted(k for k in g.undirected_neighbors(i) if k != j and g.is_directed(k, j))
    for k, l in combinations(into_j, 2):
        if not g.adjacent(k, l):
            return "R3"

    # R4: i - k -> l -> j, k and j nonadjacent, i adjacent to l
    for k in g.undirected_neighbors(i):
        if k == j or g.adjacent(k, j):
            continue
        for l in g.children(k):
            if l != i and g.is_directed(l, j) and g.adjacent(i, l):
                return "R4"

    return None


def meek_closure(pdag: Pdag, strict: bool = True) -> Pdag:
    """Apply Meek rules R1-R4 until no rule fires.

    Each pass collects every orientation licensed by the current graph, then
    applies them together; the loop stops on a pass with no proposals. Edges
    that are already directed are never touched.

    Args:
        pdag: Input graph (not modified)
        strict: Raise on conflicting proposals instead of keeping the first one

    Returns:
        New Pdag with the closure applied

    Raises:
        InconsistentGraphError: If a pair would be directed both ways and strict is set
    """
    g = pdag.copy()
    passes = 0

    while True:
        proposals: Dict[Edge, Tuple[int, int, str]] = {}
        for a, b in sorted(g.undirected):
            for i, j in ((a, b), (b, a)):
                rule = _meek_rule(g, i, j)
                if rule is None:
                    continue
                key = pair(i, j)
                if key in proposals and proposals[key][:2] != (i, j):
                    first = proposals[key]
                    message = (f"{first[0]} -> {first[1]} by {first[2]} "
                               f"vs {i} -> {j} by {rule}")
                    if strict:
                        raise InconsistentGraphError("Conflicting Meek orientations", message)
                    logger.warning("Conflicting Meek orientations, keeping the first: %s", message)
                    continue
                proposals.setdefault(key, (i, j, rule))

        if not proposals:
            break
        passes += 1
        for i, j, rule in proposals.values():
            g.orient(i, j)
        logger.debug("Meek pass %d oriented %d edges", passes, len(proposals))

    return g


# ============================================================================
# Essential graph and equivalence
# ============================================================================

def essential_graph(dag: Dag) -> Pdag:
    """Compute the CPDAG of a DAG: v-structures directed, then Meek closure."""
    g = Pdag(dag.p, undirected=dag.skeleton())
    for a, c, b in sorted(dag.v_structures()):
        g.orient(a, c)
        g.orient(b, c)
    return meek_closure(g)


def same_mec(g: Dag, h: Dag) -> bool:
    """True iff g and h share skeleton and v-structures."""
    _check_same_size(g, h)
    return g.skeleton() == h.skeleton() and g.v_structures() == h.v_structures()


def enumerate_mec(dag: Dag) -> List[Dag]:
    """List every member of the equivalence class of dag by brute force.

    Tries all orientations of the skeleton, so it is meant for small graphs.

    Raises:
        GraphError: If the skeleton is too large to enumerate
    """
    edges = sorted(dag.skeleton())
    if len(edges) > MAX_ENUMERATION_EDGES:
        raise GraphError("Skeleton too large for brute-force enumeration",
                         f"{len(edges)} edges > {MAX_ENUMERATION_EDGES}")

    members = []
    target_v = dag.v_structures()
    for flips in product((False, True), repeat=len(edges)):
        oriented = [(v, u) if flip else (u, v) for (u, v), flip in zip(edges, flips)]
        try:
            candidate = Dag.from_edges(dag.p, oriented)
        except GraphError:
            continue
        if candidate.v_structures() == target_v:
            members.append(candidate)
    return members


# ============================================================================
# Comparison metrics
# ============================================================================

def shd(a: Pdag, b: Pdag) -> int:
    """Structural Hamming distance.

    Counts node pairs whose status (absent, undirected, u->v, v->u) differs;
    an orientation mismatch counts once.
    """
    _check_same_size(a, b)
    pairs = a.skeleton() | b.skeleton()
    return sum(1 for u, v in pairs if a.edge_status(u, v) != b.edge_status(u, v))


def normalized_shd(a: Pdag, b: Pdag) -> float:
    """SHD divided by the number of possible edges p(p-1)/2."""
    possible = a.p * (a.p - 1) // 2
    distance = shd(a, b)
    return distance / possible if possible else 0.0


def skeleton_metrics(predicted: Pdag, truth: Pdag) -> SkeletonMetrics:
    """Compare skeletons of a predicted and a true graph."""
    _check_same_size(predicted, truth)
    pred, true = predicted.skeleton(), truth.skeleton()
    tp = len(pred & true)
    fp = len(pred - true)
    fn = len(true - pred)

    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0

    return SkeletonMetrics(
        true_positives=tp,
        false_positives=fp,
        false_negatives=fn,
        precision=precision,
        recall=recall,
        f1=f1,
    )
