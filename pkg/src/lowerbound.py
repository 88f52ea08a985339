"""Constructive check of the exponential CI-test lower bound.

For an undirected clique of size s in an essential graph, every conditioning
trace W (a subset of the clique with at most s - 2 nodes) yields a pair of
DAGs F and H: F is a member of the equivalence class whose clique order
places u, then W, then v, and H is F without the edge u -> v. The two are in
different equivalence classes, yet they agree on every CI statement whose
conditioning set meets the clique in anything other than W. An algorithm
therefore has to spend a separate test on each of the 2^s - s - 1 traces.
"""

import logging
from dataclasses import dataclass, field
from itertools import chain, combinations
from numbers import Integral
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

from citest.base import CiQuery
from cpdag import essential_graph, same_mec
from graph import Dag, NodeSet, Pdag, d_separated, node_set
from utils.errors import GraphError, LowerBoundError

logger = logging.getLogger(__name__)

MIN_CLIQUE = 2
MAX_CERTIFY = 6

Statement = Union[CiQuery, Tuple[Any, Any, Iterable[int]]]


@dataclass(frozen=True)
class AdversarialPair:
    """Two DAGs that only a trace-specific test can tell apart.

    Attributes:
        f: Member of the equivalence class with the special clique order
        h: f with the edge u -> v removed
        u: First node of the clique order
        v: Node placed right after w
        w: Conditioning trace
        clique: The clique the construction reorders
        order: Clique order used for f
    """
    f: Dag
    h: Dag
    u: int
    v: int
    w: NodeSet
    clique: NodeSet
    order: NodeSet


@dataclass
class TraceCertificate:
    """Certification outcome for one conditioning trace."""
    w: NodeSet
    u: int
    v: int
    statements_checked: int
    indistinguishable: bool
    designed_disagreement: bool
    f_in_class: bool
    h_outside_class: bool

    @property
    def certified(self) -> bool:
        return (self.indistinguishable and self.designed_disagreement
                and self.f_in_class and self.h_outside_class)


@dataclass
class LowerBoundReport:
    """Certification of every trace of an s-clique."""
    s: int
    required: int
    traces: List[TraceCertificate] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return len(self.traces) == self.required and all(t.certified for t in self.traces)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s": self.s,
            "required": self.required,
            "certified": self.certified,
            "traces": [
                {"w": list(t.w), "u": t.u, "v": t.v,
                 "statements": t.statements_checked, "certified": t.certified}
                for t in self.traces
            ],
        }


def required_test_count(s: int) -> int:
    """Number of distinct conditioning traces of an s-clique: 2^s - s - 1."""
    if s < MIN_CLIQUE:
        raise LowerBoundError("Clique size must be at least 2", str(s))
    return 2 ** s - s - 1


def _check_undirected_clique(essential: Pdag, clique: NodeSet):
    for a, b in combinations(clique, 2):
        if not essential.is_undirected(a, b):
            raise LowerBoundError("Nodes do not form an undirected clique of the essential graph",
                                  f"{a} and {b} in {clique}")


def lemma7_in_scope(g: Dag, u: int, v: int, clique: Iterable[int], c: Iterable[int]) -> bool:
    """Whether removing u -> v from g can change a separation given c.

    True iff (Pa(v) & Ch(u)) & clique <= c & clique <= (Pa(v) - {u}) & clique.

    Raises:
        LowerBoundError: If u -> v is not an undirected edge of the essential
            graph or the clique does not contain u and v
    """
    clique_set = set(node_set(clique))
    if not g.has_edge(u, v):
        raise LowerBoundError("Expected an edge u -> v", f"{u} -> {v}")
    if u not in clique_set or v not in clique_set:
        raise LowerBoundError("Clique must contain u and v", f"{sorted(clique_set)}")
    essential = essential_graph(g)
    if not essential.is_undirected(u, v):
        raise LowerBoundError("Edge is directed in the essential graph", f"{u} -> {v}")
    _check_undirected_clique(essential, node_set(clique_set))

    parents_v = set(g.parents(v))
    lower = parents_v & set(g.children(u)) & clique_set
    upper = (parents_v - {u}) & clique_set
    trace = set(c) & clique_set
    return lower <= trace <= upper


def _search_order(essential: Pdag, seed: Sequence[int]) -> List[int]:
    """Maximum cardinality search over undirected edges, visiting seed first.

    Ties go to the smallest node id.
    """
    visited: List[int] = []
    weight = {x: 0 for x in range(essential.p)}
    remaining = set(range(essential.p))

    def visit(x: int):
        visited.append(x)
        remaining.discard(x)
        for y in essential.undirected_neighbors(x):
            if y in remaining:
                weight[y] += 1

    for x in seed:
        visit(x)
    while remaining:
        best = max(weight[x] for x in remaining)
        visit(min(x for x in remaining if weight[x] == best))
    return visited


def build_adversarial_pair(g: Dag, clique: Iterable[int], w: Iterable[int]) -> AdversarialPair:
    """Construct F in the class of g and H = F minus u -> v for trace w.

    u and v are the two smallest clique nodes outside w. The clique is ordered
    u, w, v, then the rest; the other undirected edges follow a maximum
    cardinality search seeded with that order, so no v-structure is created.

    Raises:
        LowerBoundError: If the clique is not undirected in the essential
            graph, w is not a subset of it, or w is too large
    """
    clique_nodes = node_set(clique)
    trace = node_set(w)
    if len(clique_nodes) < MIN_CLIQUE:
        raise LowerBoundError("Clique must have at least 2 nodes", str(clique_nodes))
    if not set(trace) <= set(clique_nodes):
        raise LowerBoundError("Trace must be a subset of the clique", f"{trace} vs {clique_nodes}")
    if len(trace) > len(clique_nodes) - 2:
        raise LowerBoundError("Trace too large", f"|w|={len(trace)} > {len(clique_nodes) - 2}")

    essential = essential_graph(g)
    _check_undirected_clique(essential, clique_nodes)

    rest = [x for x in clique_nodes if x not in trace]
    u, v = rest[0], rest[1]
    order = [u, *trace, v, *rest[2:]]
    position = {x: i for i, x in enumerate(_search_order(essential, order))}

    edges = set(essential.directed)
    for a, b in essential.undirected:
        edges.add((a, b) if position[a] < position[b] else (b, a))

    try:
        f = Dag.from_edges(g.p, edges)
    except GraphError as e:
        raise LowerBoundError("Clique order does not give a DAG", e.message)
    if not same_mec(f, g):
        raise LowerBoundError("Reoriented graph left the equivalence class", f"order {order}")

    h = f.without_edge(u, v)
    logger.debug("Adversarial pair for w=%s: u=%d v=%d order=%s", trace, u, v, order)
    return AdversarialPair(f=f, h=h, u=u, v=v, w=trace, clique=clique_nodes, order=tuple(order))


def _as_sets(statement: Statement) -> Tuple[NodeSet, NodeSet, NodeSet]:
    if isinstance(statement, CiQuery):
        return (statement.u,), (statement.v,), statement.cond
    a, b, c = statement
    a = (int(a),) if isinstance(a, Integral) else node_set(a)
    b = (int(b),) if isinstance(b, Integral) else node_set(b)
    return a, b, node_set(c)


def verify_indistinguishable(pair: AdversarialPair, performed: Iterable[Statement]) -> bool:
    """True iff F and H give the same answer on every performed statement.

    Statements are CiQuery objects or (A, B, C) tuples with node or set endpoints.
    """
    for statement in performed:
        a, b, c = _as_sets(statement)
        if d_separated(pair.f, a, b, c) != d_separated(pair.h, a, b, c):
            logger.debug("F and H disagree on %s", statement)
            return False
    return True


def _subsets(nodes: Sequence[int]) -> Iterable[Tuple[int, ...]]:
    return chain.from_iterable(combinations(nodes, k) for k in range(len(nodes) + 1))


def avoiding_statements(p: int, clique: Iterable[int], w: Iterable[int]) -> List[CiQuery]:
    """Every singleton CI statement whose conditioning set meets the clique outside w."""
    clique_set, trace = set(clique), set(w)
    statements = []
    for a, b in combinations(range(p), 2):
        others = [x for x in range(p) if x != a and x != b]
        for c in _subsets(others):
            if set(c) & clique_set != trace:
                statements.append(CiQuery.make(a, b, c))
    return statements


def certify_lower_bound(s: int) -> LowerBoundReport:
    """Certify every conditioning trace of the complete DAG on s nodes.

    Raises:
        LowerBoundError: If s is outside 2..6
    """
    if not MIN_CLIQUE <= s <= MAX_CERTIFY:
        raise LowerBoundError("Clique size out of range", f"{s} not in {MIN_CLIQUE}..{MAX_CERTIFY}")

    g = Dag.complete(range(s))
    clique = tuple(range(s))
    report = LowerBoundReport(s=s, required=required_test_count(s))

    for trace in _subsets(clique):
        if len(trace) > s - 2:
            continue
        pair = build_adversarial_pair(g, clique, trace)
        statements = avoiding_statements(s, clique, trace)

        certificate = TraceCertificate(
            w=tuple(trace),
            u=pair.u,
            v=pair.v,
            statements_checked=len(statements),
            indistinguishable=verify_indistinguishable(pair, statements),
            designed_disagreement=(not d_separated(pair.f, (pair.u,), (pair.v,), trace)
                                   and d_separated(pair.h, (pair.u,), (pair.v,), trace)),
            f_in_class=same_mec(pair.f, g),
            h_outside_class=not same_mec(pair.h, g),
        )
        report.traces.append(certificate)
        logger.debug("Trace %s certified=%s", certificate.w, certificate.certified)

    logger.info("Lower bound for s=%d: %d/%d traces certified", s,
                sum(t.certified for t in report.traces), report.required)
    return report
