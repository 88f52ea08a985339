"""Directed and partially directed graphs over dense integer node ids.

This module holds the ground-truth ``Dag`` type, the mutable ``Pdag`` working
graph used by the discovery algorithms, ancestral queries, d-separation (an
active-trail reachability pass), the moral-graph separation cross-check, clique
search, and the edge-list text format used by the CLI.

Node sets are represented as sorted, deduplicated tuples (``NodeSet``) so they
can be hashed and compared directly.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from numbers import Integral
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx

from utils.errors import GraphError

logger = logging.getLogger(__name__)

NodeId = int
NodeSet = Tuple[int, ...]
Edge = Tuple[int, int]

RELATIONS = ("ancestors", "descendants", "parents", "children")


def node_set(nodes: Iterable[int] = ()) -> NodeSet:
    """Canonicalize an iterable of node ids into a sorted tuple without duplicates."""
    return tuple(sorted(set(int(n) for n in nodes)))


def pair(u: int, v: int) -> Edge:
    """Return the unordered pair {u, v} in canonical (min, max) form."""
    return (u, v) if u < v else (v, u)


def _check_node(p: int, v: int, context: str = "node"):
    if not isinstance(v, Integral) or isinstance(v, bool) or v < 0 or v >= p:
        raise GraphError(f"{context} out of range", f"{v!r} not in 0..{p - 1}")


@dataclass(frozen=True)
class Dag:
    """Immutable directed acyclic graph on nodes 0..p-1.

    Build instances through :meth:`from_edges`, which validates node ranges,
    self-loops, duplicates and acyclicity. Parents, children, ancestors and
    descendants are precomputed so all queries are read-only.
    """

    p: int
    edges: FrozenSet[Edge]
    _parents: Tuple[NodeSet, ...] = field(init=False, repr=False, compare=False)
    _children: Tuple[NodeSet, ...] = field(init=False, repr=False, compare=False)
    _ancestors: Tuple[FrozenSet[int], ...] = field(init=False, repr=False, compare=False)
    _descendants: Tuple[FrozenSet[int], ...] = field(init=False, repr=False, compare=False)
    _order: NodeSet = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.p < 0:
            raise GraphError("Node count must be non-negative", str(self.p))

        parents: List[Set[int]] = [set() for _ in range(self.p)]
        children: List[Set[int]] = [set() for _ in range(self.p)]
        for u, v in self.edges:
            _check_node(self.p, u, "edge endpoint")
            _check_node(self.p, v, "edge endpoint")
            if u == v:
                raise GraphError("Self-loop not allowed", f"{u} -> {v}")
            if u in children[v]:
                raise GraphError("Edge present in both directions", f"{u} <-> {v}")
            children[u].add(v)
            parents[v].add(u)

        digraph = nx.DiGraph()
        digraph.add_nodes_from(range(self.p))
        digraph.add_edges_from(self.edges)
        if not nx.is_directed_acyclic_graph(digraph):
            cycle = nx.find_cycle(digraph)
            raise GraphError("Graph contains a directed cycle", str(cycle))
        order = tuple(nx.lexicographical_topological_sort(digraph))

        object.__setattr__(self, "_parents", tuple(node_set(s) for s in parents))
        object.__setattr__(self, "_children", tuple(node_set(s) for s in children))
        object.__setattr__(self, "_order", order)

        ancestors: List[FrozenSet[int]] = [frozenset()] * self.p
        for v in order:
            acc: Set[int] = set()
            for u in parents[v]:
                acc.add(u)
                acc |= ancestors[u]
            ancestors[v] = frozenset(acc)
        descendants: List[Set[int]] = [set() for _ in range(self.p)]
        for v in range(self.p):
            for u in ancestors[v]:
                descendants[u].add(v)
        object.__setattr__(self, "_ancestors", tuple(ancestors))
        object.__setattr__(self, "_descendants", tuple(frozenset(d) for d in descendants))

    @classmethod
    def from_edges(cls, p: int, edges: Iterable[Edge]) -> "Dag":
        """Create a DAG from an edge list, rejecting duplicate edges.

        Args:
            p: Number of nodes
            edges: Iterable of (u, v) pairs meaning u -> v

        Returns:
            Validated Dag

        Raises:
            GraphError: On invalid nodes, self-loops, duplicates or cycles
        """
        edge_list = [(int(u), int(v)) for u, v in edges]
        edge_set = frozenset(edge_list)
        if len(edge_set) != len(edge_list):
            raise GraphError("Duplicate edges in edge list")
        return cls(p=p, edges=edge_set)

    @classmethod
    def empty(cls, p: int) -> "Dag":
        """Create an edgeless DAG on p nodes."""
        return cls(p=p, edges=frozenset())

    @classmethod
    def complete(cls, order: Iterable[int]) -> "Dag":
        """Create the complete DAG directed along the given node order."""
        order = list(order)
        edges = [(order[i], order[j]) for i in range(len(order)) for j in range(i + 1, len(order))]
        return cls.from_edges(len(order), edges)

    @property
    def nodes(self) -> NodeSet:
        return tuple(range(self.p))

    def parents(self, v: int) -> NodeSet:
        _check_node(self.p, v)
        return self._parents[v]

    def children(self, v: int) -> NodeSet:
        _check_node(self.p, v)
        return self._children[v]

    def ancestors(self, v: int) -> FrozenSet[int]:
        _check_node(self.p, v)
        return self._ancestors[v]

    def descendants(self, v: int) -> FrozenSet[int]:
        _check_node(self.p, v)
        return self._descendants[v]

    def topological_order(self) -> NodeSet:
        """Lexicographically smallest topological order."""
        return self._order

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def adjacent(self, u: int, v: int) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def skeleton(self) -> Set[Edge]:
        return {pair(u, v) for u, v in self.edges}

    def v_structures(self) -> Set[Tuple[int, int, int]]:
        """Return all (a, c, b) with a -> c <- b, a < b and a, b nonadjacent."""
        found = set()
        for c in range(self.p):
            for a, b in combinations(self._parents[c], 2):
                if not self.adjacent(a, b):
                    found.add((a, c, b))
        return found

    def without_edge(self, u: int, v: int) -> "Dag":
        if (u, v) not in self.edges:
            raise GraphError("Edge not present", f"{u} -> {v}")
        return Dag(p=self.p, edges=self.edges - {(u, v)})

    def to_networkx(self) -> nx.DiGraph:
        digraph = nx.DiGraph()
        digraph.add_nodes_from(range(self.p))
        digraph.add_edges_from(self.edges)
        return digraph

    def __str__(self) -> str:
        return format_edge_list(self)


class Pdag:
    """Mutable partially directed graph.

    Each node pair is either absent, undirected, or directed one way. The
    discovery algorithms mutate a Pdag under exclusive access; equality uses
    the canonical sorted edge lists.
    """

    __hash__ = None  # mutable

    def __init__(self, p: int, directed: Iterable[Edge] = (), undirected: Iterable[Edge] = ()):
        """Initialize the graph.

        Args:
            p: Number of nodes
            directed: Ordered pairs (u, v) meaning u -> v
            undirected: Unordered pairs meaning u - v
        """
        if p < 0:
            raise GraphError("Node count must be non-negative", str(p))
        self.p = p
        self.directed: Set[Edge] = set()
        self.undirected: Set[Edge] = set()
        self._adj: List[Set[int]] = [set() for _ in range(p)]

        for u, v in directed:
            self.add_directed(u, v)
        for u, v in undirected:
            self.add_undirected(u, v)

    @classmethod
    def complete(cls, p: int) -> "Pdag":
        """Complete undirected graph on p nodes."""
        return cls(p, undirected=combinations(range(p), 2))

    @classmethod
    def from_dag(cls, dag: Dag) -> "Pdag":
        """Fully directed copy of a DAG."""
        return cls(dag.p, directed=dag.edges)

    def copy(self) -> "Pdag":
        clone = Pdag(self.p)
        clone.directed = set(self.directed)
        clone.undirected = set(self.undirected)
        clone._adj = [set(s) for s in self._adj]
        return clone

    def _check_pair(self, u: int, v: int):
        _check_node(self.p, u, "edge endpoint")
        _check_node(self.p, v, "edge endpoint")
        if u == v:
            raise GraphError("Self-loop not allowed", f"{u} - {v}")

    def add_directed(self, u: int, v: int):
        """Add u -> v; the pair must currently be absent."""
        self._check_pair(u, v)
        u, v = int(u), int(v)
        if self.adjacent(u, v):
            raise GraphError("Pair already has an edge", f"{u}, {v}")
        self.directed.add((u, v))
        self._adj[u].add(v)
        self._adj[v].add(u)

    def add_undirected(self, u: int, v: int):
        """Add u - v; the pair must currently be absent."""
        self._check_pair(u, v)
        u, v = int(u), int(v)
        if self.adjacent(u, v):
            raise GraphError("Pair already has an edge", f"{u}, {v}")
        self.undirected.add(pair(u, v))
        self._adj[u].add(v)
        self._adj[v].add(u)

    def orient(self, u: int, v: int):
        """Replace the edge between u and v with u -> v, whatever its state."""
        if not self.adjacent(u, v):
            raise GraphError("Cannot orient an absent edge", f"{u}, {v}")
        self.undirected.discard(pair(u, v))
        self.directed.discard((v, u))
        self.directed.add((u, v))

    def remove_edge(self, u: int, v: int):
        """Delete any edge between u and v."""
        if not self.adjacent(u, v):
            raise GraphError("Cannot remove an absent edge", f"{u}, {v}")
        self.undirected.discard(pair(u, v))
        self.directed.discard((u, v))
        self.directed.discard((v, u))
        self._adj[u].discard(v)
        self._adj[v].discard(u)

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def is_directed(self, u: int, v: int) -> bool:
        return (u, v) in self.directed

    def is_undirected(self, u: int, v: int) -> bool:
        return pair(u, v) in self.undirected

    def neighbors(self, v: int) -> Set[int]:
        """All nodes adjacent to v regardless of edge marks."""
        return self._adj[v]

    def undirected_neighbors(self, v: int) -> Set[int]:
        return {w for w in self._adj[v] if pair(v, w) in self.undirected}

    def parents(self, v: int) -> Set[int]:
        return {w for w in self._adj[v] if (w, v) in self.directed}

    def children(self, v: int) -> Set[int]:
        return {w for w in self._adj[v] if (v, w) in self.directed}

    def edge_status(self, u: int, v: int) -> str:
        """Status of the pair from u's point of view: 'absent', '-', '->' or '<-'."""
        if (u, v) in self.directed:
            return "->"
        if (v, u) in self.directed:
            return "<-"
        if pair(u, v) in self.undirected:
            return "-"
        return "absent"

    def skeleton(self) -> Set[Edge]:
        return {pair(u, v) for u, v in self.directed} | set(self.undirected)

    def num_edges(self) -> int:
        return len(self.directed) + len(self.undirected)

    def key(self) -> Tuple[int, Tuple[Edge, ...], Tuple[Edge, ...]]:
        """Canonical hashable form."""
        return (self.p, tuple(sorted(self.directed)), tuple(sorted(self.undirected)))

    def to_networkx_skeleton(self, nodes: Optional[Iterable[int]] = None) -> nx.Graph:
        """Undirected skeleton, optionally induced on a node subset."""
        keep = set(range(self.p)) if nodes is None else set(nodes)
        graph = nx.Graph()
        graph.add_nodes_from(sorted(keep))
        graph.add_edges_from((u, v) for u, v in self.skeleton() if u in keep and v in keep)
        return graph

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pdag):
            return NotImplemented
        return self.key() == other.key()

    def __repr__(self) -> str:
        return (f"Pdag(p={self.p}, directed={sorted(self.directed)}, "
                f"undirected={sorted(self.undirected)})")

    def __str__(self) -> str:
        return format_edge_list(self)


# ============================================================================
# Ancestral queries
# ============================================================================

def ancestral_query(dag: Dag, v: int, kind: str) -> NodeSet:
    """Return the exclusive ancestors, descendants, parents or children of v.

    Args:
        dag: Ground-truth DAG
        v: Node id
        kind: One of "ancestors", "descendants", "parents", "children"

    Returns:
        Sorted node set not including v

    Raises:
        GraphError: If v is out of range or kind is unknown
    """
    _check_node(dag.p, v)
    if kind == "ancestors":
        return node_set(dag.ancestors(v))
    if kind == "descendants":
        return node_set(dag.descendants(v))
    if kind == "parents":
        return dag.parents(v)
    if kind == "children":
        return dag.children(v)
    raise GraphError(f"Unknown relation: {kind}", f"expected one of {RELATIONS}")


def sources(dag: Dag, w: Iterable[int]) -> NodeSet:
    """Nodes of w that have no ancestor inside w."""
    members = set(node_set(w))
    return node_set(v for v in members if not (dag.ancestors(v) & members))


def is_prefix_set(dag: Dag, s: Iterable[int]) -> bool:
    """True iff s is closed under taking ancestors."""
    members = set(node_set(s))
    return all(dag.ancestors(v) <= members for v in members)


# ============================================================================
# Separation
# ============================================================================

def _separation_args(dag: Dag, a, b, c) -> Tuple[Set[int], Set[int], Set[int]]:
    a_set, b_set, c_set = set(node_set(a)), set(node_set(b)), set(node_set(c))
    for v in a_set | b_set | c_set:
        _check_node(dag.p, v)
    if not a_set or not b_set:
        raise GraphError("Separation query needs nonempty node sets")
    if a_set & b_set:
        raise GraphError("Separation query sets overlap", str(sorted(a_set & b_set)))
    # C \ (A u B) convention
    return a_set, b_set, c_set - a_set - b_set


def d_separated(dag: Dag, a: Iterable[int], b: Iterable[int], c: Iterable[int] = ()) -> bool:
    """Decide whether c d-separates a from b in dag.

    The conditioning set is reduced to c minus (a union b) before the query.
    Uses a single reachability pass over (node, direction) states, linear in
    the number of edges.

    Args:
        dag: Ground-truth DAG
        a: First node set (nonempty)
        b: Second node set (nonempty, disjoint from a)
        c: Conditioning set

    Returns:
        True if every trail between a and b is blocked given c

    Raises:
        GraphError: On out-of-range nodes, empty or overlapping a and b
    """
    a_set, b_set, c_set = _separation_args(dag, a, b, c)

    # colliders are active when they are in Anc[c]
    activating: Set[int] = set()
    stack = list(c_set)
    while stack:
        y = stack.pop()
        if y not in activating:
            activating.add(y)
            stack.extend(dag.parents(y))

    queue = deque((x, "up") for x in sorted(a_set))
    visited: Set[Tuple[int, str]] = set()
    while queue:
        y, direction = queue.popleft()
        if (y, direction) in visited:
            continue
        visited.add((y, direction))

        if y not in c_set and y in b_set:
            return False

        if direction == "up":
            if y not in c_set:
                for parent in dag.parents(y):
                    queue.append((parent, "up"))
                for child in dag.children(y):
                    queue.append((child, "down"))
        else:
            if y not in c_set:
                for child in dag.children(y):
                    queue.append((child, "down"))
            if y in activating:
                for parent in dag.parents(y):
                    queue.append((parent, "up"))

    return True


def moral_separated(dag: Dag, a: Iterable[int], b: Iterable[int], c: Iterable[int] = ()) -> bool:
    """Separation of a from b by c in the moral graph of Anc[a u b u c].

    Equivalent to :func:`d_separated`; kept as an independent cross-check.
    """
    a_set, b_set, c_set = _separation_args(dag, a, b, c)

    relevant = a_set | b_set | c_set
    closure = set(relevant)
    for v in relevant:
        closure |= dag.ancestors(v)

    moral = nx.moral_graph(dag.to_networkx().subgraph(closure))
    moral.remove_nodes_from(c_set)
    for x in a_set:
        if nx.node_connected_component(moral, x) & b_set:
            return False
    return True


# ============================================================================
# Cliques
# ============================================================================

def has_clique_of_size(pdag: Pdag, nodes: Iterable[int], k: int) -> bool:
    """Whether the skeleton of pdag induced on nodes has a clique of >= k nodes.

    Candidates are first pruned to the (k-1)-core, then maximal cliques are
    enumerated with pivoting Bron-Kerbosch and the search stops at the first
    clique reaching size k.
    """
    members = node_set(nodes)
    if k <= 0:
        return True
    if k == 1:
        return len(members) > 0

    graph = pdag.to_networkx_skeleton(members)
    core = nx.k_core(graph, k - 1)
    if core.number_of_nodes() < k:
        return False
    for clique in nx.find_cliques(core):
        if len(clique) >= k:
            return True
    return False


def max_undirected_clique(pdag: Pdag) -> int:
    """Size of the largest clique formed by undirected edges (1 for any node)."""
    if pdag.p == 0:
        return 0
    graph = nx.Graph()
    graph.add_nodes_from(range(pdag.p))
    graph.add_edges_from(pdag.undirected)
    return max(len(clique) for clique in nx.find_cliques(graph))


# ============================================================================
# Edge-list text format
# ============================================================================

def parse_edge_list(text: str) -> Pdag:
    """Parse the edge-list format into a Pdag.

    Format: a ``p=<n>`` header, then ``u -> v`` or ``u -- v`` per line.
    Blank lines and ``#`` comments are ignored.

    Raises:
        GraphError: On malformed text
    """
    p: Optional[int] = None
    directed: List[Edge] = []
    undirected: List[Edge] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if p is None:
            if not line.startswith("p="):
                raise GraphError("Missing 'p=<n>' header", f"line {lineno}: {raw!r}")
            try:
                p = int(line[2:].strip())
            except ValueError:
                raise GraphError("Invalid node count", f"line {lineno}: {raw!r}")
            continue

        for token, target in (("->", directed), ("--", undirected)):
            if token in line:
                left, right = line.split(token, 1)
                try:
                    target.append((int(left.strip()), int(right.strip())))
                except ValueError:
                    raise GraphError("Invalid edge", f"line {lineno}: {raw!r}")
                break
        else:
            raise GraphError("Unrecognized edge syntax", f"line {lineno}: {raw!r}")

    if p is None:
        raise GraphError("Empty edge list", "expected a 'p=<n>' header")

    return Pdag(p, directed=directed, undirected=undirected)


def read_edge_list(path: Union[str, Path]) -> Pdag:
    """Read an edge-list file into a Pdag."""
    with open(path, "r") as f:
        return parse_edge_list(f.read())


def read_dag(path: Union[str, Path]) -> Dag:
    """Read an edge-list file that must describe a DAG."""
    graph = read_edge_list(path)
    if graph.undirected:
        raise GraphError("Expected a DAG but found undirected edges", str(path))
    return Dag.from_edges(graph.p, graph.directed)


def format_edge_list(graph: Union[Dag, Pdag]) -> str:
    """Render a Dag or Pdag in the edge-list format."""
    lines = [f"p={graph.p}"]
    if isinstance(graph, Dag):
        directed, undirected = sorted(graph.edges), []
    else:
        directed, undirected = sorted(graph.directed), sorted(graph.undirected)
    lines.extend(f"{u} -> {v}" for u, v in directed)
    lines.extend(f"{u} -- {v}" for u, v in undirected)
    return "\n".join(lines) + "\n"


def write_edge_list(graph: Union[Dag, Pdag], path: Union[str, Path]):
    """Write a Dag or Pdag to an edge-list file."""
    with open(path, "w") as f:
        f.write(format_edge_list(graph))
    logger.debug("Wrote edge list with p=%d to %s", graph.p, path)


def edge_dict(graph: Pdag) -> Dict[str, List[List[int]]]:
    """JSON-friendly edge listing."""
    return {
        "directed": [list(e) for e in sorted(graph.directed)],
        "undirected": [list(e) for e in sorted(graph.undirected)],
    }
