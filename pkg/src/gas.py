"""Greedy ancestral search.

Learns the essential graph from CI queries by growing a prefix node set S
(a set closed under ancestors) one component at a time. Each expansion
starts from the working set V' = V \\ S and, level by level, removes edges
with conditioning sets of size m, then drops from V' the nodes revealed as
collider descendants (the V set) and the nodes revealed as non-sources by a
separating witness from S (the F set). Whatever survives is the next
component. Edges between components are finally directed from the earlier
component to the later one.

GAS+ keeps the expansion phase and rebuilds the graph with one targeted
query per node pair.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, Iterator, List, Optional, Set, Tuple

from citest.base import CiStats, CiTester
from graph import Edge, NodeSet, Pdag, edge_dict, has_clique_of_size, node_set, pair
from utils.errors import DiscoveryError, log_and_raise

logger = logging.getLogger(__name__)


class SepsetMap:
    """Separating sets of removed edges, keyed by unordered pair."""

    def __init__(self):
        self._sets: Dict[Edge, NodeSet] = {}

    def record(self, u: int, v: int, w) -> None:
        self._sets[pair(u, v)] = node_set(w)

    def get(self, u: int, v: int) -> Optional[NodeSet]:
        return self._sets.get(pair(u, v))

    def residual(self, u: int, v: int, s: Set[int]) -> Optional[NodeSet]:
        """Recorded sepset minus the nodes already in s, or None if absent."""
        found = self.get(u, v)
        if found is None:
            return None
        return tuple(x for x in found if x not in s)

    def pairs(self) -> List[Edge]:
        return sorted(self._sets)

    def items(self) -> Iterator[Tuple[Edge, NodeSet]]:
        return iter(sorted(self._sets.items()))

    def __contains__(self, key) -> bool:
        return pair(*key) in self._sets

    def __len__(self) -> int:
        return len(self._sets)

    def to_dict(self) -> Dict[str, List[int]]:
        return {f"{u},{v}": list(w) for (u, v), w in self.items()}


@dataclass
class PrefixState:
    """Working state of the expansion loop.

    Attributes:
        s: Current prefix node set
        components: Components found so far, in order
        working: Working set V' of the current expansion
        level: Current conditioning-set size
    """
    s: Set[int] = field(default_factory=set)
    components: List[NodeSet] = field(default_factory=list)
    working: Set[int] = field(default_factory=set)
    level: int = 0

    def fold(self, component: NodeSet):
        self.components.append(component)
        self.s.update(component)


@dataclass
class LevelTrace:
    """What one level of one expansion did."""
    level: int
    removed: List[Tuple[Edge, NodeSet]]
    v_set: NodeSet
    f_set: NodeSet
    working: NodeSet

    def to_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "removed": [{"edge": list(e), "sepset": list(w)} for e, w in self.removed],
            "v_set": list(self.v_set),
            "f_set": list(self.f_set),
            "working": list(self.working),
        }


@dataclass
class ExpansionTrace:
    """One prefix expansion: starting prefix, per-level records, resulting component."""
    prefix: NodeSet
    levels: List[LevelTrace] = field(default_factory=list)
    component: NodeSet = ()

    def level(self, m: int) -> Optional[LevelTrace]:
        for record in self.levels:
            if record.level == m:
                return record
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "prefix": list(self.prefix),
            "component": list(self.component),
            "levels": [lv.to_dict() for lv in self.levels],
        }


@dataclass
class GasResult:
    """Output of a discovery run.

    Attributes:
        graph: Learned partially directed graph
        components: Ordered components (empty for PC)
        ci: Query accounting of the tester used
        max_level: Largest conditioning-set size level executed
        expansions: Per-expansion trace (GAS variants only)
        sepsets: Separating sets of removed edges
    """
    graph: Pdag
    components: List[NodeSet]
    ci: CiStats
    max_level: int
    expansions: List[ExpansionTrace] = field(default_factory=list)
    sepsets: SepsetMap = field(default_factory=SepsetMap)

    def to_dict(self, include_trace: bool = False) -> Dict[str, Any]:
        data = {
            "p": self.graph.p,
            "edges": edge_dict(self.graph),
            "components": [list(c) for c in self.components],
            "distinct_ci": self.ci.distinct_queries,
            "total_ci": self.ci.total_calls,
            "max_level": self.max_level,
        }
        if include_trace:
            data["expansions"] = [e.to_dict() for e in self.expansions]
        return data


# ============================================================================
# Subroutines
# ============================================================================

def remove_edges(E: Pdag, S, Vp, m: int, tester: CiTester, sepsets: SepsetMap
                 ) -> List[Tuple[Edge, NodeSet]]:
    """Remove edges touching V' that a size-m subset of V' separates given S.

    Pairs (a, b), a < b, adjacent in E with at least one endpoint in V' are
    scanned in ascending order. For each, subsets W of V' \\ {a, b} with
    |W| = m are tried in lexicographic order; the first W with
    a _||_ b | S u W deletes the edge and is recorded as its sepset.

    Args:
        E: Working graph, modified in place
        S: Prefix node set
        Vp: Working set V'
        m: Subset size
        tester: CI backend
        sepsets: Sepset map, updated in place

    Returns:
        The (edge, sepset) pairs removed, in removal order
    """
    s_set, vp = set(S), set(Vp)
    removed = []
    candidates = sorted(pair(a, b) for a, b in E.skeleton() if a in vp or b in vp)

    for a, b in candidates:
        others = sorted(vp - {a, b})
        if len(others) < m:
            continue
        for w in combinations(others, m):
            if tester.independent(a, b, s_set.union(w)):
                E.remove_edge(a, b)
                sepsets.record(a, b, w)
                removed.append(((a, b), w))
                break

    return removed


def compute_v_set(E: Pdag, S, Vp, m: int, tester: CiTester, sepsets: SepsetMap,
                  recheck: bool = False, votes: Optional[Counter] = None) -> NodeSet:
    """Nodes of V' shown to be colliders or collider descendants at level m.

    Stage 1 scans removed pairs with an endpoint in V' whose sepset, minus S,
    has size m: a common neighbour in V' outside the sepset is a collider and
    the pair joins P. Stage 2 adds, for each pair in P, any other w in V'
    that makes the pair dependent when added to the conditioning set.

    Args:
        E: Working graph after this level's removals
        S: Prefix node set
        Vp: Working set V'
        m: Level
        tester: CI backend
        sepsets: Recorded sepsets
        recheck: Skip pairs that S u residual no longer separates. Sepsets
            found under a smaller prefix are trusted otherwise.
        votes: If given, incremented once per witness pair naming a node

    Returns:
        The V set, sorted
    """
    s_set, vp = set(S), set(Vp)
    found: Set[int] = set()
    colliding = []

    for a, b in sepsets.pairs():
        if a not in vp and b not in vp:
            continue
        residual = sepsets.residual(a, b, s_set)
        if len(residual) != m:
            continue
        colliders = sorted(w for w in E.neighbors(a) & E.neighbors(b) & vp if w not in residual)
        if not colliders:
            continue
        if recheck and not tester.independent(a, b, s_set.union(residual)):
            continue
        colliding.append((a, b, residual))
        found.update(colliders)
        if votes is not None:
            votes.update(colliders)

    for a, b, residual in colliding:
        for w in sorted(vp - found - {a, b} - set(residual)):
            if tester.dependent(a, b, s_set.union(residual, (w,))):
                found.add(w)
                if votes is not None:
                    votes[w] += 1

    return node_set(found)


def compute_f_set(S, Vp, m: int, tester: CiTester, sepsets: SepsetMap,
                  votes: Optional[Counter] = None) -> NodeSet:
    """Nodes of V' separated from some u in S by a size-m subset of V'.

    Only pairs (u, v), u in S and v in V', whose recorded sepset still
    reaches outside S and which are dependent given S alone are scanned.
    For those, W ranges over size-m subsets of V' \\ {v}; independence of
    u and v given S u W puts v in the set.
    """
    s_set, vp = set(S), set(Vp)
    found: Set[int] = set()

    for u in sorted(s_set):
        for v in sorted(vp - found):
            residual = sepsets.residual(u, v, s_set)
            if not residual:
                continue
            if tester.independent(u, v, s_set):
                continue
            for w in combinations(sorted(vp - {v}), m):
                if tester.independent(u, v, s_set.union(w)):
                    found.add(v)
                    if votes is not None:
                        votes[v] += 1
                    break

    return node_set(found)


# ============================================================================
# Main loops
# ============================================================================

def check_tester(tester: CiTester, p: int):
    """Fail fast when a tester covers a different variable count than the run."""
    if p < 0:
        log_and_raise(DiscoveryError, "Variable count must be non-negative", str(p))
    if tester.p != p:
        log_and_raise(DiscoveryError, "Tester and problem size disagree",
                      f"tester has {tester.p} variables, run asked for {p}")


def _fewest_votes(candidates: Set[int], votes: Counter) -> NodeSet:
    """Nodes of candidates named by the fewest exclusion witnesses."""
    least = min(votes[v] for v in candidates)
    return node_set(v for v in candidates if votes[v] == least)


def _expand(tester: CiTester, p: int):
    """Run the prefix-expansion phase shared by GAS and GAS+."""
    check_tester(tester, p)
    E = Pdag.complete(p)
    sepsets = SepsetMap()
    state = PrefixState()
    expansions: List[ExpansionTrace] = []
    max_level = 0
    everything = set(range(p))
    recheck = not tester.exact

    while len(state.s) < p:
        state.working = everything - state.s
        state.level = 0
        trace = ExpansionTrace(prefix=node_set(state.s))
        component: Optional[NodeSet] = None
        logger.debug("Expansion %d from prefix %s", len(expansions) + 1, trace.prefix)

        while has_clique_of_size(E, state.working, state.level):
            m = state.level
            before = set(state.working)
            votes: Counter = Counter()
            removed = remove_edges(E, state.s, state.working, m, tester, sepsets)

            v_set = compute_v_set(E, state.s, state.working, m, tester, sepsets,
                                  recheck=recheck, votes=votes)
            state.working -= set(v_set)

            f_set: NodeSet = ()
            if m > 0 and state.working:
                f_set = compute_f_set(state.s, state.working, m, tester, sepsets, votes=votes)
                state.working -= set(f_set)

            trace.levels.append(LevelTrace(level=m, removed=removed, v_set=v_set,
                                           f_set=f_set, working=node_set(state.working)))
            logger.debug("  level %d: removed %d edges, V=%s, F=%s, V'=%s",
                         m, len(removed), v_set, f_set, node_set(state.working))
            max_level = max(max_level, m)

            if not state.working:
                component = _fewest_votes(before, votes)
                logger.warning("Level %d excluded every remaining node; keeping %s, "
                               "named by the fewest witnesses", m, component)
                break
            state.level += 1

        if component is None:
            component = node_set(state.working)
        trace.component = component
        expansions.append(trace)
        state.fold(component)

    return E, state.components, sepsets, expansions, max_level


def run_gas(tester: CiTester, p: int) -> GasResult:
    """Learn the essential graph with greedy ancestral search.

    Args:
        tester: CI backend over nodes 0..p-1
        p: Number of variables

    Returns:
        GasResult with the learned graph and its component order
    """
    E, components, sepsets, expansions, max_level = _expand(tester, p)

    rank = {v: i for i, comp in enumerate(components) for v in comp}
    graph = Pdag(p)
    for a, b in sorted(E.skeleton()):
        if rank[a] == rank[b]:
            graph.add_undirected(a, b)
        elif rank[a] < rank[b]:
            graph.add_directed(a, b)
        else:
            graph.add_directed(b, a)

    stats = tester.stats()
    logger.info("GAS finished: %d components, %d edges, %d distinct CI tests, max level %d",
                len(components), graph.num_edges(), stats.distinct_queries, max_level)
    return GasResult(graph=graph, components=components, ci=stats, max_level=max_level,
                     expansions=expansions, sepsets=sepsets)


def run_gas_plus(tester: CiTester, p: int) -> GasResult:
    """GAS with the final orientation replaced by targeted re-testing.

    Within component i, v - w is kept iff v and w are dependent given the
    union of components 1..i; across components i < j, v -> w is kept iff
    they are dependent given the union of components 1..j.
    """
    _, components, sepsets, expansions, max_level = _expand(tester, p)

    prefixes: List[Set[int]] = []
    acc: Set[int] = set()
    for comp in components:
        acc = acc | set(comp)
        prefixes.append(acc)

    graph = Pdag(p)
    for i, comp in enumerate(components):
        for v, w in combinations(comp, 2):
            if tester.dependent(v, w, prefixes[i] - {v, w}):
                graph.add_undirected(v, w)
        for j in range(i + 1, len(components)):
            for v in comp:
                for w in components[j]:
                    if tester.dependent(v, w, prefixes[j] - {v, w}):
                        graph.add_directed(v, w)

    stats = tester.stats()
    logger.info("GAS+ finished: %d components, %d edges, %d distinct CI tests, max level %d",
                len(components), graph.num_edges(), stats.distinct_queries, max_level)
    return GasResult(graph=graph, components=components, ci=stats, max_level=max_level,
                     expansions=expansions, sepsets=sepsets)
