"""Order-independent PC baseline.

Skeleton search uses adjacency sets frozen at the start of each level, so
the removed edges do not depend on the scan order. V-structures are then
oriented from the recorded sepsets and the Meek rules complete the graph.
"""

import logging
from itertools import combinations
from typing import Dict, Set

from citest.base import CiTester
from cpdag import meek_closure
from gas import GasResult, SepsetMap, check_tester
from graph import Pdag

logger = logging.getLogger(__name__)


def _skeleton(tester: CiTester, p: int):
    check_tester(tester, p)
    E = Pdag.complete(p)
    sepsets = SepsetMap()
    level = 0
    max_level = 0

    while True:
        adjacency: Dict[int, Set[int]] = {v: set(E.neighbors(v)) for v in range(p)}
        if not any(len(adjacency[a]) - 1 >= level or len(adjacency[b]) - 1 >= level
                   for a, b in E.skeleton()):
            break

        removed = 0
        for a, b in sorted(E.skeleton()):
            done = False
            for x, y in ((a, b), (b, a)):
                candidates = sorted(adjacency[x] - {y})
                for w in combinations(candidates, level):
                    if tester.independent(a, b, w):
                        E.remove_edge(a, b)
                        sepsets.record(a, b, w)
                        removed += 1
                        done = True
                        break
                if done:
                    break

        logger.debug("PC level %d removed %d edges", level, removed)
        max_level = level
        level += 1

    return E, sepsets, max_level


def run_pc(tester: CiTester, p: int) -> GasResult:
    """Run PC-stable and return the learned graph.

    Args:
        tester: CI backend over nodes 0..p-1
        p: Number of variables

    Returns:
        GasResult with an empty component list
    """
    E, sepsets, max_level = _skeleton(tester, p)

    graph = E.copy()
    for (u, v), sepset in sepsets.items():
        for w in sorted(E.neighbors(u) & E.neighbors(v)):
            if w in sepset:
                continue
            for x in (u, v):
                if graph.is_directed(w, x):
                    logger.warning("Conflicting v-structure at %d: overriding %d -> %d", w, w, x)
                graph.orient(x, w)

    graph = meek_closure(graph, strict=False)
    stats = tester.stats()
    logger.info("PC finished: %d edges, %d distinct CI tests, max level %d",
                graph.num_edges(), stats.distinct_queries, max_level)
    return GasResult(graph=graph, components=[], ci=stats, max_level=max_level, sepsets=sepsets)
