"""Oracle with injected faithfulness violations.

Behaves like the d-separation oracle except for a fixed set of statements
that are reported independent even though the DAG does not imply them. Used
to show which queries an algorithm never asks.
"""

import logging
from typing import FrozenSet, Iterable, Tuple, Union

from citest.base import CiQuery, CiTester
from citest.oracle import oracle_independent
from graph import Dag

logger = logging.getLogger(__name__)

QueryLike = Union[CiQuery, Tuple[int, int, Iterable[int]]]


def _canonical(queries: Iterable[QueryLike]) -> FrozenSet[CiQuery]:
    result = set()
    for q in queries:
        if isinstance(q, CiQuery):
            result.add(CiQuery.make(q.u, q.v, q.cond))
        else:
            u, v, cond = q
            result.add(CiQuery.make(u, v, cond))
    return frozenset(result)


def unfaithful_oracle_independent(dag: Dag, extra_independencies: Iterable[QueryLike],
                                  query: CiQuery) -> bool:
    """True if query is an injected independence, else the d-separation answer."""
    if query in _canonical(extra_independencies):
        return True
    return oracle_independent(dag, query)


class UnfaithfulOracleTester(CiTester):
    """d-separation oracle plus injected independencies."""

    name = "unfaithful"
    description = "d-separation with injected independencies"

    def __init__(self, dag: Dag, extra_independencies: Iterable[QueryLike] = (), **kwargs):
        super().__init__(dag.p, **kwargs)
        self.dag = dag
        self.extra = _canonical(extra_independencies)
        for q in sorted(self.extra):
            if oracle_independent(dag, q):
                logger.warning("Injected independence %s already holds in the DAG", q)

    def decide(self, query: CiQuery) -> bool:
        if query in self.extra:
            return True
        return oracle_independent(self.dag, query)
