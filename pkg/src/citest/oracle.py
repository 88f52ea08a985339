"""Exact d-separation oracle.

Answers CI queries by d-separation in a known DAG, so the implied
distribution is Markov and faithful to that DAG by construction.
"""

from citest.base import CiQuery, CiTester
from graph import Dag, d_separated


def oracle_independent(dag: Dag, query: CiQuery) -> bool:
    """Decide a canonical query by d-separation in dag.

    The stateless core of :class:`OracleTester`; the tester adds memoization
    and counting.
    """
    return d_separated(dag, (query.u,), (query.v,), query.cond)


class OracleTester(CiTester):
    """CI tester backed by a ground-truth DAG."""

    name = "oracle"
    description = "d-separation in a known DAG"

    def __init__(self, dag: Dag, **kwargs):
        super().__init__(dag.p, **kwargs)
        self.dag = dag

    def decide(self, query: CiQuery) -> bool:
        return oracle_independent(self.dag, query)
