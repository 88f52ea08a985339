"""Base class for all conditional-independence testers.

This module defines the canonical query type, the accounting record, and the
abstract tester every backend inherits from. The base class owns
canonicalization, range checks, memoization and the query log, so backends
only implement the decision itself.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Set

from graph import NodeSet, node_set
from utils.errors import CiTestError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class CiQuery:
    """Canonical CI statement u _||_ v | cond.

    Attributes:
        u: Smaller endpoint
        v: Larger endpoint
        cond: Sorted conditioning set, never containing u or v

    """
    u: int
    v: int
    cond: NodeSet = ()

    @classmethod
    def make(cls, u: int, v: int, cond: Iterable[int] = ()) -> "CiQuery":
        """Build the canonical form of a query.

        Endpoints are ordered and the endpoints are dropped from the
        conditioning set.

        Raises:
            CiTestError: If u == v
        """
        u, v = int(u), int(v)
        if u == v:
            raise CiTestError("CI query endpoints must differ", f"u = v = {u}")
        if u > v:
            u, v = v, u
        return cls(u=u, v=v, cond=node_set(c for c in cond if c != u and c != v))

    def nodes(self) -> Set[int]:
        return {self.u, self.v, *self.cond}

    def to_dict(self) -> Dict[str, Any]:
        return {"u": self.u, "v": self.v, "cond": list(self.cond)}

    def __str__(self) -> str:
        cond = ",".join(str(c) for c in self.cond)
        return f"{self.u} _||_ {self.v} | {{{cond}}}"


@dataclass
class CiStats:
    """Query accounting for one tester instance.

    Attributes:
        distinct_queries: Number of unique canonical queries asked
        total_calls: Number of calls including repeats
        query_log: Every canonical query in call order, if logging is enabled

    """
    distinct_queries: int = 0
    total_calls: int = 0
    query_log: Optional[List[CiQuery]] = field(default=None, repr=False)

    def to_dict(self) -> Dict[str, int]:
        return {"distinct_ci": self.distinct_queries, "total_ci": self.total_calls}


class CiTester(ABC):
    """Abstract base class for CI backends.

    Subclasses implement :meth:`decide` and set ``exact`` to False when
    answers are estimated from samples. Callers use :meth:`independent`,
    which canonicalizes, validates, memoizes and counts. One instance is meant
    for one algorithm run; it is not safe for concurrent use.
    """

    name: str = "base"
    exact: bool = True
    description: str = "Base tester"

    def __init__(self, p: int, memoize: bool = True, record_log: bool = True):
        """Initialize the tester.

        Args:
            p: Number of variables; queries must use nodes 0..p-1
            memoize: Cache answers per canonical query
            record_log: Keep every call in the query log
        """
        if p < 0:
            raise CiTestError("Variable count must be non-negative", str(p))
        self.p = p
        self.memoize = memoize
        self.record_log = record_log
        self.logger = logging.getLogger(f"{__name__}.{self.name}")

        self._memo: Dict[CiQuery, bool] = {}
        self._seen: Set[CiQuery] = set()
        self._log: List[CiQuery] = []
        self._calls = 0

    @abstractmethod
    def decide(self, query: CiQuery) -> bool:
        """Return True if the canonical query is judged independent.

        Args:
            query: Canonical, range-checked query

        Returns:
            Independence decision

        Raises:
            CiTestError: If the backend cannot answer
        """
        pass

    def independent(self, u: int, v: int, cond: Iterable[int] = ()) -> bool:
        """Answer u _||_ v | cond with accounting."""
        return self.ask(CiQuery.make(u, v, cond))

    def dependent(self, u: int, v: int, cond: Iterable[int] = ()) -> bool:
        return not self.independent(u, v, cond)

    def ask(self, query: CiQuery) -> bool:
        """Answer an already canonical query with accounting."""
        for node in query.nodes():
            if node < 0 or node >= self.p:
                raise CiTestError("CI query node out of range", f"{node} in {query}")

        self._calls += 1
        self._seen.add(query)
        if self.record_log:
            self._log.append(query)

        if self.memoize and query in self._memo:
            return self._memo[query]

        answer = bool(self.decide(query))
        if self.memoize:
            self._memo[query] = answer
        self.logger.debug("%s -> %s", query, "indep" if answer else "dep")
        return answer

    def stats(self) -> CiStats:
        """Snapshot of the query counts."""
        return CiStats(
            distinct_queries=len(self._seen),
            total_calls=self._calls,
            query_log=list(self._log) if self.record_log else None,
        )

    def asked(self, query: CiQuery) -> bool:
        """Whether a canonical query has been asked at least once."""
        return query in self._seen

    def reset(self):
        """Clear memo, log and counters."""
        self._memo.clear()
        self._seen.clear()
        self._log.clear()
        self._calls = 0

    def __repr__(self) -> str:
        return f"{type(self).__name__}(p={self.p})"
