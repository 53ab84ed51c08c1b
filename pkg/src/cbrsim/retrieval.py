"""Top-k retrieval by global similarity (full linear scan)."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Any, Collection, Mapping, NamedTuple, Optional, Sequence, Union

from .errors import CBRError, EmptyCaseBase
from .model import CaseBase, CaseId, Query, validate_query
from .similarity import SimilarityModel, global_similarity


class Entry(NamedTuple):
    case_id: CaseId
    similarity: float
    breakdown: list[tuple[str, float]]


@dataclass(frozen=True)
class RetrievalResult:
    entries: tuple[Entry, ...]
    query: Query

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def ids(self) -> list[CaseId]:
        return [e.case_id for e in self.entries]

    def rank_of(self, case_id: CaseId) -> Optional[int]:
        """Competition rank (1 = best; tied scores share a rank), None if absent."""
        for e in self.entries:
            if e.case_id == case_id:
                return 1 + sum(1 for o in self.entries if o.similarity > e.similarity)
        return None


def ranking_key(entry: Entry):
    return (-entry.similarity, entry.case_id)


def retrieve(
    model: SimilarityModel,
    casebase: CaseBase,
    query: Query,
    k: int = 5,
    exclude: Collection[CaseId] = (),
) -> RetrievalResult:
    """Return the ``k`` cases most similar to ``query``.

    Entries are ordered by similarity descending, then case id ascending.
    Cases whose id is in ``exclude`` are skipped (used by leave-one-out).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(casebase) == 0:
        raise EmptyCaseBase("case base is empty")
    scored = []
    for case in casebase.cases:
        if case.id in exclude:
            continue
        score = global_similarity(model, query, case)
        scored.append(Entry(case.id, score.similarity, score.breakdown))
    return RetrievalResult(tuple(heapq.nsmallest(k, scored, key=ranking_key)), query)


@dataclass(frozen=True)
class QueryFailure:
    index: int
    error: Exception

    def __str__(self):
        return f"query {self.index}: {self.error}"


def retrieve_batch(
    model: SimilarityModel,
    casebase: CaseBase,
    queries: Sequence[Union[Query, Mapping[str, Any]]],
    k: int = 5,
) -> list[Union[RetrievalResult, QueryFailure]]:
    """Retrieve for each query in order.

    Raw mappings are validated against the model schema first. A query
    that fails yields a :class:`QueryFailure` in its slot and the batch
    carries on.
    """
    results = []
    for i, q in enumerate(queries):
        try:
            if not isinstance(q, Query):
                q = validate_query(q, model.schema)
            results.append(retrieve(model, casebase, q, k))
        except CBRError as exc:
            results.append(QueryFailure(i, exc))
    return results
