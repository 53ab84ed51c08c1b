"""Leave-one-out comparison of the synthesized model against a Euclidean k-NN baseline.

The baseline is deliberately plain: unweighted Euclidean distance over the
numeric attributes, each rescaled to [0, 1] by its observed range. It is a
neutral stand-in for a generic k-NN, not a tuned competitor.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Collection, NamedTuple, Optional

from .errors import InvalidLabel, LabelMissing, NoNumericAttributes
from .model import CaseBase, CaseId, Kind, Query
from .retrieval import retrieve
from .similarity import SimilarityModel


class Neighbor(NamedTuple):
    case_id: CaseId
    distance: float


def _numeric_scales(casebase: CaseBase, names) -> dict[str, tuple[float, float]]:
    scales = {}
    for name in names:
        column = casebase.column(name)
        lo, hi = min(column), max(column)
        # a constant column cannot be rescaled; leave it in raw units
        scales[name] = (lo, hi - lo if hi > lo else 1.0)
    return scales


def euclidean_baseline(
    casebase: CaseBase,
    query: Query,
    k: int = 1,
    exclude: Collection[CaseId] = (),
    _scales: Optional[dict] = None,
) -> list[Neighbor]:
    """Rank cases by range-normalized Euclidean distance to ``query``.

    Only numeric attributes set in the query take part. Ties go to the
    lower case id.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    numeric = [a.name for a in casebase.schema if a.kind is Kind.NUMERIC and a.name in query.values]
    scales = _scales if _scales is not None else _numeric_scales(casebase, numeric)
    if not numeric:
        raise NoNumericAttributes(f"query {dict(query.values)} sets no numeric attribute")
    coords = [(n, (query.values[n] - scales[n][0]) / scales[n][1]) for n in numeric]
    ranked = []
    for case in casebase.cases:
        if case.id in exclude:
            continue
        d = math.sqrt(math.fsum(
            (q - (case.values[n] - scales[n][0]) / scales[n][1]) ** 2 for n, q in coords
        ))
        ranked.append(Neighbor(case.id, d))
    ranked.sort(key=lambda nb: (nb.distance, nb.case_id))
    return ranked[:k]


@dataclass
class QueryRecord:
    case_id: CaseId
    label: str
    cbr_neighbors: list[tuple[CaseId, float]]
    cbr_label: str
    knn_neighbors: list[tuple[CaseId, float]]
    knn_label: str


@dataclass
class MethodScore:
    name: str
    agreement: float
    mean_top1_similarity: float


@dataclass
class EvalReport:
    label_attr: str
    k: int
    n_queries: int
    cbr: MethodScore
    baseline: MethodScore
    records: list[QueryRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def loo_eval(model: SimilarityModel, casebase: CaseBase, k: int = 1, label_attr: str = "UNS") -> EvalReport:
    """Hold each case out, query with its non-label values, and score top-1 label agreement.

    Baseline similarities are reported as ``1 - d / sqrt(m)`` (``m`` numeric
    attributes used), which maps in-range distances into [0, 1].
    """
    names = [a.name for a in casebase.schema]
    if label_attr not in names:
        raise LabelMissing(f"label attribute {label_attr!r} not in schema {names}")
    if casebase.attribute(label_attr).kind is Kind.NUMERIC:
        raise InvalidLabel(f"label attribute {label_attr!r} is numeric; a categorical label is required")
    if len(casebase) < 2:
        raise ValueError("leave-one-out needs at least 2 cases")
    k = min(max(k, 1), len(casebase) - 1)
    features = [n for n in names if n != label_attr]
    numeric = [a.name for a in casebase.schema if a.kind is Kind.NUMERIC and a.name != label_attr]
    scales = _numeric_scales(casebase, numeric)
    norm = math.sqrt(len(numeric)) or 1.0

    records = []
    for case in casebase.cases:
        query = Query({n: case.values[n] for n in features})
        held_out = (case.id,)
        cbr = retrieve(model, casebase, query, k, exclude=held_out)
        knn = euclidean_baseline(casebase, query, k, exclude=held_out, _scales=scales)
        records.append(QueryRecord(
            case_id=case.id,
            label=case.values[label_attr],
            cbr_neighbors=[(e.case_id, e.similarity) for e in cbr.entries],
            cbr_label=casebase[cbr.entries[0].case_id].values[label_attr],
            knn_neighbors=[(nb.case_id, max(0.0, 1.0 - nb.distance / norm)) for nb in knn],
            knn_label=casebase[knn[0].case_id].values[label_attr],
        ))

    n = len(records)
    return EvalReport(
        label_attr=label_attr,
        k=k,
        n_queries=n,
        cbr=MethodScore(
            "cbr",
            sum(r.cbr_label == r.label for r in records) / n,
            math.fsum(r.cbr_neighbors[0][1] for r in records) / n,
        ),
        baseline=MethodScore(
            "euclidean-knn",
            sum(r.knn_label == r.label for r in records) / n,
            math.fsum(r.knn_neighbors[0][1] for r in records) / n,
        ),
        records=records,
    )
