"""Local similarity measures derived from data, and their weighted-sum amalgamation.

Numeric attributes get a polynomial decay ``y(d) = max(0, 1 - d/R) ** p``
where ``R`` is the attribute range, so similarity reaches exactly zero at
distance ``R``.  The degree ``p`` is solved in closed form so that the
similarity at a distance of one interquartile range equals a target
value (0.30 by default).  Ordinal attributes use an equidistant table
spanning all of [0, 1]; unordered categories use exact matching.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, NamedTuple, Optional, Union

from .errors import (
    DegenerateSpreadWarning,
    InvalidSchema,
    NoUsableAttributes,
    UnknownAttribute,
    UnknownLevel,
)
from .model import AttributeSpec, Case, CaseBase, Kind, Query, check_schema, label_key
from .profiler import CategoryInventory, StatsProfile, categorical_profile, numeric_profile

DEFAULT_TARGET = 0.30
DEFAULT_DEGREE = 1.0
MIN_DEGREE = 0.1
MAX_DEGREE = 64.0
RATIO_EPS = 1e-6


def _clamp(x, lo, hi):
    return min(max(x, lo), hi)


def _check_target(target: float) -> float:
    target = float(target)
    if not 0.0 < target < 1.0:
        raise ValueError(f"target similarity must lie strictly between 0 and 1, got {target}")
    return target


def raw_degree(ratio: float, target: float = DEFAULT_TARGET) -> float:
    """Unclamped degree making ``(1 - ratio) ** p == target``."""
    return math.log(target) / math.log(1.0 - ratio)


def derive_degree(
    profile: StatsProfile,
    target_at_iqr: float = DEFAULT_TARGET,
    anchor_range: Optional[float] = None,
) -> float:
    """Polynomial degree for which similarity at one IQR equals the target.

    ``anchor_range`` defaults to the observed range. Zero IQR or zero
    range gives the default degree 1.0 and a
    :class:`~cbrsim.errors.DegenerateSpreadWarning`.
    """
    target = _check_target(target_at_iqr)
    span = profile.range if anchor_range is None else anchor_range
    if profile.iqr == 0 or span == 0:
        warnings.warn(
            f"degenerate spread (iqr={profile.iqr}, range={span}); using degree {DEFAULT_DEGREE}",
            DegenerateSpreadWarning,
            stacklevel=2,
        )
        return DEFAULT_DEGREE
    ratio = _clamp(profile.iqr / span, RATIO_EPS, 1.0 - RATIO_EPS)
    return _clamp(raw_degree(ratio, target), MIN_DEGREE, MAX_DEGREE)


@dataclass(frozen=True)
class PolynomialMeasure:
    degree: float
    anchor_range: float
    target_at_iqr: float = DEFAULT_TARGET
    degenerate: bool = False

    kind = "polynomial"

    def __post_init__(self):
        if not self.anchor_range > 0 or not math.isfinite(self.anchor_range):
            raise InvalidSchema(f"anchor_range must be positive and finite, got {self.anchor_range}")
        if not MIN_DEGREE <= self.degree <= MAX_DEGREE:
            raise InvalidSchema(f"degree {self.degree} outside [{MIN_DEGREE}, {MAX_DEGREE}]")
        _check_target(self.target_at_iqr)

    def at_distance(self, d: float) -> float:
        base = 1.0 - abs(d) / self.anchor_range
        if base <= 0.0:
            return 0.0
        return base ** self.degree

    def similarity(self, q: float, c: float) -> float:
        return self.at_distance(q - c)


@dataclass(frozen=True)
class OrdinalTableMeasure:
    levels: tuple[str, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    kind = "ordinal"

    def __post_init__(self):
        levels = tuple(self.levels)
        keys = [label_key(v) for v in levels]
        if len(levels) < 2 or len(set(keys)) != len(keys):
            raise InvalidSchema(f"ordinal table needs >= 2 distinct levels, got {list(levels)}")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "_index", MappingProxyType({k: i for i, k in enumerate(keys)}))

    def index(self, label: str) -> int:
        try:
            return self._index[label_key(label)]
        except KeyError:
            raise UnknownLevel(f"{label!r} is not one of {list(self.levels)}") from None

    def similarity(self, a: str, b: str) -> float:
        steps = abs(self.index(a) - self.index(b))
        return 1.0 - steps / (len(self.levels) - 1)


@dataclass(frozen=True)
class ExactMatchMeasure:
    kind = "exact"

    def similarity(self, a: str, b: str) -> float:
        return 1.0 if label_key(a) == label_key(b) else 0.0


LocalMeasure = Union[PolynomialMeasure, OrdinalTableMeasure, ExactMatchMeasure]
Profile = Union[StatsProfile, CategoryInventory]


def numeric_similarity(measure: PolynomialMeasure, q: float, c: float) -> float:
    return measure.similarity(q, c)


def ordinal_similarity(measure: OrdinalTableMeasure, a: str, b: str) -> float:
    return measure.similarity(a, b)


def exact_match_similarity(a: str, b: str) -> float:
    return ExactMatchMeasure().similarity(a, b)


class GlobalScore(NamedTuple):
    similarity: float
    breakdown: list[tuple[str, float]]


@dataclass(frozen=True)
class SimilarityModel:
    schema: tuple[AttributeSpec, ...]
    profiles: Mapping[str, Profile]
    measures: Mapping[str, LocalMeasure]
    weights: Mapping[str, float]
    target_at_iqr: float = DEFAULT_TARGET

    def __post_init__(self):
        schema = check_schema(self.schema)
        names = [a.name for a in schema]
        object.__setattr__(self, "schema", schema)
        for label, mapping in (("measure", self.measures), ("weight", self.weights)):
            if set(mapping) != set(names):
                raise InvalidSchema(f"every attribute needs exactly one {label}: {sorted(set(mapping) ^ set(names))}")
        weights = {}
        for name in names:
            w = float(self.weights[name])
            if not math.isfinite(w) or w < 0:
                raise InvalidSchema(f"weight for {name!r} must be a non-negative number, got {w}")
            weights[name] = w
        if not any(w > 0 for w in weights.values()):
            raise InvalidSchema("at least one weight must be positive")
        for attr in schema:
            _check_measure_kind(attr, self.measures[attr.name])
        # keep measure/weight iteration in schema order
        object.__setattr__(self, "measures", MappingProxyType({n: self.measures[n] for n in names}))
        object.__setattr__(self, "weights", MappingProxyType(weights))
        object.__setattr__(self, "profiles", MappingProxyType(dict(self.profiles)))

    @property
    def attribute_names(self) -> list[str]:
        return [a.name for a in self.schema]

    def attribute(self, name: str) -> AttributeSpec:
        for attr in self.schema:
            if attr.name == name:
                return attr
        raise UnknownAttribute(f"unknown attribute {name!r}")

    def local_similarity(self, name: str, q, c) -> float:
        return self.measures[name].similarity(q, c)

    def global_similarity(self, query: Query, case: Case) -> GlobalScore:
        return global_similarity(self, query, case)

    def with_weights(self, weights: Mapping[str, float]) -> "SimilarityModel":
        return SimilarityModel(self.schema, self.profiles, self.measures, weights, self.target_at_iqr)


def _check_measure_kind(attr: AttributeSpec, measure: LocalMeasure) -> None:
    expected = {
        Kind.NUMERIC: PolynomialMeasure,
        Kind.ORDINAL: OrdinalTableMeasure,
        Kind.CATEGORICAL: ExactMatchMeasure,
    }[attr.kind]
    if not isinstance(measure, expected):
        raise InvalidSchema(f"{attr.name}: {attr.kind.value} attribute needs a {expected.__name__}")
    if attr.kind is Kind.ORDINAL and [label_key(v) for v in measure.levels] != [
        label_key(v) for v in attr.ordinal_levels
    ]:
        raise InvalidSchema(f"{attr.name}: measure levels differ from the schema's level order")


def global_similarity(model: SimilarityModel, query: Query, case: Case) -> GlobalScore:
    """Weighted mean of local similarities over the attributes the query sets.

    Weights are renormalised over the present attributes, so a query on a
    single attribute scores exactly that attribute's local similarity.
    """
    breakdown = []
    num = []
    den = []
    for name, measure in model.measures.items():
        if name not in query.values:
            continue
        s = measure.similarity(query.values[name], case.values[name])
        breakdown.append((name, s))
        w = model.weights[name]
        if w > 0:
            num.append(w * s)
            den.append(w)
    if not den:
        raise NoUsableAttributes(
            f"query attributes {list(query.values)} all have zero weight (or none are in the model)"
        )
    total = math.fsum(num) / math.fsum(den)
    # rounding can push the ratio one ulp outside the hull of the locals
    used = [s for (name, s) in breakdown if model.weights[name] > 0]
    return GlobalScore(_clamp(total, min(used), max(used)), breakdown)


def synthesize_model(
    casebase: CaseBase,
    target_at_iqr: float = DEFAULT_TARGET,
    weights: Optional[Mapping[str, float]] = None,
    anchor: Union[str, Mapping[str, str]] = "observed",
) -> SimilarityModel:
    """Derive one local measure per attribute from the case base.

    ``anchor`` picks the distance at which numeric similarity hits zero:
    ``"observed"`` uses max - min of the data, ``"declared"`` uses the
    attribute's declared bounds. It may be a per-attribute mapping.
    """
    target = _check_target(target_at_iqr)
    if len(casebase) == 0:
        raise ValueError("cannot synthesize a model from an empty case base")
    weights = dict(weights or {})
    unknown = set(weights) - {a.name for a in casebase.schema}
    if unknown:
        raise UnknownAttribute(f"weights given for unknown attributes {sorted(unknown)}")

    profiles = {}
    measures = {}
    for attr in casebase.schema:
        column = casebase.column(attr.name)
        if attr.kind is Kind.NUMERIC:
            profile = numeric_profile(column)
            span = _anchor_span(attr, profile, anchor)
            degenerate = profile.iqr == 0 or span == 0
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateSpreadWarning)
                degree = derive_degree(profile, target, span)
            if degenerate:
                warnings.warn(
                    f"{attr.name}: degenerate spread (iqr={profile.iqr}, range={span}); "
                    f"using degree {DEFAULT_DEGREE}",
                    DegenerateSpreadWarning,
                    stacklevel=2,
                )
            # a constant column has no observed range; fall back to a unit anchor
            measures[attr.name] = PolynomialMeasure(
                degree, span if span > 0 else 1.0, target, degenerate
            )
        elif attr.kind is Kind.ORDINAL:
            profile = categorical_profile(column)
            measures[attr.name] = OrdinalTableMeasure(attr.ordinal_levels)
        else:
            profile = categorical_profile(column)
            measures[attr.name] = ExactMatchMeasure()
        profiles[attr.name] = profile

    full_weights = {a.name: float(weights.get(a.name, 1.0)) for a in casebase.schema}
    return SimilarityModel(casebase.schema, profiles, measures, full_weights, target)


def _anchor_span(attr: AttributeSpec, profile: StatsProfile, anchor) -> float:
    mode = anchor.get(attr.name, "observed") if isinstance(anchor, Mapping) else anchor
    if mode == "observed":
        return profile.range
    if mode == "declared":
        if attr.declared_bounds is None:
            raise InvalidSchema(f"{attr.name}: anchor 'declared' needs declared_bounds")
        lo, hi = attr.declared_bounds
        return hi - lo
    raise ValueError(f"anchor must be 'observed' or 'declared', got {mode!r}")


def measure_summary(model: SimilarityModel) -> list[dict]:
    """Per-attribute description used by the CLI and reports."""
    rows = []
    for attr in model.schema:
        m = model.measures[attr.name]
        row = {"attribute": attr.name, "kind": attr.kind.value, "measure": m.kind,
               "weight": model.weights[attr.name]}
        if isinstance(m, PolynomialMeasure):
            row.update(degree=m.degree, anchor_range=m.anchor_range, degenerate=m.degenerate)
        elif isinstance(m, OrdinalTableMeasure):
            row.update(levels=list(m.levels))
        rows.append(row)
    return rows


def similarity_table(measure: OrdinalTableMeasure) -> list[list[float]]:
    return [[measure.similarity(a, b) for b in measure.levels] for a in measure.levels]


__all__ = [
    "DEFAULT_TARGET",
    "ExactMatchMeasure",
    "GlobalScore",
    "LocalMeasure",
    "OrdinalTableMeasure",
    "PolynomialMeasure",
    "SimilarityModel",
    "derive_degree",
    "exact_match_similarity",
    "global_similarity",
    "measure_summary",
    "numeric_similarity",
    "ordinal_similarity",
    "raw_degree",
    "similarity_table",
    "synthesize_model",
]
