"""Case schema, cases, queries and the case base."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    DuplicateId,
    EmptyDataset,
    EmptyQuery,
    InvalidSchema,
    MissingAttribute,
    MissingOrdinalOrder,
    NonFinite,
    NonNumeric,
    UnknownAttribute,
    UnknownCategory,
    at_row,
)

Value = Union[float, str]
CaseId = Union[int, str]


class Kind(str, enum.Enum):
    NUMERIC = "numeric"
    ORDINAL = "ordinal"
    CATEGORICAL = "categorical"

    @property
    def is_categorical(self) -> bool:
        return self is not Kind.NUMERIC


def label_key(label: str) -> str:
    """Comparison key for category labels.

    Whitespace is trimmed and collapsed, ``_`` counts as a space and
    case is ignored, so ``"very_low"`` and ``" Very Low"`` share a key.
    """
    return " ".join(str(label).replace("_", " ").split()).casefold()


def parse_number(raw: Any) -> float:
    if isinstance(raw, bool):
        raise NonNumeric(f"{raw!r} is not a number")
    if isinstance(raw, (int, float)):
        x = float(raw)
    else:
        try:
            x = float(str(raw).strip())
        except ValueError:
            raise NonNumeric(f"{raw!r} is not a number") from None
    if not math.isfinite(x):
        raise NonFinite(f"{raw!r} is not finite")
    return x


@dataclass(frozen=True)
class AttributeSpec:
    """One attribute of the case schema.

    ``ordinal_levels`` is required (and ordered) for ordinal attributes.
    ``labels`` optionally pins the known label set of an unordered
    categorical attribute; when empty any non-blank label is accepted.
    """

    name: str
    kind: Kind = Kind.NUMERIC
    ordinal_levels: tuple[str, ...] = ()
    declared_bounds: Optional[tuple[float, float]] = None
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "ordinal_levels", tuple(str(v) for v in self.ordinal_levels))
        object.__setattr__(self, "labels", tuple(str(v) for v in self.labels))
        if not self.name or not str(self.name).strip():
            raise InvalidSchema("attribute name must be non-empty")
        if self.kind is Kind.ORDINAL:
            if not self.ordinal_levels:
                raise MissingOrdinalOrder(self.name)
            if len(self.ordinal_levels) < 2:
                raise InvalidSchema(f"{self.name}: an ordinal attribute needs at least 2 levels")
            _check_distinct(self.name, self.ordinal_levels)
        elif self.ordinal_levels:
            raise InvalidSchema(f"{self.name}: ordinal_levels given for a {self.kind.value} attribute")
        if self.kind is Kind.CATEGORICAL:
            _check_distinct(self.name, self.labels)
        elif self.labels:
            raise InvalidSchema(f"{self.name}: labels only apply to categorical attributes")
        if self.declared_bounds is not None:
            if self.kind is not Kind.NUMERIC:
                raise InvalidSchema(f"{self.name}: declared_bounds only apply to numeric attributes")
            lo, hi = (parse_number(b) for b in self.declared_bounds)
            if not lo < hi:
                raise InvalidSchema(f"{self.name}: declared_bounds need min < max, got ({lo}, {hi})")
            object.__setattr__(self, "declared_bounds", (lo, hi))

    @property
    def known_labels(self) -> tuple[str, ...]:
        return self.ordinal_levels if self.kind is Kind.ORDINAL else self.labels

    def parse(self, raw: Any) -> Value:
        """Validate one raw value, returning a float or the canonical label."""
        if self.kind is Kind.NUMERIC:
            return parse_number(raw)
        key = label_key(raw)
        known = self.known_labels
        if not known:
            if not key:
                raise UnknownCategory(f"{self.name}: empty label")
            return " ".join(str(raw).split())
        for label in known:
            if label_key(label) == key:
                return label
        raise UnknownCategory(f"{self.name}: {raw!r} is not one of {list(known)}")


def _check_distinct(name: str, labels: Sequence[str]) -> None:
    keys = [label_key(v) for v in labels]
    if any(not k for k in keys):
        raise InvalidSchema(f"{name}: empty category label")
    if len(set(keys)) != len(keys):
        raise InvalidSchema(f"{name}: duplicate category labels in {list(labels)}")


def check_schema(schema: Iterable[AttributeSpec]) -> tuple[AttributeSpec, ...]:
    schema = tuple(schema)
    if not schema:
        raise InvalidSchema("schema has no attributes")
    names = [a.name for a in schema]
    if len(set(names)) != len(names):
        raise InvalidSchema(f"duplicate attribute names in {names}")
    return schema


@dataclass(frozen=True)
class Case:
    id: CaseId
    values: Mapping[str, Value]

    def __post_init__(self):
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))

    def __eq__(self, other):
        if not isinstance(other, Case):
            return NotImplemented
        return self.id == other.id and dict(self.values) == dict(other.values)

    def __hash__(self):
        return hash((self.id, tuple(sorted(self.values.items()))))


@dataclass(frozen=True)
class Query:
    values: Mapping[str, Value]

    def __post_init__(self):
        if not self.values:
            raise EmptyQuery("a query needs at least one attribute")
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))

    def __eq__(self, other):
        if not isinstance(other, Query):
            return NotImplemented
        return dict(self.values) == dict(other.values)

    def __hash__(self):
        return hash(tuple(sorted(self.values.items())))


def validate_case(raw_record: Mapping[str, Any], schema: Sequence[AttributeSpec], case_id: CaseId = 0) -> Case:
    values = {}
    for attr in schema:
        if attr.name not in raw_record:
            raise MissingAttribute(f"missing value for {attr.name!r}")
        values[attr.name] = attr.parse(raw_record[attr.name])
    return Case(case_id, values)


def validate_query(raw: Mapping[str, Any], schema: Sequence[AttributeSpec]) -> Query:
    """Build a (possibly partial) query.

    Blank values and ``None`` mean "not specified". Names outside the
    schema raise :class:`UnknownAttribute`.
    """
    by_name = {a.name: a for a in schema}
    values = {}
    for name, raw_value in raw.items():
        if name not in by_name:
            raise UnknownAttribute(f"unknown attribute {name!r}; expected one of {list(by_name)}")
        if raw_value is None or (isinstance(raw_value, str) and not raw_value.strip()):
            continue
        values[name] = by_name[name].parse(raw_value)
    if not values:
        raise EmptyQuery("a query needs at least one attribute")
    return Query({a.name: values[a.name] for a in schema if a.name in values})


@dataclass(frozen=True)
class CaseBase:
    schema: tuple[AttributeSpec, ...]
    cases: tuple[Case, ...]
    _index: Mapping[CaseId, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        schema = check_schema(self.schema)
        cases = tuple(self.cases)
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "cases", cases)
        index = {}
        for pos, case in enumerate(cases):
            if case.id in index:
                raise DuplicateId(f"duplicate case id {case.id!r}")
            index[case.id] = pos
            if set(case.values) != {a.name for a in schema}:
                raise MissingAttribute(f"case {case.id!r} does not cover the schema")
        object.__setattr__(self, "_index", MappingProxyType(index))

    def __len__(self) -> int:
        return len(self.cases)

    def __iter__(self):
        return iter(self.cases)

    def __getitem__(self, case_id: CaseId) -> Case:
        return self.cases[self._index[case_id]]

    def attribute(self, name: str) -> AttributeSpec:
        for attr in self.schema:
            if attr.name == name:
                return attr
        raise UnknownAttribute(f"unknown attribute {name!r}")

    def column(self, name: str) -> list[Value]:
        self.attribute(name)
        return [c.values[name] for c in self.cases]


def build_casebase(
    records: Sequence[Mapping[str, Any]],
    schema: Sequence[AttributeSpec],
    id_column: Optional[str] = None,
) -> CaseBase:
    """Validate ``records`` into a case base.

    Ids are 0-based row indices unless ``id_column`` names a record key.
    Explicit ids that all look like integers are stored as ints so that
    tie-breaking sorts them numerically.
    """
    if not records:
        raise EmptyDataset("no records to build a case base from")
    schema = check_schema(schema)
    if id_column is not None:
        if any(a.name == id_column for a in schema):
            raise InvalidSchema(f"id column {id_column!r} cannot also be an attribute")
        ids = _explicit_ids(records, id_column)
    else:
        ids = list(range(len(records)))
    cases = []
    seen = set()
    for row, (case_id, record) in enumerate(zip(ids, records)):
        if case_id in seen:
            raise at_row(DuplicateId(f"duplicate case id {case_id!r}"), row)
        seen.add(case_id)
        try:
            cases.append(validate_case(record, schema, case_id))
        except (MissingAttribute, NonNumeric, UnknownCategory) as exc:
            raise at_row(exc, row)
    return CaseBase(schema, tuple(cases))


def _explicit_ids(records, id_column):
    raw = []
    for row, record in enumerate(records):
        if id_column not in record:
            raise at_row(MissingAttribute(f"missing id column {id_column!r}"), row)
        raw.append(str(record[id_column]).strip())
    try:
        return [int(v) for v in raw]
    except ValueError:
        return raw
