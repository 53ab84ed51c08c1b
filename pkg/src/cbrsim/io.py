"""Tabular ingestion, schema config files and model persistence.

Model files are JSON documents::

    {
      "format_version": 1,
      "target_at_iqr": 0.3,
      "attributes": [
        {"name": "STG", "kind": "numeric", "declared_bounds": null, "weight": 1.0,
         "profile": {"count": 403, "mean": ..., "min": ..., "max": ..., "q1": ...,
                     "q3": ..., "iqr": ..., "range": ...},
         "measure": {"type": "polynomial", "degree": ..., "anchor_range": ...,
                     "target_at_iqr": 0.3, "degenerate": false}},
        {"name": "UNS", "kind": "ordinal", "levels": ["Very Low", ...], "weight": 1.0,
         "profile": {"counts": [["Very Low", 50], ...]},
         "measure": {"type": "ordinal", "levels": ["Very Low", ...]}}
      ],
      "casebase": {"cases": [{"id": 0, "values": {"STG": 0.0, ...}}, ...]}
    }

Floats are written with ``repr`` precision, so a save/load round trip
reproduces every parameter bit for bit.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

from .errors import (
    CBRError,
    EmptyDataset,
    InvalidSchema,
    MalformedRow,
    MissingOrdinalOrder,
    NonNumeric,
    SchemaCorruption,
    UnknownAttribute,
    VersionMismatch,
)
from .model import AttributeSpec, Case, CaseBase, Kind, check_schema, label_key, parse_number
from .profiler import CategoryInventory, StatsProfile
from .similarity import (
    DEFAULT_TARGET,
    ExactMatchMeasure,
    OrdinalTableMeasure,
    PolynomialMeasure,
    SimilarityModel,
)

FORMAT_VERSION = 1
CONFIG_VERSION = 1

PathLike = Union[str, "os.PathLike[str]"]


# --- schema config -----------------------------------------------------------


@dataclass(frozen=True)
class AttributeOverride:
    kind: Optional[Kind] = None
    levels: tuple[str, ...] = ()
    weight: Optional[float] = None
    declared_bounds: Optional[tuple[float, float]] = None
    anchor: Optional[str] = None


@dataclass(frozen=True)
class SchemaConfig:
    """User overrides on top of the inferred schema.

    JSON layout (every key optional)::

        {"format_version": 1, "id_column": null, "target_at_iqr": 0.3,
         "anchor": "observed",
         "attributes": {"UNS": {"kind": "ordinal",
                                "levels": ["Very Low", "Low", "Middle", "High"]},
                        "STG": {"weight": 2.0, "declared_bounds": [0, 1],
                                "anchor": "declared"}}}
    """

    attributes: Mapping[str, AttributeOverride] = field(default_factory=dict)
    id_column: Optional[str] = None
    target_at_iqr: float = DEFAULT_TARGET
    anchor: str = "observed"

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "SchemaConfig":
        version = raw.get("format_version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise VersionMismatch(f"schema config format_version {version!r} unsupported (want {CONFIG_VERSION})")
        unknown = set(raw) - {"format_version", "id_column", "target_at_iqr", "anchor", "attributes"}
        if unknown:
            raise InvalidSchema(f"unknown schema config keys {sorted(unknown)}")
        overrides = {}
        for name, spec in (raw.get("attributes") or {}).items():
            extra = set(spec) - {"kind", "levels", "weight", "declared_bounds", "anchor"}
            if extra:
                raise InvalidSchema(f"{name}: unknown keys {sorted(extra)}")
            try:
                kind = Kind(spec["kind"]) if "kind" in spec else None
            except ValueError:
                raise InvalidSchema(
                    f"{name}: kind must be one of {[k.value for k in Kind]}, got {spec['kind']!r}"
                ) from None
            bounds = spec.get("declared_bounds")
            overrides[name] = AttributeOverride(
                kind=kind,
                levels=tuple(spec.get("levels") or ()),
                weight=None if spec.get("weight") is None else float(spec["weight"]),
                declared_bounds=None if bounds is None else (bounds[0], bounds[1]),
                anchor=spec.get("anchor"),
            )
        return cls(
            attributes=overrides,
            id_column=raw.get("id_column"),
            target_at_iqr=float(raw.get("target_at_iqr", DEFAULT_TARGET)),
            anchor=raw.get("anchor", "observed"),
        )

    @property
    def weights(self) -> dict[str, float]:
        return {n: o.weight for n, o in self.attributes.items() if o.weight is not None}

    @property
    def anchors(self) -> dict[str, str]:
        return {n: o.anchor for n, o in self.attributes.items() if o.anchor is not None}

    def anchor_for(self, schema: Sequence[AttributeSpec]) -> dict[str, str]:
        return {a.name: self.anchors.get(a.name, self.anchor) for a in schema if a.kind is Kind.NUMERIC}

    def apply(self, schema: Sequence[AttributeSpec]) -> tuple[AttributeSpec, ...]:
        names = {a.name for a in schema}
        missing = set(self.attributes) - names
        if missing:
            raise UnknownAttribute(f"schema config names columns not in the data: {sorted(missing)}")
        out = []
        for attr in schema:
            o = self.attributes.get(attr.name)
            if o is None:
                out.append(attr)
                continue
            kind = o.kind or attr.kind
            if kind is Kind.ORDINAL and not o.levels:
                raise MissingOrdinalOrder(attr.name)
            out.append(
                AttributeSpec(
                    attr.name,
                    kind,
                    ordinal_levels=o.levels if kind is Kind.ORDINAL else (),
                    declared_bounds=o.declared_bounds if kind is Kind.NUMERIC else None,
                    labels=(o.levels or attr.labels) if kind is Kind.CATEGORICAL else (),
                )
            )
        return tuple(out)


def load_schema_config(path: PathLike) -> SchemaConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidSchema(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise InvalidSchema(f"{path}: expected a JSON object")
    return SchemaConfig.from_dict(raw)


# --- tabular ingestion --------------------------------------------------------


def read_table(path: PathLike) -> tuple[list[str], list[dict[str, str]]]:
    """Read a header-first CSV into a header and a list of row dicts.

    Header names are trimmed. Completely blank lines are skipped; any other
    row with the wrong field count raises :class:`MalformedRow` carrying the
    1-based line number.
    """
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = None
        rows = []
        for row in reader:
            if not any(cell.strip() for cell in row):
                continue
            if header is None:
                header = [h.strip() for h in row]
                if len(set(header)) != len(header) or not all(header):
                    raise InvalidSchema(f"{path}: header has blank or duplicate names: {header}")
                continue
            if len(row) != len(header):
                raise MalformedRow(reader.line_num, len(header), len(row))
            rows.append(dict(zip(header, row)))
    if header is None:
        raise EmptyDataset(f"{path}: file is empty")
    return header, rows


def infer_schema(records: Sequence[Mapping[str, Any]], columns: Optional[Sequence[str]] = None) -> list[AttributeSpec]:
    """Numeric iff every non-blank value parses as a number, else categorical.

    Categorical columns record their distinct labels (first spelling
    seen wins). Ordinality can only come from a :class:`SchemaConfig`.
    """
    if columns is None:
        columns = list(records[0]) if records else []
    schema = []
    for name in columns:
        present = [r[name] for r in records if str(r.get(name, "")).strip()]
        if present and _all_numeric(present):
            schema.append(AttributeSpec(name, Kind.NUMERIC))
            continue
        labels = {}
        for v in present:
            labels.setdefault(label_key(v), " ".join(str(v).split()))
        schema.append(AttributeSpec(name, Kind.CATEGORICAL, labels=tuple(labels.values())))
    return schema


def _all_numeric(values) -> bool:
    try:
        for v in values:
            parse_number(v)
    except NonNumeric:
        return False
    return True


def ingest_csv(path: PathLike, config: Optional[SchemaConfig] = None):
    """Load ``path`` and return ``(records, schema)``.

    The id column named in ``config`` (if any) is left out of the schema.
    """
    header, records = read_table(path)
    if not records:
        raise EmptyDataset(f"{path}: header but no data rows")
    columns = list(header)
    if config is not None and config.id_column is not None:
        if config.id_column not in columns:
            raise UnknownAttribute(f"id column {config.id_column!r} not in header {header}")
        columns.remove(config.id_column)
    schema = infer_schema(records, columns)
    if config is not None:
        schema = list(config.apply(schema))
    return records, schema


def read_queries(path: PathLike) -> list[dict[str, str]]:
    """Query table: same header convention, blank cells mean "not set"."""
    _, rows = read_table(path)
    return rows


# --- model files ----------------------------------------------------------------


def _profile_to_dict(profile) -> dict:
    if isinstance(profile, StatsProfile):
        return {k: getattr(profile, k) for k in ("count", "mean", "min", "max", "q1", "q3", "iqr", "range")}
    return {"counts": [[label, n] for label, n in profile.counts]}


def _measure_to_dict(measure) -> dict:
    if isinstance(measure, PolynomialMeasure):
        return {
            "type": "polynomial",
            "degree": measure.degree,
            "anchor_range": measure.anchor_range,
            "target_at_iqr": measure.target_at_iqr,
            "degenerate": measure.degenerate,
        }
    if isinstance(measure, OrdinalTableMeasure):
        return {"type": "ordinal", "levels": list(measure.levels)}
    return {"type": "exact"}


def model_to_dict(model: SimilarityModel, casebase: Optional[CaseBase] = None) -> dict:
    attributes = []
    for attr in model.schema:
        entry = {"name": attr.name, "kind": attr.kind.value}
        if attr.kind is Kind.NUMERIC:
            entry["declared_bounds"] = list(attr.declared_bounds) if attr.declared_bounds else None
        elif attr.kind is Kind.ORDINAL:
            entry["levels"] = list(attr.ordinal_levels)
        else:
            entry["labels"] = list(attr.labels)
        entry["weight"] = model.weights[attr.name]
        if attr.name in model.profiles:
            entry["profile"] = _profile_to_dict(model.profiles[attr.name])
        entry["measure"] = _measure_to_dict(model.measures[attr.name])
        attributes.append(entry)
    doc = {"format_version": FORMAT_VERSION, "target_at_iqr": model.target_at_iqr, "attributes": attributes}
    if casebase is not None:
        doc["casebase"] = {"cases": [{"id": c.id, "values": dict(c.values)} for c in casebase.cases]}
    return doc


def save_model(model: SimilarityModel, path: PathLike, casebase: Optional[CaseBase] = None) -> None:
    """Write ``model`` (and optionally the case base it queries) to ``path``."""
    text = json.dumps(model_to_dict(model, casebase), indent=1, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _attr_from_dict(entry) -> AttributeSpec:
    kind = Kind(entry["kind"])
    bounds = entry.get("declared_bounds")
    return AttributeSpec(
        entry["name"],
        kind,
        ordinal_levels=tuple(entry.get("levels") or ()) if kind is Kind.ORDINAL else (),
        declared_bounds=tuple(bounds) if bounds else None,
        labels=tuple(entry.get("labels") or ()) if kind is Kind.CATEGORICAL else (),
    )


def _profile_from_dict(kind: Kind, raw):
    if kind is Kind.NUMERIC:
        profile = StatsProfile(
            count=int(raw["count"]),
            **{k: float(raw[k]) for k in ("mean", "min", "max", "q1", "q3", "iqr", "range")},
        )
        problems = profile.check()
        if problems:
            raise SchemaCorruption(f"profile invariants violated: {', '.join(problems)}")
        return profile
    return CategoryInventory(tuple((str(label), int(n)) for label, n in raw["counts"]))


def _measure_from_dict(raw):
    kind = raw["type"]
    if kind == "polynomial":
        return PolynomialMeasure(
            float(raw["degree"]),
            float(raw["anchor_range"]),
            float(raw["target_at_iqr"]),
            bool(raw.get("degenerate", False)),
        )
    if kind == "ordinal":
        return OrdinalTableMeasure(tuple(raw["levels"]))
    if kind == "exact":
        return ExactMatchMeasure()
    raise SchemaCorruption(f"unknown measure type {kind!r}")


def model_from_dict(doc: Mapping[str, Any]) -> tuple[SimilarityModel, Optional[CaseBase]]:
    version = doc.get("format_version") if isinstance(doc, Mapping) else None
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"model format_version {version!r} unsupported (want {FORMAT_VERSION})")
    try:
        schema, profiles, measures, weights = [], {}, {}, {}
        for entry in doc["attributes"]:
            attr = _attr_from_dict(entry)
            schema.append(attr)
            if "profile" in entry:
                profiles[attr.name] = _profile_from_dict(attr.kind, entry["profile"])
            measures[attr.name] = _measure_from_dict(entry["measure"])
            weights[attr.name] = entry["weight"]
        schema = check_schema(schema)
        model = SimilarityModel(schema, profiles, measures, weights, float(doc["target_at_iqr"]))
        casebase = None
        if doc.get("casebase") is not None:
            cases = []
            for raw in doc["casebase"]["cases"]:
                values = raw["values"]
                if set(values) != {a.name for a in schema}:
                    raise SchemaCorruption(f"case {raw['id']!r} does not match the schema")
                cases.append(Case(raw["id"], {a.name: a.parse(values[a.name]) for a in schema}))
            casebase = CaseBase(schema, tuple(cases))
    except SchemaCorruption:
        raise
    except (CBRError, KeyError, TypeError, ValueError, IndexError) as exc:
        raise SchemaCorruption(f"invalid model file: {type(exc).__name__}: {exc}") from exc
    return model, casebase


def load_bundle(path: PathLike) -> tuple[SimilarityModel, Optional[CaseBase]]:
    """Load a model file, returning the model and its stored case base (if any)."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaCorruption(f"{path}: not valid JSON ({exc})") from None
    return model_from_dict(doc)


def load_model(path: PathLike) -> SimilarityModel:
    return load_bundle(path)[0]
