"""Command-line entry point.

Exit codes: 0 success, 1 internal error, 2 usage or input error. Results go
to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from decimal import ROUND_HALF_UP, Decimal
from typing import Optional, Sequence

from .evaluation import loo_eval
from .io import SchemaConfig, ingest_csv, load_bundle, load_schema_config, read_queries, read_table, save_model
from .model import Kind, build_casebase, validate_query
from .profiler import categorical_profile, numeric_profile
from .retrieval import QueryFailure, RetrievalResult, retrieve, retrieve_batch
from .similarity import synthesize_model

USAGE_ERROR = 2
INTERNAL_ERROR = 1


class UsageError(Exception):
    pass


def fmt4(x: float) -> str:
    """Four decimals, ties rounded away from zero on the shortest decimal repr."""
    return str(Decimal(repr(float(x))).quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP))


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _flush_warnings(caught) -> None:
    for w in caught:
        _err(f"warning: {w.message}")


def _load_config(path: Optional[str]) -> Optional[SchemaConfig]:
    return load_schema_config(path) if path else None


def parse_case_literal(text: str) -> dict[str, str]:
    """Parse ``"STG=0.3,UNS=Low"`` into a dict."""
    out = {}
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "=" not in token:
            raise UsageError(f'malformed query token {token!r}: expected "name=value"')
        name, value = token.split("=", 1)
        name = name.strip()
        if not name or name in out:
            raise UsageError(f'malformed query token {token!r}: expected "name=value" with a unique name')
        out[name] = value.strip()
    if not out:
        raise UsageError('empty query: expected "name=value[,name=value...]"')
    return out


def _print_result(result: RetrievalResult, out=None) -> None:
    out = out or sys.stdout
    print(f"{'rank':>4}  {'case':>6}  {'similarity':>10}  breakdown", file=out)
    for rank, entry in enumerate(result.entries, start=1):
        parts = " ".join(f"{name}={fmt4(s)}" for name, s in entry.breakdown)
        print(f"{rank:>4}  {str(entry.case_id):>6}  {fmt4(entry.similarity):>10}  {parts}", file=out)


def _result_to_dict(result: RetrievalResult) -> dict:
    return {
        "query": dict(result.query.values),
        "entries": [
            {"rank": i, "case_id": e.case_id, "similarity": e.similarity, "breakdown": dict(e.breakdown)}
            for i, e in enumerate(result.entries, start=1)
        ],
    }


def cmd_profile(args) -> int:
    config = _load_config(args.schema)
    records, schema = ingest_csv(args.data, config)
    print(f"{'attribute':<12} {'count':>6} {'mean':>8} {'min':>8} {'max':>8} "
          f"{'Q1':>8} {'Q3':>8} {'IQR':>8} {'range':>8}")
    categorical = []
    for attr in schema:
        if attr.kind is not Kind.NUMERIC:
            categorical.append(attr)
            continue
        column = [attr.parse(r[attr.name]) for r in records]
        p = numeric_profile(column)
        print(f"{attr.name:<12} {p.count:>6} " + " ".join(
            f"{fmt4(v):>8}" for v in (p.mean, p.min, p.max, p.q1, p.q3, p.iqr, p.range)))
        if p.degenerate:
            _err(f"warning: {attr.name}: degenerate spread (IQR={fmt4(p.iqr)}, range={fmt4(p.range)})")
    for attr in categorical:
        inv = categorical_profile(attr.parse(r[attr.name]) for r in records)
        counts = ", ".join(f"{label}: {n}" for label, n in inv.counts)
        print(f"{attr.name} ({attr.kind.value}, {len(inv)} labels): {counts}")
    return 0


def cmd_build(args) -> int:
    config = _load_config(args.schema) or SchemaConfig()
    records, schema = ingest_csv(args.data, config)
    casebase = build_casebase(records, schema, id_column=config.id_column)
    target = args.target_sim if args.target_sim is not None else config.target_at_iqr
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = synthesize_model(casebase, target, config.weights, config.anchor_for(schema))
    _flush_warnings(caught)
    save_model(model, args.out, casebase)
    print(f"{'attribute':<12} {'kind':<12} {'measure':<11} {'degree':>8} {'anchor':>8} {'weight':>7}")
    for attr in model.schema:
        m = model.measures[attr.name]
        degree = fmt4(m.degree) if m.kind == "polynomial" else "-"
        anchor = fmt4(m.anchor_range) if m.kind == "polynomial" else "-"
        print(f"{attr.name:<12} {attr.kind.value:<12} {m.kind:<11} {degree:>8} {anchor:>8} "
              f"{fmt4(model.weights[attr.name]):>7}")
    print(f"wrote {args.out} ({len(casebase)} cases, target similarity at IQR {target})")
    return 0


def _bundle(path):
    model, casebase = load_bundle(path)
    if casebase is None:
        raise UsageError(f"{path} stores no case base; rebuild it with `build`")
    return model, casebase


def cmd_query(args) -> int:
    model, casebase = _bundle(args.model)
    query = validate_query(parse_case_literal(args.case), model.schema)
    _print_result(retrieve(model, casebase, query, args.k))
    return 0


def cmd_retrieve_batch(args) -> int:
    model, casebase = _bundle(args.model)
    results = retrieve_batch(model, casebase, read_queries(args.queries), args.k)
    failures = 0
    for i, result in enumerate(results):
        if isinstance(result, QueryFailure):
            failures += 1
            _err(str(result))
            continue
        print(f"query {i}")
        _print_result(result)
    if args.out:
        doc = [
            {"index": i, "error": str(r.error)} if isinstance(r, QueryFailure) else {"index": i, **_result_to_dict(r)}
            for i, r in enumerate(results)
        ]
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
    return USAGE_ERROR if failures else 0


def cmd_eval(args) -> int:
    model, _ = load_bundle(args.model)
    _, records = read_table(args.data)
    if not records:
        raise UsageError(f"{args.data}: no data rows")
    casebase = build_casebase(records, model.schema)
    if args.k > len(casebase) - 1:
        _err(f"warning: k={args.k} exceeds case base size - 1; using k={len(casebase) - 1}")
    report = loo_eval(model, casebase, args.k, args.label)
    print(f"leave-one-out over {report.n_queries} cases, label {report.label_attr}, k={report.k}")
    print(f"{'method':<16} {'top-1 agreement':>16} {'mean top-1 sim':>15}")
    for score in (report.cbr, report.baseline):
        print(f"{score.name:<16} {fmt4(score.agreement):>16} {fmt4(score.mean_top1_similarity):>15}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=1)
    return 0


def _positive_int(text: str) -> int:
    k = int(text)
    if k < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return k


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cbrsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="print per-attribute statistics")
    p.add_argument("data")
    p.add_argument("--schema")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("build", help="synthesize a similarity model and write it")
    p.add_argument("data")
    p.add_argument("--out", required=True)
    p.add_argument("--schema")
    p.add_argument("--target-sim", type=float, dest="target_sim")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="retrieve the cases most similar to one query")
    p.add_argument("model")
    p.add_argument("--case", required=True, help='e.g. "STG=0.3,UNS=Low"')
    p.add_argument("-k", type=_positive_int, default=5)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("retrieve-batch", help="run every query row of a CSV file")
    p.add_argument("model")
    p.add_argument("queries")
    p.add_argument("-k", type=_positive_int, default=5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_retrieve_batch)

    p = sub.add_parser("eval", help="leave-one-out comparison against a Euclidean k-NN baseline")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--label", required=True)
    p.add_argument("-k", type=_positive_int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, UsageError, OSError) as exc:
        _err(f"error: {exc}")
        return USAGE_ERROR
    except Exception as exc:  # pragma: no cover
        _err(f"internal error: {type(exc).__name__}: {exc}")
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
