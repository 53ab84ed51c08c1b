#!/usr/bin/env python3
"""Convert the UCI User Knowledge Modeling workbook into one plain CSV.

The UCI download ships an Excel workbook with a training sheet (258 rows)
and a test sheet (145 rows). This writes their concatenation, training
rows first, with the header ``STG,SCG,STR,LPR,PEG,UNS``.

Usage::

    # straight from the workbook (needs pandas + xlrd)
    python scripts/convert_ukm.py user_modeling_workbook.xls \
        -o data/user_knowledge_modeling.csv

    # or from the two sheets already exported as CSV
    python scripts/convert_ukm.py train.csv test.csv -o data/user_knowledge_modeling.csv
"""

import argparse
import csv
import sys

COLUMNS = ["STG", "SCG", "STR", "LPR", "PEG", "UNS"]
EXPECTED = {"train": 258, "test": 145}


def _pick(header, row):
    index = {h.strip().upper(): i for i, h in enumerate(header)}
    missing = [c for c in COLUMNS if c not in index]
    if missing:
        raise SystemExit(f"columns {missing} not found in header {header}")
    return [str(row[index[c]]).strip() for c in COLUMNS]


def _rows_from_table(header, rows):
    out = []
    for row in rows:
        if not any(str(v).strip() for v in row[: len(header)]):
            continue
        picked = _pick(header, row)
        if not all(picked):
            continue
        out.append(picked)
    return out


def read_csv_sheet(path):
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return _rows_from_table(header, list(reader))


def read_workbook(path):
    import pandas as pd  # only needed for the workbook route

    sheets = pd.read_excel(path, sheet_name=None, dtype=str)
    found = {}
    for name, frame in sheets.items():
        key = "train" if "train" in name.lower() else "test" if "test" in name.lower() else None
        if key is None:
            continue
        frame = frame.fillna("")
        found[key] = _rows_from_table(list(frame.columns), frame.values.tolist())
    if set(found) != {"train", "test"}:
        raise SystemExit(f"expected a training and a test sheet, found {list(sheets)}")
    return found["train"], found["test"]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("inputs", nargs="+", help="workbook, or training CSV then test CSV")
    parser.add_argument("-o", "--out", required=True)
    args = parser.parse_args(argv)

    if len(args.inputs) == 1:
        train, test = read_workbook(args.inputs[0])
    elif len(args.inputs) == 2:
        train, test = (read_csv_sheet(p) for p in args.inputs)
    else:
        parser.error("give one workbook or two CSV files")

    for key, rows in (("train", train), ("test", test)):
        if len(rows) != EXPECTED[key]:
            print(f"warning: {key} sheet has {len(rows)} rows, expected {EXPECTED[key]}", file=sys.stderr)

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(train + test)
    print(f"wrote {args.out}: {len(train)} + {len(test)} = {len(train) + len(test)} rows")


if __name__ == "__main__":
    main()
