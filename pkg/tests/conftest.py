import os
import random
import warnings
from pathlib import Path

import pytest

from cbrsim import AttributeSpec, Kind, build_casebase, synthesize_model
from cbrsim.errors import DegenerateSpreadWarning

ROOT = Path(__file__).resolve().parents[1]
UKM_CSV = Path(os.environ.get("CBRSIM_UKM_CSV", ROOT / "data" / "user_knowledge_modeling.csv"))
UKM_SCHEMA = ROOT / "data" / "ukm_schema.json"

_criteria = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = dict(report.user_properties).get("criterion")
    if marker is None:
        return
    ok = report.outcome == "passed"
    prev = _criteria.get(marker, True)
    _criteria[marker] = prev and ok


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m is not None:
        item.user_properties.append(("criterion", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if _criteria[n] else 'FAIL'}")


@pytest.fixture
def rng():
    return random.Random(20240517)


SMALL_SCHEMA = [
    AttributeSpec("x", Kind.NUMERIC),
    AttributeSpec("y", Kind.NUMERIC),
    AttributeSpec("level", Kind.ORDINAL, ordinal_levels=("Very Low", "Low", "Middle", "High")),
    AttributeSpec("color", Kind.CATEGORICAL, labels=("red", "green")),
]

SMALL_RECORDS = [
    {"x": 0.0, "y": 1.0, "level": "Low", "color": "red"},
    {"x": 0.2, "y": 3.0, "level": "High", "color": "green"},
    {"x": 0.4, "y": 2.0, "level": "very_low", "color": "red"},
    {"x": 0.6, "y": 5.0, "level": "Middle", "color": "green"},
    {"x": 1.0, "y": 4.0, "level": "low", "color": "Red"},
]


@pytest.fixture
def small_casebase():
    return build_casebase(SMALL_RECORDS, SMALL_SCHEMA)


@pytest.fixture
def small_model(small_casebase):
    with warnings.catch_warnings():
        warnings.simplefilter("error", DegenerateSpreadWarning)
        return synthesize_model(small_casebase)


@pytest.fixture
def ukm_path():
    if not UKM_CSV.exists():
        pytest.fail(
            f"UCI User Knowledge Modeling fixture not found at {UKM_CSV}; "
            "create it with scripts/convert_ukm.py (see README, 'Dataset')",
            pytrace=False,
        )
    return UKM_CSV
