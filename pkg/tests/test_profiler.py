import math
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbrsim import categorical_profile, numeric_profile, quantile
from cbrsim.errors import EmptyInput, NonFinite

from oracles import exact_quantile

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
columns = st.lists(finite, min_size=1, max_size=60)
probs = st.floats(0.0, 1.0)


def test_quantile_examples():
    assert quantile([5], 0.0) == quantile([5], 0.37) == quantile([5], 1.0) == 5
    assert quantile([1, 2, 3, 4], 0.25) == 1.75
    assert quantile([0, 10], 0.5) == 5
    assert quantile([4, 1, 3, 2], 0.75) == 3.25


def test_quantile_errors():
    with pytest.raises(EmptyInput):
        quantile([], 0.5)
    with pytest.raises(NonFinite):
        quantile([1.0, float("nan")], 0.5)
    with pytest.raises(ValueError):
        quantile([1.0], 1.5)


@given(columns, probs)
def test_quantile_matches_exact_and_numpy(values, prob):
    got = quantile(values, prob)
    assert got == pytest.approx(float(exact_quantile(values, prob)), rel=1e-12, abs=1e-9)
    assert got == pytest.approx(float(np.quantile(values, prob)), rel=1e-12, abs=1e-9)


@given(columns)
def test_quantile_endpoints(values):
    assert quantile(values, 0) == min(values)
    assert quantile(values, 1) == max(values)


@given(columns, probs, probs)
def test_quantile_monotone(values, p1, p2):
    lo, hi = sorted((p1, p2))
    assert quantile(values, lo) <= quantile(values, hi)


@given(columns, st.floats(0.01, 100), st.floats(-100, 100), probs)
def test_quantile_affine_equivariance(values, a, b, prob):
    shifted = [a * v + b for v in values]
    scale = max(1.0, max(abs(v) for v in shifted))
    assert math.isclose(quantile(shifted, prob), a * quantile(values, prob) + b, abs_tol=1e-9 * scale)


@settings(max_examples=200)
@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=2, max_size=60), st.floats(0.1, 10), st.floats(-5, 5))
def test_iqr_over_range_invariant_under_affine_maps(values, a, b):
    p = numeric_profile(values)
    q = numeric_profile([a * v + b for v in values])
    if p.range > 1e-6:
        assert q.iqr / q.range == pytest.approx(p.iqr / p.range, abs=1e-9)


@given(columns)
def test_numeric_profile_against_brute_force(values):
    p = numeric_profile(values)
    ordered = sorted(values)
    assert p.count == len(values)
    assert p.min == ordered[0] and p.max == ordered[-1]
    assert p.mean == pytest.approx(statistics.fmean(values), rel=1e-12, abs=1e-9)
    assert p.q1 == pytest.approx(float(exact_quantile(values, 0.25)), rel=1e-12, abs=1e-9)
    assert p.q3 == pytest.approx(float(exact_quantile(values, 0.75)), rel=1e-12, abs=1e-9)
    assert p.iqr == p.q3 - p.q1 and p.range == p.max - p.min
    assert p.min <= p.q1 <= p.q3 <= p.max
    assert p.check() == []


def test_quartiles_agree_with_statistics_inclusive():
    values = [0.08, 0.06, 0.1, 0.1, 0.08, 0.09, 0.1, 0.15, 0.2, 0.0, 0.18, 0.2, 0.33]
    q1, _, q3 = statistics.quantiles(values, n=4, method="inclusive")
    p = numeric_profile(values)
    assert p.q1 == pytest.approx(q1, abs=1e-15) and p.q3 == pytest.approx(q3, abs=1e-15)


def test_constant_column():
    p = numeric_profile([0.7, 0.7, 0.7])
    assert p.mean == 0.7 and p.iqr == 0 and p.range == 0 and p.degenerate


def test_numeric_profile_empty():
    with pytest.raises(EmptyInput):
        numeric_profile([])


def test_categorical_profile():
    inv = categorical_profile(["Low", "Low", "High"])
    assert inv.as_dict() == {"Low": 2, "High": 1}
    assert inv.labels == ["Low", "High"]
    assert inv.total == 3
    assert len(categorical_profile([])) == 0
