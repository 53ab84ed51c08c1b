import math
import random
import warnings

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cbrsim import (
    AttributeSpec,
    Case,
    ExactMatchMeasure,
    Kind,
    OrdinalTableMeasure,
    PolynomialMeasure,
    Query,
    SimilarityModel,
    StatsProfile,
    build_casebase,
    derive_degree,
    exact_match_similarity,
    global_similarity,
    numeric_profile,
    numeric_similarity,
    ordinal_similarity,
    synthesize_model,
)
from cbrsim.errors import DegenerateSpreadWarning, InvalidSchema, NoUsableAttributes, UnknownLevel
from cbrsim.similarity import MAX_DEGREE, MIN_DEGREE, raw_degree, similarity_table

from oracles import LEVELS, bisect_degree


def profile(iqr, rng=1.0):
    return StatsProfile(count=4, mean=0.5, min=0.0, max=rng, q1=0.0, q3=iqr, iqr=iqr, range=rng)


# values below come from bisect_degree, an independent root find on y(iqr) = target
@pytest.mark.parametrize(
    "iqr, target, expected",
    [(0.25, 0.30, 4.185081100344675), (0.5, 0.30, 1.736965594166206), (0.25, 0.5, 2.409420839653208)],
)
def test_derive_degree_examples(iqr, target, expected):
    p = derive_degree(profile(iqr), target)
    assert p == pytest.approx(expected, abs=1e-9)
    assert p == pytest.approx(bisect_degree(iqr, 1.0, target), abs=1e-9)
    assert round(p, 4) == round(expected, 4)


def test_derive_degree_degenerate_warns():
    with pytest.warns(DegenerateSpreadWarning):
        assert derive_degree(profile(0.0, 1.0)) == 1.0
    with pytest.warns(DegenerateSpreadWarning):
        assert derive_degree(StatsProfile(3, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0)) == 1.0


def test_derive_degree_clamps():
    # iqr == range drives the raw degree below the floor; a tiny iqr drives it above the ceiling
    assert derive_degree(profile(1.0)) == MIN_DEGREE
    assert derive_degree(profile(1e-4)) == MAX_DEGREE


def test_derive_degree_rejects_bad_target():
    with pytest.raises(ValueError):
        derive_degree(profile(0.25), 1.0)


@given(st.floats(0.005, 0.9), st.floats(0.05, 0.95))
def test_similarity_at_iqr_hits_target(ratio, target):
    assume(MIN_DEGREE <= raw_degree(ratio, target) <= MAX_DEGREE)
    p = derive_degree(profile(ratio), target)
    m = PolynomialMeasure(p, 1.0, target)
    assert abs(m.at_distance(ratio) - target) < 1e-9
    assert m.at_distance(1.0) == 0.0


@given(st.floats(0.01, 0.45), st.floats(0.01, 0.45))
def test_degree_grows_as_spread_shrinks(r1, r2):
    assume(r1 < r2)
    assert derive_degree(profile(r1)) >= derive_degree(profile(r2))


def test_numeric_similarity_examples():
    m = PolynomialMeasure(derive_degree(profile(0.25)), 1.0)
    assert numeric_similarity(m, 0.4, 0.4) == 1.0
    assert numeric_similarity(m, 0.0, 1.0) == 0.0
    assert numeric_similarity(m, 2.0, -5.0) == 0.0
    assert abs(numeric_similarity(m, 0.5, 0.25) - 0.30) < 1e-6
    m4 = PolynomialMeasure(4.1850, 1.0)
    assert abs(numeric_similarity(m4, 0.5, 0.25) - 0.30) < 1e-4


def test_polynomial_measure_validation():
    with pytest.raises(InvalidSchema):
        PolynomialMeasure(2.0, 0.0)
    with pytest.raises(InvalidSchema):
        PolynomialMeasure(100.0, 1.0)


@given(st.floats(0.1, 64), st.floats(0.01, 10), st.floats(0, 20), st.floats(0, 20))
def test_polynomial_non_increasing(degree, span, d1, d2):
    m = PolynomialMeasure(degree, span)
    lo, hi = sorted((d1, d2))
    assert 0.0 <= m.at_distance(hi) <= m.at_distance(lo) <= 1.0


def test_ordinal_examples():
    m = OrdinalTableMeasure(LEVELS)
    assert ordinal_similarity(m, "Very Low", "Very Low") == 1.0
    assert ordinal_similarity(m, "Very Low", "High") == 0.0
    assert ordinal_similarity(m, "Low", "Middle") == pytest.approx(2 / 3)
    assert ordinal_similarity(m, "very_low", "LOW") == pytest.approx(2 / 3)
    with pytest.raises(UnknownLevel):
        ordinal_similarity(m, "Low", "Extreme")


def test_ordinal_table_spans_unit_interval():
    table = similarity_table(OrdinalTableMeasure(LEVELS))
    flat = [v for row in table for v in row]
    assert min(flat) == 0.0 and max(flat) == 1.0
    assert all(table[i][j] == table[j][i] for i in range(4) for j in range(4))
    assert table[0] == pytest.approx([1.0, 2 / 3, 1 / 3, 0.0])


def test_exact_match():
    assert exact_match_similarity("A", "A") == 1
    assert exact_match_similarity("A", "B") == 0
    assert exact_match_similarity("a", "A") == 1
    assert ExactMatchMeasure().similarity("x_y", "X Y") == 1


def two_attr_model(weights):
    schema = (AttributeSpec("a"), AttributeSpec("b"))
    measures = {"a": PolynomialMeasure(1.0, 1.0), "b": PolynomialMeasure(1.0, 1.0)}
    return SimilarityModel(schema, {}, measures, weights)


def test_global_similarity_weighted_sum():
    model = two_attr_model({"a": 2.0, "b": 1.0})
    # local sims: a -> 1.0 (same value), b -> 1 - 0.6 = 0.4
    score = global_similarity(model, Query({"a": 0.5, "b": 0.0}), Case(0, {"a": 0.5, "b": 0.6}))
    brute = sum(w * s for w, s in zip((2.0, 1.0), (1.0, 1 - 0.6))) / 3.0
    assert score.similarity == pytest.approx(0.8, abs=1e-12)
    assert score.similarity == pytest.approx(brute, abs=1e-12)
    assert [n for n, _ in score.breakdown] == ["a", "b"]


def test_global_similarity_reflexive_and_partial():
    model = two_attr_model({"a": 5.0, "b": 1.0})
    case = Case(0, {"a": 0.1, "b": 0.9})
    assert global_similarity(model, Query({"a": 0.1, "b": 0.9}), case).similarity == 1.0
    only_b = global_similarity(model, Query({"b": 0.5}), case)
    assert only_b.similarity == pytest.approx(0.6)
    assert only_b.breakdown == [("b", only_b.similarity)]


def test_global_similarity_zero_weight_attributes():
    model = two_attr_model({"a": 0.0, "b": 1.0})
    with pytest.raises(NoUsableAttributes):
        global_similarity(model, Query({"a": 0.1}), Case(0, {"a": 0.1, "b": 0.9}))
    with pytest.raises(InvalidSchema):
        two_attr_model({"a": 0.0, "b": 0.0})
    with pytest.raises(InvalidSchema):
        two_attr_model({"a": -1.0, "b": 1.0})


def test_model_rejects_mismatched_measure_kind():
    schema = (AttributeSpec("u", Kind.ORDINAL, ordinal_levels=LEVELS),)
    with pytest.raises(InvalidSchema):
        SimilarityModel(schema, {}, {"u": ExactMatchMeasure()}, {"u": 1.0})


def ukm_like_casebase(rng, n=60):
    schema = [AttributeSpec(n_) for n_ in ("STG", "SCG", "STR", "LPR", "PEG")]
    schema.append(AttributeSpec("UNS", Kind.ORDINAL, ordinal_levels=LEVELS))
    records = [
        {**{a.name: round(rng.random() * 0.99, 3) for a in schema[:5]}, "UNS": rng.choice(LEVELS)}
        for _ in range(n)
    ]
    return build_casebase(records, schema)


def test_synthesize_five_polynomial_one_ordinal():
    cb = ukm_like_casebase(random.Random(3))
    model = synthesize_model(cb)
    kinds = [type(model.measures[a.name]).__name__ for a in cb.schema]
    assert kinds == ["PolynomialMeasure"] * 5 + ["OrdinalTableMeasure"]
    for a in cb.schema[:5]:
        m, prof = model.measures[a.name], model.profiles[a.name]
        assert m.anchor_range == prof.range
        assert m.degree == pytest.approx(bisect_degree(prof.iqr, prof.range, 0.30), abs=1e-6)
    assert all(w == 1.0 for w in model.weights.values())


def test_synthesize_target_option():
    schema = [AttributeSpec("x")]
    # iqr 0.25 over range 1.0 with type-7 quartiles: q1 = 0.25, q3 = 0.5
    cb = build_casebase([{"x": v} for v in (0.0, 0.25, 0.25, 0.5, 0.5, 1.0, 0.375, 0.375, 0.3125)], schema)
    prof = numeric_profile(cb.column("x"))
    assert (prof.iqr, prof.range) == (0.25, 1.0)
    model = synthesize_model(cb, target_at_iqr=0.5)
    assert model.measures["x"].degree == pytest.approx(2.409420839653208, abs=1e-9)


def test_synthesize_constant_column_warns():
    cb = build_casebase([{"x": 1.0, "y": v} for v in (0.0, 0.5, 1.0)], [AttributeSpec("x"), AttributeSpec("y")])
    with pytest.warns(DegenerateSpreadWarning, match="x"):
        model = synthesize_model(cb)
    assert model.measures["x"].degree == 1.0 and model.measures["x"].degenerate
    assert not model.measures["y"].degenerate


def test_synthesize_declared_anchor():
    schema = [AttributeSpec("x", declared_bounds=(0.0, 2.0))]
    cb = build_casebase([{"x": v} for v in (0.0, 0.2, 0.4, 0.6, 1.0)], schema)
    model = synthesize_model(cb, anchor="declared")
    m, prof = model.measures["x"], model.profiles["x"]
    assert m.anchor_range == 2.0
    assert abs(m.at_distance(prof.iqr) - 0.30) < 1e-9
    with pytest.raises(InvalidSchema):
        synthesize_model(build_casebase([{"x": 0.0}, {"x": 1.0}], [AttributeSpec("x")]), anchor="declared")


def test_synthesize_weights_and_categoricals():
    schema = [AttributeSpec("x"), AttributeSpec("c", Kind.CATEGORICAL)]
    cb = build_casebase([{"x": 0.0, "c": "a"}, {"x": 1.0, "c": "b"}, {"x": 0.5, "c": "a"}], schema)
    model = synthesize_model(cb, weights={"c": 3})
    assert isinstance(model.measures["c"], ExactMatchMeasure)
    assert model.weights == {"x": 1.0, "c": 3.0}
    assert model.profiles["c"].as_dict() == {"a": 2, "b": 1}


@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=4, max_size=40),
       st.floats(0.1, 10), st.floats(-10, 10), st.floats(0, 1), st.floats(0, 1))
def test_affine_invariance(values, a, b, q, c):
    base = numeric_profile(values)
    assume(base.range > 1e-3 and base.iqr > 1e-3 * base.range)
    moved = numeric_profile([a * v + b for v in values])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpreadWarning)
        p1, p2 = derive_degree(base), derive_degree(moved)
    assert p2 == pytest.approx(p1, rel=1e-6)
    m1, m2 = PolynomialMeasure(p1, base.range), PolynomialMeasure(p2, moved.range)
    assert m2.similarity(a * q + b, a * c + b) == pytest.approx(m1.similarity(q, c), abs=1e-6)


def test_global_bounded_by_locals_small():
    model = two_attr_model({"a": 0.3, "b": 0.7})
    s = global_similarity(model, Query({"a": 0.2, "b": 0.2}), Case(0, {"a": 0.5, "b": 0.9}))
    locals_ = [v for _, v in s.breakdown]
    assert min(locals_) <= s.similarity <= max(locals_)
    assert math.isclose(s.similarity, 0.3 * 0.7 + 0.7 * 0.3)
