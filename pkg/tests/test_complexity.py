import pytest

from sadic.complexity import (
    block_stream,
    brute_complexity,
    calibrate,
    complexity,
    complexity_formula,
    detect_seed,
    infer_level,
    infer_levels,
    left_special,
    limsup_estimate,
    predicted_increment,
    rauzy_graph,
    right_special,
    sample_language,
    special_length_complexity,
    special_lengths,
)
from sadic.errors import InvalidParameters, PeriodicInput
from sadic.fixtures import repeated
from sadic.words import TauParams, prefix


def test_small_complexities(ex12):
    sample = sample_language(ex12, 6)
    assert [complexity(sample, q) for q in range(7)] == [1, 2, 3, 4, 6, 7, 8]
    assert brute_complexity(ex12, 4) == 6


def test_rauzy_graph(ex12):
    g = rauzy_graph(sample_language(ex12, 4), 1)
    assert g.vertices == {"0", "1"}
    assert g.edges == {"00", "01", "10"}
    assert g.right_special() == {"0"}


def test_special_words(ex12):
    sample = sample_language(ex12, 6)
    assert set(right_special(sample, 3)) == {"000", "100"}
    assert "001" in left_special(sample, 3)


@pytest.mark.parametrize("q, inc", [(3, 2), (2, 1), (13, 2)])
def test_predicted_increment(ex12, q, inc):
    assert predicted_increment(ex12, q) == inc


def test_predicted_increment_needs_q_above_s0(ex13):
    with pytest.raises(InvalidParameters):
        predicted_increment(ex13, 0)


def test_special_lengths(ex12):
    assert special_lengths(ex12, 3)[:2] == [(0, "n", 3), (1, "n", 14)]
    sl = special_length_complexity(ex12, 0)
    assert (sl[0].q, sl[0].p) == (3, 4)


def test_formula_matches_brute(complexity_system):
    cal = calibrate(complexity_system)
    sample = sample_language(complexity_system, 120)
    for q in range(cal.base_q, 120):
        assert complexity_formula(complexity_system, q, cal) == complexity(sample, q)


def test_literal_formula_matches_with_constant(complexity_system):
    cal = calibrate(complexity_system)
    for k in range(1, 3):
        for sl in special_length_complexity(complexity_system, k, cal=cal, above_anchor=True):
            assert sl.literal == sl.p


def test_limsup_closed_form(ex12):
    est = limsup_estimate(ex12, 12)
    assert est.limit == pytest.approx((105 + 17 ** 0.5) / 86, abs=1e-12)
    assert abs(float(est.estimate) - est.limit) < 1e-3


def test_limsup_binary_odometer_tail():
    est = limsup_estimate(repeated(2, 3), 10)
    assert est.limit == 1
    assert 1 < est.estimate < 1.01


def test_detect_seed(ex12):
    v, u, w = detect_seed(sample_language(ex12, 20))
    assert len(v) < len(u) and u.endswith(v)


@pytest.mark.parametrize("which, params", [("ex12", (3, 5, 0)), ("ex13", (7, 9, 1))])
def test_infer_level(request, which, params):
    sys = request.getfixturevalue(which)
    tau, _ = infer_level(prefix(sys, 200_000))
    assert tau == TauParams(*params)


def test_infer_levels_repeat(ex12):
    x = prefix(ex12, 200_000)
    assert infer_levels(x, 3) == [TauParams(3, 5, 0)] * 3
    assert block_stream("1001001", "1", "001") == "011"


def test_infer_level_rejects_periodic():
    with pytest.raises(PeriodicInput):
        infer_level("001" * 50)
