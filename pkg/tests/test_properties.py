"""Randomized invariants."""
from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from sadic.balance import measure_cylinder, perron
from sadic.complexity import calibrate, predicted_increment, sample_language
from sadic.errors import InvalidParameters
from sadic.fixtures import repeated
from sadic.mef import OdometerPoint, odometer_step
from sadic.spectrum import alpha_enclosure, convergents, p_adic_frac, simplest_rational
from sadic.structure import derive_ab
from sadic.words import SadicSystem, TauParams, build_tau, factor_set, identity, occurrences, prefix

triples = st.integers(1, 6).flatmap(
    lambda m: st.integers(m + 1, m + 4).flatmap(
        lambda n: st.tuples(st.just(m), st.just(n), st.integers(0, n - 1).filter(lambda r: r == 0 or r < m))
    )
)

small = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@given(st.integers(-3, 8), st.integers(-3, 10), st.integers(-2, 8))
def test_tau_params_validity(m, n, r):
    valid = 1 <= m < n and 0 <= r < m
    try:
        TauParams(m, n, r)
    except InvalidParameters:
        assert not valid
    else:
        assert valid


@given(triples)
def test_tau_images_end_in_one(params):
    tau = build_tau(TauParams(*params))
    m, n, r = params
    assert tau["0"].endswith("1") and tau["1"].endswith("1")
    assert len(tau["1"]) - len(tau["0"]) == n - m


@small
@given(triples)
def test_increment_formula_matches_brute_force(params):
    sys = repeated(*params)
    cal = calibrate(sys)
    sample = sample_language(sys, 60)
    counts = [len(f) for f in sample.factors]
    for q in range(cal.base_q, 59):
        assert counts[q + 1] - counts[q] == predicted_increment(sys, q)


@small
@given(triples)
def test_morse_hedlund(params):
    sys = repeated(*params)
    sample = sample_language(sys, 40)
    assert all(len(sample.factors[q]) >= q + 1 for q in range(41))


@small
@given(triples, st.integers(1, 4))
def test_cylinder_measures_sum_to_one(params, q):
    sys = repeated(*params)
    words = factor_set(sys, q)[0]
    ms = [measure_cylinder(sys, w) for w in words]
    assert sum(m.rational_part for m in ms) == 1
    assert sum(m.alpha_coeff for m in ms) == 0


@small
@given(triples)
def test_determinant_identity(params):
    conv = convergents(repeated(*params), 1, 12)
    assert all(conv.determinant(k) == conv.predicted_determinant(k) for k in range(11))


@small
@given(triples)
def test_alpha_enclosure_contains_frequency_limit(params):
    sys = repeated(*params)
    enc = alpha_enclosure(sys, 20)
    assert 0 <= enc.lo <= enc.hi <= 1
    assert enc.width < Fraction(1, 1000)


@small
@given(st.lists(triples, min_size=1, max_size=4))
def test_lengths_match_words(seq):
    sys = SadicSystem(identity(), seq, repeat="cycle")
    seqs = derive_ab(sys, 3)
    assert [len(sys.word_v(k)) for k in range(4)] == seqs.lengths[:4]


@given(st.fractions(), st.fractions(), st.sampled_from([2, 3, 5]))
def test_p_adic_frac_additive(x, y, p):
    s = p_adic_frac(x, p) + p_adic_frac(y, p) - p_adic_frac(x + y, p)
    assert s in (0, 1)
    assert 0 <= p_adic_frac(x, p) < 1
    assert (x - p_adic_frac(x, p)).denominator % p != 0


@given(st.lists(st.integers(2, 3), min_size=1, max_size=5), st.integers(0, 500), st.integers(0, 500))
def test_odometer_step_additive(factors, a, b):
    moduli = list(np.cumprod(factors).tolist())
    z = OdometerPoint.zero(moduli)
    assert odometer_step(odometer_step(z, a), b) == odometer_step(z, a + b)
    assert odometer_step(z, a) == OdometerPoint.from_integer(moduli, a)


@given(st.fractions(min_value=0, max_value=10), st.fractions(min_value=0, max_value=1))
def test_simplest_rational_in_range(lo, width):
    hi = lo + width
    s = simplest_rational(lo, hi)
    assert lo <= s <= hi


@small
@given(st.lists(st.lists(st.integers(1, 5), min_size=3, max_size=3), min_size=3, max_size=3))
def test_perron_matches_eigvals(rows):
    M = np.array(rows)
    enc = perron(rows)
    top = max(abs(np.linalg.eigvals(M)))
    assert abs(float(enc.mid) - top) < 1e-8 * top


@small
@given(triples, st.text(alphabet="01", min_size=1, max_size=6))
def test_occurrence_count_consistent(params, w):
    x = prefix(repeated(*params), 2000)
    assume(w in x)
    assert occurrences(x, w) == sum(x.startswith(w, i) for i in range(len(x)))
