from fractions import Fraction

import pytest

from sadic.errors import InvalidParameters
from sadic.fixtures import repeated
from sadic.structure import (
    a_sequence,
    beta,
    check_constraints,
    decay_report,
    derive_ab,
    lengths,
    mean_ap_bound,
    mean_ap_report,
)


def test_lengths(ex12, ex13):
    assert lengths(ex12, 4) == [1, 3, 11, 39, 139]
    assert lengths(ex13, 2) == [1, 8, 68]


def test_a_sequence():
    assert a_sequence(repeated(3, 5).taus(4)) == [1, 2, 2, 2]
    assert a_sequence(repeated(7, 9, 1).taus(3)) == [2, 4, 4]


def test_derived_recursion(fixture_system):
    seqs = derive_ab(fixture_system, 12)
    for k in range(1, 12):
        assert seqs.lengths[k + 1] == seqs.b[k] * seqs.lengths[k] + seqs.a[k] * seqs.length(k - 1)


def test_beta_values(ex12):
    seqs = derive_ab(ex12, 6)
    assert beta(seqs, 0) == Fraction(2, 3)
    assert beta(seqs, 1) == Fraction(6, 11)


def test_beta_product_identity(fixture_system):
    seqs = derive_ab(fixture_system, 20)
    for k in range(21):
        assert seqs.products[k] == Fraction(seqs.a_product(1, k) * seqs.lengths[0], seqs.lengths[k])
        assert beta(seqs, k) == seqs.betas[k]


def test_decay(ex12):
    rep = decay_report(derive_ab(ex12, 20))
    assert rep.summable and rep.kappa < 1
    assert rep.envelope_holds


@pytest.mark.parametrize("params, ok", [((1, 3, 0), False), ((7, 9, 1), True), ((3, 5, 0), True)])
def test_constraints(params, ok):
    rep = check_constraints(repeated(*params), 10)
    assert rep.passed is ok
    assert rep.label == ("necessary-conditions-hold" if ok else "violated")
    if not ok:
        assert rep.violations()


def test_constraints_below_two_unchecked(ex12):
    rep = check_constraints(ex12, 4)
    assert [v.status for v in rep.verdicts if v.k < 2] == ["unchecked-by-theory"] * 2


@pytest.mark.parametrize("k", range(0, 4))
def test_mean_ap_below_bound(ex12, k):
    rep = mean_ap_report(ex12, k, 50_000)
    assert rep.below
    assert rep.bound == mean_ap_bound(ex12, k)


def test_mean_ap_prefix_too_short(ex12):
    with pytest.raises(InvalidParameters):
        mean_ap_report(ex12, 5, 100)
