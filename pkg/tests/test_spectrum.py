import math
from fractions import Fraction

import pytest

from sadic.fixtures import repeated
from sadic.spectrum import (
    Interval,
    alpha_enclosure,
    alpha_k_enclosure,
    convergents,
    eigenvalue_group,
    eigenvalue_membership,
    eigenvalue_offsets,
    frac_str,
    irrationality_witness,
    offset_contained,
    offset_for,
    p_adic_frac,
    parse_frac,
    simplest_rational,
    valuation,
)

ALPHA_12 = (math.sqrt(17) - 3) / 4


def test_determinant_identity(fixture_system):
    conv = convergents(fixture_system, 1, 20)
    for k in range(19):
        assert conv.determinant(k) == conv.predicted_determinant(k)


def test_alpha_enclosure_example_1_2(ex12):
    enc = alpha_enclosure(ex12, 25)
    assert enc.width < Fraction(1, 10 ** 15)
    assert enc.lo <= Fraction(ALPHA_12) + Fraction(1, 10 ** 15) and Fraction(ALPHA_12) - Fraction(1, 10 ** 15) <= enc.hi


def test_enclosures_nest(ex13):
    outer, inner = alpha_enclosure(ex13, 8), alpha_enclosure(ex13, 16)
    assert inner in outer and inner.width < outer.width


def test_alpha_k_enclosures_are_shifted_alpha(ex12):
    for k0 in (1, 2, 3):
        enc = alpha_k_enclosure(ex12, k0, 20)
        assert 0 < enc.lo <= enc.hi < 1


def test_offsets_example_1_2(ex12):
    assert eigenvalue_offsets(ex12, 3) == [
        (Fraction(1), Fraction(0)),
        (Fraction(-3, 2), Fraction(1, 2)),
        (Fraction(11, 4), Fraction(-3, 4)),
        (Fraction(-39, 8), Fraction(11, 8)),
    ]


@pytest.mark.parametrize("k", [0, 3, 7])
def test_offset_contained(fixture_system, k):
    ok, _ = offset_contained(fixture_system, k)
    assert ok


def test_irrationality_witness(ex12):
    s, bound, beyond = irrationality_witness(ex12, 20)
    assert beyond and s.denominator > bound


def test_simplest_rational():
    assert simplest_rational(Fraction(1, 3), Fraction(1, 2)) == Fraction(1, 2)
    assert simplest_rational(Fraction(3, 10), Fraction(4, 10)) == Fraction(1, 3)
    assert simplest_rational(Fraction(5, 2), Fraction(5, 2)) == Fraction(5, 2)


def test_p_adic_frac():
    assert p_adic_frac(Fraction(1, 2), 2) == Fraction(1, 2)
    assert p_adic_frac(Fraction(1, 3), 2) == 0
    assert p_adic_frac(Fraction(1, 6), 2) == Fraction(1, 2)
    assert p_adic_frac(Fraction(7, 4), 2) == Fraction(3, 4)
    assert p_adic_frac(5, 2) == 0


def test_valuation():
    assert valuation(12, 2) == 2
    assert valuation(Fraction(3, 8), 2) == -3
    assert valuation(0, 5) == math.inf


def test_interval_helpers():
    iv = Interval(Fraction(1, 4), Fraction(1, 2))
    assert iv.width == Fraction(1, 4) and iv.mid == Fraction(3, 8)
    assert iv.scale(-2) == Interval(Fraction(-1), Fraction(-1, 2))
    assert iv.shift(Fraction(1)).lo == Fraction(5, 4)
    assert parse_frac(frac_str(Fraction(-7, 3))) == Fraction(-7, 3)


def test_exponents_example_1_2(ex12):
    desc = eigenvalue_group(ex12, 20)
    assert desc.mode == "periodic-exact"
    assert desc.exponent("L", 2).infinite and desc.exponent("L", 2).certified
    assert desc.exponent("R", 2).value == 0 and desc.exponent("R", 2).certified
    assert set(desc.gcds) == {1}


def test_exponents_example_1_3(ex13):
    desc = eigenvalue_group(ex13, 12)
    assert desc.exponent("L", 2).infinite and desc.exponent("R", 2).infinite
    assert desc.exponent("L", 3).value == 0


def test_membership(ex12):
    desc = eigenvalue_group(ex12, 20)
    assert eigenvalue_membership(desc, 0, Fraction(1, 2)) == "non-member"
    assert eigenvalue_membership(desc, 1, 0) == "member"
    assert eigenvalue_membership(desc, Fraction(1, 1024), offset_for(desc, Fraction(1, 1024))) == "member"
    assert eigenvalue_membership(desc, Fraction(1, 3), 0) == "non-member"


def test_membership_unknown_for_truncated_data():
    desc = eigenvalue_group(repeated(3, 5), 6)
    desc.complete = False
    desc.mode = "truncated"
    desc.L = {}
    assert eigenvalue_membership(desc, Fraction(1, 2), 0) == "unknown-at-depth"


def test_offsets_are_members(fixture_system):
    desc = eigenvalue_group(fixture_system, 12)
    for q, rho in desc.offsets[:6]:
        assert eigenvalue_membership(desc, q, rho) in ("member", "unknown-at-depth")
