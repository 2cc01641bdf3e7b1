from fractions import Fraction

import pytest

from sadic.errors import InvalidParameters, PrecisionInsufficient
from sadic.mef import (
    OdometerPoint,
    character_eval,
    compare_eigenvalue_groups,
    factor_orbit_check,
    mef,
    odometer_step,
)
from sadic.spectrum import Interval, eigenvalue_group


def test_descriptions(ex12, ex13, ex14):
    assert mef(ex12, 12).describe() == "trivial odometer x M_2"
    assert mef(ex13, 12).describe() == "binary odometer x M_2"
    assert mef(ex14, 12).describe().startswith("binary odometer x S^1")


def test_mef_json(ex13):
    data = mef(ex13, 8).to_json()
    assert data["description"] == "binary odometer x M_2"
    assert data["odometer"][-1] == "periodic"
    assert data["certified"] is True


def test_odometer_step():
    pt = OdometerPoint((2, 4, 8), (1, 3, 7))
    assert odometer_step(pt).residues == (0, 0, 0)
    assert odometer_step(OdometerPoint.zero((3, 9)), 10).residues == (1, 1)
    assert OdometerPoint.from_integer((2, 4), 7) == OdometerPoint((2, 4), (1, 3))


def test_odometer_point_validation():
    with pytest.raises(InvalidParameters):
        OdometerPoint((2, 3), (0, 0))
    with pytest.raises(InvalidParameters):
        OdometerPoint((2, 4), (1, 2))


def test_character_eval():
    assert character_eval(0, {2: (1, 2)}, Fraction(1, 2)) == Fraction(1, 2)
    assert character_eval(Fraction(1, 3), {}, 3) == 0
    iv = character_eval(Interval(Fraction(1, 5), Fraction(1, 4)), {}, 2)
    assert iv == Interval(Fraction(2, 5), Fraction(1, 2))
    with pytest.raises(PrecisionInsufficient):
        character_eval(0, {2: (1, 2)}, Fraction(1, 8))
    with pytest.raises(PrecisionInsufficient):
        character_eval(0, {}, Fraction(1, 3))


def test_orbit_check_example_1_2(ex12):
    rep = factor_orbit_check(ex12, prefix_len=100_000, K=6)
    assert rep.increments_ok
    assert all(level.decomposition_ok for level in rep.levels)
    assert rep.passed


def test_orbit_check_example_1_3(ex13):
    assert factor_orbit_check(ex13, prefix_len=100_000, K=3).passed


def test_comparator(ex12, ex13, ex14):
    d12, d13, d14 = (eigenvalue_group(s, 12) for s in (ex12, ex13, ex14))
    verdict, reason = compare_eigenvalue_groups(d12, d14)
    assert verdict == "different" and "R(2)" in reason
    assert compare_eigenvalue_groups(d12, d13)[0] == "different"
    assert compare_eigenvalue_groups(d12, eigenvalue_group(ex12, 12), ex12, ex12)[0] == "equal"
