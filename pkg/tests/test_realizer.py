from fractions import Fraction

import pytest

from sadic.errors import InvalidParameters
from sadic.realizer import INF, TargetSpec, perturbed, realize, verify_realization
from sadic.serialize import system_from_json, system_to_json
from sadic.structure import lengths

BINARY = TargetSpec(repeat=(2,), delta=Fraction(1, 4))
NIL_2 = TargetSpec(nil_exponents=((2, INF),), delta=Fraction(1, 4))
CYCLIC_3 = TargetSpec(prefix=(3,))

TARGETS = {"binary-odometer": BINARY, "trivial-odometer-M2": NIL_2, "Z3-circle": CYCLIC_3}


@pytest.fixture(scope="module")
def realized():
    return {name: realize(t, 8) for name, t in TARGETS.items()}


def test_regimes():
    assert BINARY.regime == "B" and NIL_2.regime == "A" and CYCLIC_3.regime == "C"


@pytest.mark.parametrize("name", sorted(TARGETS))
def test_realization_passes(realized, name):
    rep = verify_realization(realized[name], TARGETS[name], K=8, tol=0.05)
    assert rep.passed, [c for c in rep.checks if not c.ok]
    assert [c.name for c in rep.checks] == ["odometer", "nilmanifold", "limsup", "constraints"]


@pytest.mark.parametrize("name", sorted(TARGETS))
def test_negative_control_fails(realized, name):
    sys = realized[name]
    bad = perturbed(sys, 2)
    assert not verify_realization(bad, TARGETS[name], K=8, tol=0.05).passed


def test_cyclic_gcd_is_order(realized):
    lens = lengths(realized["Z3-circle"], 8)
    assert {lens[k] % 3 for k in range(9)} == {0}


def test_binary_gcds_are_powers_of_two(realized):
    rep = verify_realization(realized["binary-odometer"], BINARY)
    assert all(g & (g - 1) == 0 for g in rep.gcds)
    assert rep.gcds[-1] > rep.gcds[0]


def test_finite_exponent_target():
    target = TargetSpec(prefix=(5,), nil_exponents=((2, 1),), delta=Fraction(0))
    sys = realize(target, 6)
    assert verify_realization(sys, target, K=6).passed


def test_target_validation():
    with pytest.raises(InvalidParameters):
        TargetSpec(delta=Fraction(1, 2))
    with pytest.raises(InvalidParameters):
        TargetSpec(nil_exponents=((4, 1),))
    with pytest.raises(InvalidParameters):
        TargetSpec(prefix=(3,), delta=Fraction(1, 10))
    with pytest.raises(InvalidParameters):
        realize(CYCLIC_3, 0)


def test_composite_factors_split():
    t = TargetSpec(prefix=(6, 1), repeat=(4,))
    assert t.partial_products(5) == [1, 2, 6, 12, 24, 48]
    assert t.odometer_infinite and t.odometer_order() is None


def test_target_json_round_trip():
    for t in TARGETS.values():
        assert TargetSpec.from_json(t.to_json()) == t


def test_realized_system_json_round_trip(realized):
    sys = realized["trivial-odometer-M2"]
    again = system_from_json(system_to_json(sys, stages=4))
    assert again.taus(6) == sys.taus(6)
