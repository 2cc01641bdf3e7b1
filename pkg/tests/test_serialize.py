import json
from fractions import Fraction

import pytest

from sadic.errors import InvalidParameters
from sadic.serialize import dumps, load_json, load_system, report, system_from_json, system_to_json, to_plain


def test_round_trip(fixture_system):
    again = system_from_json(json.loads(dumps(system_to_json(fixture_system))))
    assert again.taus(12) == fixture_system.taus(12)
    assert again.pi.images == fixture_system.pi.images


def test_rule_round_trip(ex14):
    data = system_to_json(ex14, stages=3)
    assert data["rule"]["type"] == "power-of-two-divides-u"
    assert len(data["taus"]) == 3
    assert system_from_json(data).taus(16) == ex14.taus(16)


@pytest.mark.parametrize("bad", [
    {},
    {"pi": ["0", "1"]},
    {"pi": {"0": "0", "1": "1"}, "taus": [[3, 5]] + [[1]]},
    {"pi": {"0": "0", "1": "1"}, "rule": {"type": "mystery"}},
])
def test_rejects_bad_systems(bad):
    with pytest.raises(InvalidParameters):
        system_from_json(bad)


def test_load(tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"pi": {"0": "0", "1": "1"}, "taus": [[2, 3, 0]]}')
    assert load_system(p).tau(5).as_list() == [2, 3, 0]
    p.write_text("[")
    with pytest.raises(InvalidParameters):
        load_json(p)


def test_to_plain():
    data = to_plain({"x": Fraction(3, 4), "y": (1, float("inf")), 2: None})
    assert data == {"x": "3/4", "y": [1, "inf"], "2": None}


def test_report_header(ex12):
    rep = report("spectrum", ex12, {"a": Fraction(1, 2)}, ok=False)
    assert rep["schema"] == "sadic-report/1" and rep["ok"] is False
    assert rep["result"] == {"a": "1/2"}
