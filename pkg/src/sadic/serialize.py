"""JSON input and output for systems, targets and reports.

A system file looks like::

    {"pi": {"0": "a", "1": "ab"},
     "taus": [[3, 5, 0]], "repeat": "last"}

or, for a rule-driven system::

    {"pi": {"0": "a", "1": "ab"},
     "rule": {"type": "power-of-two-divides-u", "offset": 2,
              "when": [3, 5, 0], "otherwise": [5, 7, 0]}}

Rationals are written as ``"num/den"`` strings.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import InvalidParameters
from .fixtures import PowerOfTwoRule
from .spectrum import frac_str
from .words import SadicSystem, TauParams

SCHEMA_VERSION = "sadic-report/1"

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "command", "system", "result"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "command": {"type": "string"},
        "system": {"type": ["object", "null"]},
        "result": {"type": ["object", "array"]},
        "ok": {"type": "boolean"},
    },
}


def _triple(item, pos: int) -> TauParams:
    if not isinstance(item, (list, tuple)) or len(item) not in (2, 3):
        raise InvalidParameters(f"tau entry {pos}: expected [m, n, r], got {item!r}")
    try:
        return TauParams(*item)
    except InvalidParameters as exc:
        raise InvalidParameters(f"tau entry {pos}: {exc}") from None


def rule_from_json(data: dict):
    kind = data.get("type")
    if kind == "power-of-two-divides-u":
        return PowerOfTwoRule(_triple(data["when"], 0), _triple(data["otherwise"], 1),
                              int(data.get("offset", 2)))
    if kind == "realizer":
        from .realizer import TargetSpec, realize

        return realize(TargetSpec.from_json(data["target"]), 1).rule
    raise InvalidParameters(f"unknown rule type {kind!r}")


def system_from_json(data: dict) -> SadicSystem:
    if not isinstance(data, dict) or "pi" not in data:
        raise InvalidParameters("system JSON needs a 'pi' object")
    pi = data["pi"]
    if not isinstance(pi, dict) or not all(isinstance(v, str) for v in pi.values()):
        raise InvalidParameters("'pi' must map '0' and '1' to strings")
    name = data.get("name")
    if "rule" in data:
        return SadicSystem(pi, rule=rule_from_json(data["rule"]), name=name)
    taus = [_triple(t, i) for i, t in enumerate(data.get("taus", []))]
    repeat = data.get("repeat", "last")
    return SadicSystem(pi, taus, repeat=repeat, name=name)


def system_to_json(sys: SadicSystem, stages: int | None = None) -> dict:
    """JSON form; rule systems also list their first ``stages`` triples."""
    out: dict = {"pi": sys.pi.images}
    if sys.name:
        out["name"] = sys.name
    if sys.rule is not None:
        to_json = getattr(sys.rule, "to_json", None)
        if to_json is None:
            raise InvalidParameters(f"rule {sys.rule!r} has no JSON form")
        out["rule"] = to_json()
        if stages:
            out["taus"] = [t.as_list() for t in sys.taus(stages)]
    else:
        out["taus"] = [t.as_list() for t in sys.explicit]
        out["repeat"] = sys.repeat
    return out


def load_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidParameters(f"{path}: {exc}") from None


def load_system(path: str | Path) -> SadicSystem:
    return system_from_json(load_json(path))


def to_plain(obj):
    """Recursively convert Fractions, tuples and dataclass-ish values for JSON."""
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, float) and obj in (float("inf"), float("-inf")):
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    return str(obj)


def report(command: str, sys: SadicSystem | None, result, ok: bool = True) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "system": system_to_json(sys) if sys is not None else None,
        "ok": ok,
        "result": to_plain(result),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"
