"""Reference systems used throughout the tests, demos and CLI."""
from __future__ import annotations

from .words import SadicSystem, TauParams, identity

OMEGA_1 = TauParams(3, 5, 0)
OMEGA_2 = TauParams(5, 7, 0)


class PowerOfTwoRule:
    """Pick ``when`` at level k if 2**(k + offset) divides |u_k|, else ``otherwise``."""

    def __init__(self, when: TauParams = OMEGA_1, otherwise: TauParams = OMEGA_2, offset: int = 2):
        self.when, self.otherwise, self.offset = when, otherwise, offset

    def __call__(self, k: int, sys: SadicSystem) -> TauParams:
        return self.when if sys.length_u(k) % (1 << (k + self.offset)) == 0 else self.otherwise

    def to_json(self) -> dict:
        return {
            "type": "power-of-two-divides-u",
            "offset": self.offset,
            "when": self.when.as_list(),
            "otherwise": self.otherwise.as_list(),
        }

    def __repr__(self):
        return f"PowerOfTwoRule(when={self.when.as_list()}, otherwise={self.otherwise.as_list()})"


def repeated(m: int, n: int, r: int = 0, pi=None, name: str | None = None) -> SadicSystem:
    """The system with one parameter triple used at every level."""
    return SadicSystem(pi or identity(), [TauParams(m, n, r)], repeat="last",
                       name=name or f"tau({m},{n},{r})")


def example_1_2() -> SadicSystem:
    return repeated(3, 5, 0, name="example-1.2")


def example_1_3() -> SadicSystem:
    return repeated(7, 9, 1, name="example-1.3")


def example_1_4() -> SadicSystem:
    return SadicSystem({"0": "a", "1": "ab"}, rule=PowerOfTwoRule(), name="example-1.4")


EXAMPLES = {"1.2": example_1_2, "1.3": example_1_3, "1.4": example_1_4}


def example(name: str) -> SadicSystem:
    try:
        return EXAMPLES[name]()
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None


def complexity_fixtures() -> dict[str, SadicSystem]:
    """Systems on which the increment formula is cross-checked by brute force."""
    return {
        "example-1.2": example_1_2(),
        "example-1.3": example_1_3(),
        "tau(2,3,0)": repeated(2, 3, 0),
        "tau(4,5,0)": repeated(4, 5, 0),
    }


def all_fixtures() -> dict[str, SadicSystem]:
    out = complexity_fixtures()
    out["example-1.4"] = example_1_4()
    return out
