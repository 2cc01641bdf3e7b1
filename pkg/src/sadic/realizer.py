"""Build systems with a prescribed odometer, nilmanifold and complexity slope.

Three constructions are available, chosen from the target:

* ``"A"``: the nilmanifold is not a finite extension of the circle (some
  exponent is infinite).  The seed is ``0 -> 0, 1 -> 01``; the gap
  ``n_k - m_k = t_{k+1} s_k`` splits into an odometer part ``t`` (absorbed
  by the gcd of consecutive lengths) and a prime power ``s`` (which stays in
  the cofactor).
* ``"B"``: finite extension ``S^1 x Z/q`` with an infinite odometer.  Stages
  alternate between a free step ``n = m + 1``, whose ``m`` fixes residues,
  and a tuned step ``n = m + D`` with ``D`` a block of odometer factors.
* ``"C"``: both finite.  Seed ``0 -> 0^(qr), 1 -> 0^(qr) 1^r`` followed by
  ``tau(1, 2, 0)`` at every level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import sympy

from .complexity import limsup_estimate
from .errors import InvalidParameters
from .spectrum import INF, frac_str, group_exponents, parse_frac
from .structure import check_constraints, lengths
from .words import SadicSystem, TauParams


# ---------------------------------------------------------------------------
# Targets


def _prime_factors(y: int) -> list[int]:
    if y < 1:
        raise InvalidParameters(f"odometer factors must be positive, got {y}")
    out = []
    for p, e in sorted(sympy.factorint(y).items()):
        out.extend([p] * e)
    return out


@dataclass(frozen=True)
class TargetSpec:
    """Odometer factors, nilmanifold exponents and the excess ``delta``.

    The odometer is ``prefix`` followed by ``repeat`` cycled forever (an
    empty ``repeat`` gives a finite odometer).  Composite factors are split
    into primes and factors equal to 1 are dropped; neither changes the
    odometer.
    """

    prefix: tuple[int, ...] = ()
    repeat: tuple[int, ...] = ()
    nil_exponents: tuple[tuple[int, float], ...] = ()
    delta: Fraction = Fraction(0)

    def __post_init__(self):
        if not 0 <= self.delta < Fraction(1, 2):
            raise InvalidParameters(f"delta must lie in [0, 1/2), got {self.delta}")
        for p, e in self.nil_exponents:
            if not sympy.isprime(p):
                raise InvalidParameters(f"nilmanifold exponent keyed by non-prime {p}")
            if e != INF and (e < 0 or int(e) != e):
                raise InvalidParameters(f"exponent of {p} must be a natural number or inf, got {e}")
        for y in self.prefix + self.repeat:
            _prime_factors(y)
        if self.regime == "C" and self.delta:
            raise InvalidParameters(
                "delta > 0 needs an infinite odometer or a nilmanifold that is not a finite "
                "extension of the circle"
            )

    # -- odometer ----------------------------------------------------------
    def _expanded(self, seq) -> list[int]:
        return [p for y in seq for p in _prime_factors(y)]

    @property
    def odometer_infinite(self) -> bool:
        return bool(self._expanded(self.repeat))

    def odometer_primes(self) -> Iterator[int]:
        """Prime odometer factors in order (infinite for an infinite odometer)."""
        yield from self._expanded(self.prefix)
        rep = self._expanded(self.repeat)
        while rep:
            yield from rep

    def odometer_order(self) -> int | None:
        return None if self.odometer_infinite else math.prod(self._expanded(self.prefix))

    def partial_products(self, count: int) -> list[int]:
        out, prod = [1], 1
        for i, p in enumerate(self.odometer_primes()):
            if i >= count:
                break
            prod *= p
            out.append(prod)
        return out

    # -- nilmanifold -------------------------------------------------------
    @property
    def exponents(self) -> dict[int, float]:
        return {p: e for p, e in self.nil_exponents if e}

    @property
    def torsion(self) -> int | None:
        """``q`` for ``S^1 x Z/q``; None when some exponent is infinite."""
        if any(e == INF for e in self.exponents.values()):
            return None
        return math.prod(p ** int(e) for p, e in self.exponents.items())

    @property
    def regime(self) -> str:
        if self.torsion is None:
            return "A"
        return "B" if self.odometer_infinite else "C"

    def delta_at(self, k: int) -> Fraction:
        """Per-stage excess: constant, or ``1/(k+2)^2`` when the target is 0."""
        return self.delta if self.delta else Fraction(1, (k + 2) ** 2)

    # -- JSON ----------------------------------------------------------------
    def to_json(self) -> dict:
        odo: list | dict
        if self.repeat:
            odo = {"prefix": list(self.prefix), "repeat": list(self.repeat)}
        else:
            odo = list(self.prefix)
        return {
            "odometer": odo,
            "nil_exponents": [[p, "inf" if e == INF else int(e)] for p, e in self.nil_exponents],
            "delta": frac_str(self.delta),
        }

    @classmethod
    def from_json(cls, data: dict) -> "TargetSpec":
        odo = data.get("odometer", [])
        if isinstance(odo, dict):
            prefix, repeat = odo.get("prefix", []), odo.get("repeat", [])
        else:
            prefix, repeat = odo, []
        nil = []
        for item in data.get("nil_exponents", []):
            p, e = item
            nil.append((int(p), INF if e in ("inf", "infinity") else int(e)))
        return cls(tuple(int(y) for y in prefix), tuple(int(y) for y in repeat), tuple(nil),
                   parse_frac(data.get("delta", "0")))


# ---------------------------------------------------------------------------
# Constructions


@dataclass
class Stage:
    """Bookkeeping for one emitted parameter triple."""

    k: int
    tau: TauParams
    gcd: int          # expected gcd(|v_k|, |v_{k+1}|)
    odometer: int     # odometer part of n_k - m_k
    nil: int          # nilmanifold part of n_k - m_k
    target_m: int | None = None


class _Construction:
    """Lazily extended parameter sequence; ``rule(k, sys)`` for SadicSystem."""

    regime = "?"

    def __init__(self, target: TargetSpec):
        self.target = target
        self.stages: list[Stage] = []

    def __call__(self, k: int, _sys=None) -> TauParams:
        while len(self.stages) <= k:
            self._extend()
        return self.stages[k].tau

    def periodic_tail(self):
        return None

    def gcd_chain(self, count: int) -> list[int]:
        self(count)
        return [s.gcd for s in self.stages[:count]]

    def to_json(self) -> dict:
        return {"type": "realizer", "regime": self.regime, "target": self.target.to_json()}

    def __repr__(self):
        return f"realizer(regime={self.regime}, stages={len(self.stages)})"

    def _extend(self):
        raise NotImplementedError


class _RegimeA(_Construction):
    """Odometer factor ``t`` and prime power ``s`` in every gap."""

    regime = "A"

    def __init__(self, target: TargetSpec):
        super().__init__(target)
        self.ys = target.odometer_primes()
        self.y = next(self.ys, 1)
        self.ell = [1, 1]           # ell[k + 1] = |v_k|, so ell[0] = |v_{-1}|
        self.t = [1, 1]             # t_0, t_1
        self.g = [1]                # g_k = t_0 ... t_k
        self.s: list[int] = []
        self.p: list[int] = []
        self.schedule = self._s_schedule()

    def _s_schedule(self) -> Iterator[tuple[int, int]]:
        exps = self.target.exponents
        finite = sorted((p, int(e)) for p, e in exps.items() if e != INF)
        infinite = sorted(p for p, e in exps.items() if e == INF)
        last = 1
        floor = 2
        if self.target.delta:
            # keeps n_k <= 2 m_k once m_k sits 2 t below its target
            floor = max(2, math.ceil(2 / (1 / self.target.delta - 2)) + 1)
        used = {p: 0 for p in infinite}
        for p, e in finite:
            yield p, p ** e
        i = 0
        while True:
            p = infinite[i % len(infinite)]
            e = used[p] + 1
            while p ** e <= max(last, floor - 1):
                e += 1
            used[p] = e
            last = p ** e
            yield p, last
            i += 1

    def _ell(self, k: int) -> int:
        return self.ell[k + 1]

    def _extend(self):
        k = len(self.stages)
        p_k, s_k = next(self.schedule)
        self.p.append(p_k)
        self.s.append(s_k)
        delta = self.target.delta_at(k)
        if k == 0:
            base = math.ceil((1 / delta - 1) * s_k)
            m = base + 1
            while (m + 1) % p_k == 0:
                m += 1
            t_next = 1
            self.ell.append(m + 1)
            target_m = base
        else:
            g_k = self.g[k]
            A = self._ell(k) // g_k
            if self.y > 1 and A % self.y:
                t_next = self.y
                self.y = next(self.ys, 1)
            else:
                t_next = 1
            B = self.s[k - 1] * self._ell(k - 1) // self.g[k - 1]
            target_m = math.ceil((1 / delta - 1) * t_next * s_k)
            i = (target_m + B * pow(A, -1, t_next)) % t_next if t_next > 1 else 0
            g_next = g_k * t_next
            m = None
            for cand in (target_m - i, target_m - i - t_next):
                ell_next = cand * self._ell(k) + self.t[k] * self.s[k - 1] * self._ell(k - 1)
                if cand >= 1 and (ell_next // g_next) % p_k:
                    m = cand
                    break
            if m is None:
                raise ArithmeticError(f"no valid m at stage {k} within the window of width {2 * t_next}")
            self.ell.append(m * self._ell(k) + self.t[k] * self.s[k - 1] * self._ell(k - 1))
        if k:
            self.t.append(t_next)
        self.g.append(self.g[-1] * t_next)
        n = m + t_next * s_k
        self.stages.append(Stage(k, TauParams(m, n, 0), self.g[k], t_next, s_k, target_m))
        self._check(k)

    def _check(self, k: int):
        """The induction hypotheses, exactly."""
        ell_next, ell_k = self._ell(k + 1), self._ell(k)
        t_next = self.stages[k].odometer
        if (ell_next // self.g[k]) % t_next or ell_next % self.g[k]:
            raise ArithmeticError(f"stage {k}: t_(k+1) does not divide l_(k+1)/g_k")
        if self.p[k] > 1 and (ell_next // self.g[k + 1]) % self.p[k] == 0:
            raise ArithmeticError(f"stage {k}: p_k divides l_(k+1)/g_(k+1)")
        if math.gcd(ell_next, ell_k) != self.g[k]:
            raise ArithmeticError(f"stage {k}: gcd(l_(k+1), l_k) != g_k")


class _RegimeB(_Construction):
    """Alternating free and tuned steps over the seed ``0^q, 0^q 1``."""

    regime = "B"

    def __init__(self, target: TargetSpec, growth: int = 16):
        super().__init__(target)
        self.q = target.torsion
        self.ys = target.odometer_primes()
        self.growth = growth
        self.blocks: list[int] = []
        bad = [p for p in sympy.primefactors(self.q) if p in set(target._expanded(target.prefix + target.repeat))]
        if bad:
            raise InvalidParameters(
                f"this construction needs the torsion q = {self.q} coprime to the odometer primes "
                f"(shared: {bad})"
            )
        self.ell = [1, self.q]      # ell[k + 1] = |v_k|
        self.a = [1]                # a_k for the current prefix
        self.g = []

    def _block(self, i: int) -> int:
        while len(self.blocks) <= i:
            target = self.growth << len(self.blocks)
            D = 1
            while D < target:
                D *= next(self.ys)
            self.blocks.append(D)
        return self.blocks[i]

    def _ell(self, k: int) -> int:
        return self.ell[k + 1]

    def _extend(self):
        k = len(self.stages)               # free step at k, tuned at k + 1
        D, D_next = self._block(k // 2), self._block(k // 2 + 1)
        l_prev2, l_prev = self._ell(k - 1), self._ell(k)
        a_prev = self.a[k]
        g = math.gcd(a_prev * l_prev2, l_prev)
        B = l_prev // g
        E = a_prev * l_prev2 // g
        delta = self.target.delta_at(k + 1)
        target_m = math.ceil((1 / delta - 1) * D)
        T = target_m
        while math.gcd(T, D * D_next) != 1:
            T += 1
        if math.gcd(B, D) != 1:
            raise ArithmeticError(f"stage {k}: cofactor {B} shares a prime with {D}")
        m_star = (-(T * E + B) * pow(T * B, -1, D)) % D or D
        for j in range(10_000):
            m_free = m_star + j * D
            A = m_free * B + E
            nxt = (T * A + B)
            if nxt % D:
                raise ArithmeticError(f"stage {k}: residue solve failed")
            if math.gcd(nxt // D, D_next) == 1:
                break
        else:
            raise ArithmeticError(f"stage {k}: no admissible free step found")
        l_k1 = m_free * l_prev + a_prev * l_prev2
        l_k2 = T * l_k1 + l_prev
        self.ell += [l_k1, l_k2]
        self.a += [1, D]
        self.stages.append(Stage(k, TauParams(m_free, m_free + 1, 0), g, 1, 1))
        self.stages.append(Stage(k + 1, TauParams(T, T + D, 0), g, D, 1, target_m))
        if math.gcd(l_k1, l_prev) != g or math.gcd(l_k2, l_k1) != g:
            raise ArithmeticError(f"stage {k}: gcd bookkeeping broke")


def realize(target: TargetSpec, stages: int = 8) -> SadicSystem:
    """System whose odometer, nilmanifold and complexity excess match ``target``.

    ``stages`` triples are constructed (and their invariants checked) up
    front; later ones are produced on demand by the same construction.
    """
    if stages < 1:
        raise InvalidParameters("stages must be positive")
    regime = target.regime
    if regime == "C":
        q, r = target.torsion, target.odometer_order()
        pi = {"0": "0" * (q * r), "1": "0" * (q * r) + "1" * r}
        return SadicSystem(pi, [TauParams(1, 2, 0)], repeat="last", name="realized-C")
    rule = _RegimeA(target) if regime == "A" else _RegimeB(target)
    pi = {"0": "0", "1": "01"} if regime == "A" else {"0": "0" * target.torsion, "1": "0" * target.torsion + "1"}
    sys = SadicSystem(pi, rule=rule, name=f"realized-{regime}")
    sys.taus(stages)
    return sys


# ---------------------------------------------------------------------------
# Verification


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


@dataclass
class RealizationReport:
    checks: list[CheckResult]
    limsup: Fraction | None = None
    gcds: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _check_odometer(sys: SadicSystem, target: TargetSpec, K: int) -> CheckResult:
    lens = lengths(sys, K + 1)
    gcds = [math.gcd(lens[k], lens[k + 1]) for k in range(K + 1)]
    products = target.partial_products(sum(sympy.factorint(gcds[-1]).values()) + 1)
    allowed = set(products)
    bad = [g for g in gcds if g not in allowed]
    if bad:
        return CheckResult("odometer", False, f"gcds {bad[:3]} are not partial products of the target")
    if any(gcds[k + 1] % gcds[k] for k in range(K)):
        return CheckResult("odometer", False, "gcd chain is not a divisibility chain")
    if not target.odometer_infinite and gcds[-1] != target.odometer_order():
        return CheckResult("odometer", False, f"gcds settle at {gcds[-1]}, target order {target.odometer_order()}")
    if target.odometer_infinite and gcds[-1] == gcds[0]:
        return CheckResult("odometer", False, "gcd chain does not grow within the depth")
    rule = sys.rule
    if isinstance(rule, _Construction):
        book = rule.gcd_chain(K + 1)
        if book != gcds:
            return CheckResult("odometer", False, "gcd chain differs from the construction's bookkeeping")
    return CheckResult("odometer", True, f"gcds {gcds[:6]}... are partial products of the target")


def _check_exponents(sys: SadicSystem, target: TargetSpec, K: int) -> CheckResult:
    rep = group_exponents(sys, K)
    want = target.exponents
    problems = []
    for p in sorted(set(want) | set(rep.L)):
        got = rep.get("L", p)
        x = want.get(p, 0)
        if x == INF:
            if not got.likely_infinite():
                problems.append(f"L({p}) = {got}, expected unbounded")
        elif got.infinite or got.status == "growing" or got.value != x:
            problems.append(f"L({p}) = {got}, expected {x}")
    if problems:
        return CheckResult("nilmanifold", False, "; ".join(problems))
    shown = {p: str(rep.get("L", p)) for p in sorted(set(want) | set(rep.L))}
    return CheckResult("nilmanifold", True, f"L = {shown or '{}'} ({rep.mode})")


def verify_realization(sys: SadicSystem, target: TargetSpec, K: int = 8, tol: float = 0.05) -> RealizationReport:
    """Four checks: odometer moduli, nilmanifold exponents, limsup, constraints."""
    checks = [_check_odometer(sys, target, K), _check_exponents(sys, target, K)]
    est = None
    try:
        lim = limsup_estimate(sys, K)
        goal = 1 + target.delta
        if lim.limit is not None:
            # constant tail: the exact limit along the special lengths
            est, how = lim.limit, f"closed form {lim.closed_form}"
        else:
            est, how = lim.estimate, "tail estimate"
        ok = abs(float(est) - float(goal)) <= tol
        checks.append(CheckResult("limsup", ok, f"{how} = {float(est):.5f} vs {float(goal):.5f} (tol {tol})"))
    except Exception as exc:  # reported, not raised
        checks.append(CheckResult("limsup", False, f"{type(exc).__name__}: {exc}"))
    cons = check_constraints(sys, K)
    checks.append(CheckResult("constraints", cons.passed,
                              "all tables hold" if cons.passed else "; ".join(cons.violations()[:3])))
    lens = lengths(sys, K + 1)
    return RealizationReport(checks, est, [math.gcd(lens[k], lens[k + 1]) for k in range(K + 1)])


def perturbed(sys: SadicSystem, k: int, bump: int = 1) -> SadicSystem:
    """Negative control: the same system with ``n_k`` increased."""
    t = sys.tau(k)
    return sys.with_override(k, TauParams(t.m, t.n + bump, t.r))
