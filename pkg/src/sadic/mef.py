"""Maximal equicontinuous factor: odometer and nilmanifold descriptors.

Also hosts odometer arithmetic, truncated character evaluation, the
approximate-eigenfunction orbit check and the eigenvalue-group comparator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
import sympy

from .errors import InvalidParameters, PrecisionInsufficient
from .spectrum import (
    EigenvalueGroupDescriptor,
    Exponent,
    Interval,
    alpha_k_enclosure,
    eigenvalue_group,
    p_adic_frac,
    valuation,
)
from .structure import a_sequence, check_constraints
from .words import SadicSystem, decompose, prefix

# ---------------------------------------------------------------------------
# Descriptors


@dataclass
class OdometerDescriptor:
    """Moduli ``g_k`` and the exponents ``R`` describing their growth."""

    moduli: list[int]
    exponents: dict[int, Exponent]
    exact: bool

    @property
    def finite(self) -> bool | None:
        """True for a finite cyclic group, None when undecided."""
        if any(e.infinite for e in self.exponents.values()):
            return False
        if self.exact:
            return True
        if any(e.status == "growing" for e in self.exponents.values()):
            return False
        return None

    @property
    def order(self) -> int | None:
        if not self.finite:
            return None
        return math.prod(p ** int(e.value) for p, e in self.exponents.items())

    def describe(self) -> str:
        inf = sorted(p for p, e in self.exponents.items() if e.likely_infinite())
        if self.finite:
            n = self.order
            return "trivial odometer" if n == 1 else f"Z/{n}Z"
        if inf == [2] and all(e.likely_infinite() or e.value == 0 for e in self.exponents.values()):
            name = "binary odometer"
        elif inf:
            name = "odometer over primes " + ",".join(map(str, inf))
        else:
            return "odometer (undecided at depth)"
        finite_part = [f"{p}^{int(e.value)}" for p, e in sorted(self.exponents.items())
                       if not e.likely_infinite()]
        return name + (f" x Z/({'*'.join(finite_part)})" if finite_part else "")


@dataclass
class NilmanifoldDescriptor:
    """Exponent map ``L`` plus rotation data (alpha enclosure and offsets)."""

    exponents: dict[int, Exponent]
    alpha: Interval
    offsets: list[tuple[Fraction, Fraction]]
    exact: bool

    def describe(self) -> str:
        if not self.exponents and self.exact:
            return "S^1"
        if not self.exponents:
            return "S^1 (at depth)"
        parts = []
        for p, e in sorted(self.exponents.items()):
            parts.append(str(p) if e.likely_infinite() else f"{p}^{int(e.value)}")
        return "M_(" + ",".join(parts) + ")" if len(parts) > 1 or "^" in parts[0] else f"M_{parts[0]}"


@dataclass
class MEFDescriptor:
    odometer: OdometerDescriptor
    nilmanifold: NilmanifoldDescriptor
    depth: int
    certified: bool
    spectrum: EigenvalueGroupDescriptor = field(repr=False, default=None)

    def describe(self) -> str:
        return f"{self.odometer.describe()} x {self.nilmanifold.describe()}"

    def to_json(self) -> dict:
        return {
            "odometer": list(self.odometer.moduli) + ["periodic" if self.odometer.exact else "truncated"],
            "nilmanifold": {
                "exponents": [[p, e.to_json()] for p, e in sorted(self.nilmanifold.exponents.items())],
                "alpha": self.nilmanifold.alpha.as_strings(),
            },
            "depth": self.depth,
            "odometer_exponents": [[p, e.to_json()] for p, e in sorted(self.odometer.exponents.items())],
            "certified": self.certified,
            "description": self.describe(),
        }


def mef(sys: SadicSystem, K: int) -> MEFDescriptor:
    """Odometer times nilmanifold descriptor at depth ``K``.

    ``certified`` is False when the parameter constraints fail.
    """
    desc = eigenvalue_group(sys, K)
    exact = desc.mode == "periodic-exact"
    odo = OdometerDescriptor(list(desc.gcds), dict(desc.R), exact)
    nil = NilmanifoldDescriptor(dict(desc.L), desc.alpha, desc.offsets, exact)
    ok = check_constraints(sys, min(K, 30)).passed
    return MEFDescriptor(odo, nil, K, ok, desc)


# ---------------------------------------------------------------------------
# Odometer arithmetic


@dataclass(frozen=True)
class OdometerPoint:
    """Coherent residues ``x_k mod g_k`` along a divisibility chain."""

    moduli: tuple[int, ...]
    residues: tuple[int, ...]

    def __post_init__(self):
        if len(self.moduli) != len(self.residues):
            raise InvalidParameters("moduli and residues differ in length")
        for k in range(len(self.moduli) - 1):
            if self.moduli[k + 1] % self.moduli[k]:
                raise InvalidParameters(f"moduli break the divisibility chain at {k}")
            if (self.residues[k + 1] - self.residues[k]) % self.moduli[k]:
                raise InvalidParameters(f"residues incoherent at level {k}")

    @classmethod
    def zero(cls, moduli) -> "OdometerPoint":
        return cls(tuple(moduli), (0,) * len(moduli))

    @classmethod
    def from_integer(cls, moduli, n: int) -> "OdometerPoint":
        return cls(tuple(moduli), tuple(n % g for g in moduli))


def odometer_step(pt: OdometerPoint, n: int = 1) -> OdometerPoint:
    return OdometerPoint(pt.moduli, tuple((x + n) % g for x, g in zip(pt.residues, pt.moduli)))


# ---------------------------------------------------------------------------
# Characters


def character_eval(theta, z: dict[int, tuple[int, int]], q) -> Fraction | Interval:
    """Angle of the character indexed by ``(theta, z)`` at ``q``, modulo 1.

    ``z`` maps a prime ``p`` to ``(residue, N)``: a p-adic integer known
    modulo ``p**N``.  ``theta`` is a rational or an :class:`Interval`; the
    result has the same kind.  Raises :class:`PrecisionInsufficient` when the
    denominator of ``q`` needs more p-adic digits than are stored.
    """
    q = Fraction(q)
    total = Fraction(0)
    for p in _denominator_primes(q):
        need = -valuation(q, p)
        if p not in z:
            raise PrecisionInsufficient(f"no residue stored for prime {p}")
        residue, N = z[p]
        if need > N:
            raise PrecisionInsufficient(f"q needs {need} digits at p = {p}, only {N} stored")
        total += p_adic_frac(q * (residue % p ** need), p)
    if isinstance(theta, Interval):
        base = theta.scale(q).shift(total)
        shift = math.floor(base.lo)
        return base.shift(Fraction(-shift))
    return (q * Fraction(theta) + total) % 1


def _denominator_primes(q: Fraction) -> list[int]:
    return sorted(sympy.factorint(q.denominator)) if q.denominator > 1 else []


# ---------------------------------------------------------------------------
# Approximate eigenfunctions along an orbit


@dataclass
class OrbitLevel:
    k: int
    diffs: dict[int, tuple[int, int]]
    unmatched: list[int]
    max_jump: float
    jump_bound: float
    cauchy_ok: bool
    eps_bound: float

    @property
    def decomposition_ok(self) -> bool:
        return not self.unmatched

    @property
    def within_eps(self) -> bool:
        """The largest jump stays below the proof's summable bound."""
        return self.max_jump <= self.eps_bound


@dataclass
class OrbitReport:
    k0: int
    K: int
    prefix_len: int
    increments_ok: bool
    levels: list[OrbitLevel]
    alpha: Interval

    @property
    def passed(self) -> bool:
        return self.increments_ok and all(l.decomposition_ok and l.cauchy_ok and l.within_eps
                                          for l in self.levels)


def _dist(x) -> mpmath.mpf:
    return abs(x - mpmath.nint(x))


def _split_diff(diff: int, vk: int, vprev: int, pmax: int, delta: int) -> tuple[int, int] | None:
    for pp in (0, delta):
        rest = diff - pp * vprev
        if rest >= 0 and vk and rest % vk == 0 and rest // vk <= pmax:
            return rest // vk, pp
        if rest == 0:
            return 0, pp
    return None


def factor_orbit_check(sys: SadicSystem, k0: int = 1, prefix_len: int = 100_000, K: int = 6,
                       prec: int = 128) -> OrbitReport:
    """Check the approximate eigenfunctions ``exp(2 pi i alpha_{k0} j(t, k))``.

    ``j(t, k)`` is the distance from ``t`` back to the last level-``k`` block
    start, computed by parsing a prefix of the fixed point at every level.
    For each level the jumps ``j(t, k+1) - j(t, k)`` are split as
    ``p |v_k| + p' |v_{k-1}|`` and the Cauchy bound on
    ``|f_k - f_{k+1}|`` is evaluated at ``prec`` bits.
    """
    x = prefix(sys, prefix_len)
    n = len(x)
    t = np.arange(n, dtype=np.int64)
    js = []
    increments_ok = True
    for k in range(K + 2):
        dec = decompose(x, sys, k)
        starts = np.zeros(n, dtype=bool)
        starts[np.asarray(dec.starts, dtype=np.int64)] = True
        if dec.tail:
            # the trailing fragment is the beginning of one more block
            starts[n - len(dec.tail)] = True
        if dec.offset:
            starts[:dec.offset] = False
        last = np.maximum.accumulate(np.where(starts, t, -1))
        j = t - last
        j[last < 0] = -1
        step = np.diff(j)
        nxt = starts[1:]
        ok = np.where(nxt, j[1:] == 0, step == 1)
        increments_ok &= bool(np.all(ok[j[:-1] >= 0]))
        js.append(j)
    with mpmath.workprec(prec):
        enc = alpha_k_enclosure(sys, k0, 60)
        alpha = mpmath.mpf(enc.lo.numerator) / enc.lo.denominator
        two_pi = 2 * mpmath.pi
        taus = sys.taus(K + 3)
        a = a_sequence(taus)
        levels = []
        for k in range(K + 1):
            valid = (js[k] >= 0) & (js[k + 1] >= 0)
            diffs = np.unique(js[k + 1][valid] - js[k][valid])
            vk, vprev = sys.length_v(k), sys.length_v(k - 1)
            delta = taus[k - 1].n - taus[k - 1].m if k else 1
            pmax = taus[k].n + taus[k].r
            found, unmatched = {}, []
            worst, worst_bound, ok = mpmath.mpf(0), mpmath.mpf(0), True
            for diff in diffs.tolist():
                split = _split_diff(diff, vk, vprev, pmax, delta)
                if split is None:
                    unmatched.append(diff)
                    continue
                found[diff] = split
                p, pp = split
                jump = abs(1 - mpmath.expjpi(2 * alpha * diff))
                bound = two_pi * (_dist(alpha * p * vk) + _dist(alpha * pp * vprev))
                worst = max(worst, jump)
                worst_bound = max(worst_bound, bound)
                ok &= bool(jump <= bound * (1 + mpmath.mpf(2) ** (20 - prec)) + mpmath.mpf(2) ** (10 - prec))
            # the proof's bound on <p alpha_{k0} |v_k|> for k beyond k0
            if k > k0:
                lead = sys.length_v(k0 - 1) * math.prod(a[k0:k + 1])
                eps = pmax * lead / sys.length_v(k + 1)
                eps_prev = (max(delta, 1) * sys.length_v(k0 - 1) * math.prod(a[k0:k])
                            / sys.length_v(k)) if k - 1 > k0 else 0.5
                eps_bound = float(two_pi * (eps + eps_prev))
            else:
                eps_bound = float("inf")
            levels.append(OrbitLevel(k, found, unmatched, float(worst), float(worst_bound), ok, eps_bound))
    return OrbitReport(k0, K, n, increments_ok, levels, enc)


# ---------------------------------------------------------------------------
# Comparator


def _structure_key(sys: SadicSystem, depth: int):
    tail = sys.periodic_tail()
    if tail is None:
        return None
    start, period = tail
    span = start + 2 * period + 2
    taus = sys.taus(span)
    return (sys.length_v(0), sys.length_u(0), tuple(a_sequence(taus)), tuple(t.m + t.r for t in taus), period)


def compare_eigenvalue_groups(d1: EigenvalueGroupDescriptor, d2: EigenvalueGroupDescriptor,
                              sys1: SadicSystem | None = None, sys2: SadicSystem | None = None):
    """Three-valued comparison of two eigenvalue groups.

    Returns ``(verdict, reason)`` with verdict ``"equal"``, ``"different"`` or
    ``"unknown-at-depth"``.  A difference is certified when an exact exponent
    on one side is below a rigorous lower bound (or a different exact value)
    on the other.  Equality needs periodic data on both sides generating
    identical length recursions.
    """
    for which in ("L", "R"):
        primes = set(getattr(d1, which)) | set(getattr(d2, which))
        for p in sorted(primes):
            e1, e2 = d1.exponent(which, p), d2.exponent(which, p)
            if e1.certified and e2.certified and e1.value != e2.value:
                return "different", f"{which}({p}): {e1} vs {e2}"
            if e1.certified and e1.value < e2.value:
                return "different", f"{which}({p}): {e1} (exact) vs at least {e2}"
            if e2.certified and e2.value < e1.value:
                return "different", f"{which}({p}): at least {e1} vs {e2} (exact)"
    if sys1 is not None and sys2 is not None:
        k1, k2 = _structure_key(sys1, d1.depth), _structure_key(sys2, d2.depth)
        if k1 is not None and k1 == k2:
            return "equal", "identical periodic length recursions and seed lengths"
    return "unknown-at-depth", "no certified difference at this depth"
