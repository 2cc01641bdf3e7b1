"""Continued-fraction convergents, eigenvalue enclosures and exponent maps.

Everything here is exact rational or integer arithmetic.  Floats only appear
in ``__repr__``-style display helpers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import sympy

from .structure import a_sequence
from .words import SadicSystem

INF = math.inf


# ---------------------------------------------------------------------------
# Convergents


@dataclass
class Convergents:
    """Sequences ``c``, ``e``, ``d`` indexed from ``-2`` (stored from offset 0).

    All three satisfy ``x_{k+1} = b_{k+k0+1} x_k + a_{k+k0+1} x_{k-1}``;
    ``d_k = |v_{k+k0+1}|`` and ``e_k / d_k`` tends to ``alpha_{k0}``.
    """

    k0: int
    K: int
    c: list[int]
    e: list[int]
    d: list[int]
    a: list[int]
    b: list[int]

    def at(self, seq: str, k: int) -> int:
        return getattr(self, seq)[k + 2]

    def ratio(self, k: int) -> Fraction:
        return Fraction(self.at("e", k), self.at("d", k))

    def determinant(self, k: int) -> int:
        """``e_{k+1} d_k - e_k d_{k+1}``."""
        return self.at("e", k + 1) * self.at("d", k) - self.at("e", k) * self.at("d", k + 1)

    def predicted_determinant(self, k: int) -> int:
        d_m2 = self.at("d", -2)
        return (-1) ** k * d_m2 * math.prod(self.a[self.k0:self.k0 + k + 2])


def convergents(sys: SadicSystem, k0: int, K: int) -> Convergents:
    """Convergents for ``alpha_{k0}`` up to index ``K``.

    The determinant identity is checked at every step and a failure raises
    ``ArithmeticError``.
    """
    if K < 1 or k0 < 0:
        raise ValueError("need K >= 1 and k0 >= 0")
    taus = sys.taus(k0 + K + 3)
    a = a_sequence(taus)
    b = [t.m + t.r for t in taus]
    c, e = [1, 0], [0, 1]
    d = [sys.length_v(k0 - 1), sys.length_v(k0)]
    for k in range(-1, K):
        j = k + k0 + 1
        for seq in (c, e, d):
            seq.append(b[j] * seq[-1] + a[j] * seq[-2])
    conv = Convergents(k0, K, c, e, d, a, b)
    for k in range(-1, K):
        if conv.determinant(k) != conv.predicted_determinant(k):
            raise ArithmeticError(f"determinant identity fails at k = {k}")
    return conv


@dataclass(frozen=True)
class Interval:
    """Closed rational interval ``[lo, hi]``."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def scale(self, q: Fraction) -> "Interval":
        a, b = self.lo * q, self.hi * q
        return Interval(min(a, b), max(a, b))

    def shift(self, r: Fraction) -> "Interval":
        return Interval(self.lo + r, self.hi + r)

    def __float__(self) -> float:
        return float(self.mid)

    def as_strings(self) -> list[str]:
        return [frac_str(self.lo), frac_str(self.hi)]


def frac_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(text: str | int) -> Fraction:
    return Fraction(text)


def alpha_k_enclosure(sys: SadicSystem, k0: int, K: int, conv: Convergents | None = None) -> Interval:
    """Exact enclosure of ``alpha_{k0}`` from two consecutive convergents.

    When ``|v_{k0-1}| = 0`` the sequence is constant ``1/|v_{k0}|`` and the
    enclosure is that single point.
    """
    conv = conv or convergents(sys, k0, K)
    x, y = conv.ratio(K - 1), conv.ratio(K)
    return Interval(min(x, y), max(x, y))


def alpha_enclosure(sys: SadicSystem, K: int) -> Interval:
    """Exact enclosure of ``alpha``, equal to ``a_0`` times ``alpha_1``."""
    if K < 2:
        raise ValueError("K must be at least 2")
    a0 = 2 ** sys.tau(0).has_r
    return alpha_k_enclosure(sys, 1, K).scale(Fraction(a0))


def simplest_rational(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator in ``[lo, hi]`` (Stern-Brocot descent)."""
    if lo > hi:
        raise ValueError("empty interval")
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    rest = simplest_rational(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / rest


def irrationality_witness(sys: SadicSystem, K: int, k0: int = 1) -> tuple[Fraction, int, bool]:
    """Simplest rational in the depth-``K`` enclosure of ``alpha_{k0}``.

    Returns it, the bound ``d_{K//2}`` and whether its denominator exceeds
    the bound.
    """
    conv = convergents(sys, k0, K)
    enc = alpha_k_enclosure(sys, k0, K, conv)
    s = simplest_rational(enc.lo, enc.hi)
    bound = conv.at("d", K // 2)
    return s, bound, s.denominator > bound


# ---------------------------------------------------------------------------
# Offsets


def eigenvalue_offsets(sys: SadicSystem, K: int) -> list[tuple[Fraction, Fraction]]:
    """Pairs ``(q_k, rho_k)`` with ``alpha_{k+1} = q_k alpha + rho_k`` for ``k <= K``."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    taus = sys.taus(K + 2)
    a = a_sequence(taus)
    b = [t.m + t.r for t in taus]
    v0 = sys.length_v(0)
    r = [Fraction(0), Fraction(1, v0)]
    for k in range(1, K):
        r.append(r[k - 1] / a[k - 1] - b[k] * r[k] / a[k])
    out = []
    prod = v0
    for k in range(K + 1):
        prod *= a[k]
        out.append((Fraction((-1) ** k * sys.length_v(k), prod), r[k] / a[k]))
    return out


def offset_contained(sys: SadicSystem, k: int, offsets=None, enclosure_depth: int = 12,
                     max_depth: int = 400) -> tuple[bool, int]:
    """Check ``q_k alpha + rho_k`` against the enclosure of ``alpha_{k+1}``.

    The enclosure of ``alpha`` is refined until the image interval fits or
    ``max_depth`` is reached.  Returns ``(ok, alpha_depth_used)``.
    """
    offsets = offsets or eigenvalue_offsets(sys, k)
    q, rho = offsets[k]
    target = alpha_k_enclosure(sys, k + 1, enclosure_depth)
    depth = max(4, enclosure_depth)
    while depth <= max_depth:
        image = alpha_enclosure(sys, depth).scale(q).shift(rho)
        if image in target:
            return True, depth
        if image.lo > target.hi or image.hi < target.lo:
            return False, depth
        depth *= 2
    return False, depth


# ---------------------------------------------------------------------------
# p-adic helpers


def valuation(x: int | Fraction, p: int) -> float:
    """``p``-adic valuation; ``inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    v, num, den = 0, x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def p_adic_frac(q: Fraction | int, p: int) -> Fraction:
    """The ``p``-adic fractional part of ``q``, a rational in ``[0, 1)``."""
    q = Fraction(q)
    e = -valuation(q, p) if q else 0
    if e <= 0:
        return Fraction(0)
    pe = p ** e
    rest = q.denominator // pe
    return Fraction(q.numerator * pow(rest, -1, pe) % pe, pe)


# ---------------------------------------------------------------------------
# Exponent maps


@dataclass(frozen=True)
class Exponent:
    """Exponent value with its certification status.

    ``status`` is ``"exact"`` (certified, possibly infinite),
    ``"lower-bound"`` (finite-depth maximum) or ``"growing"`` (lower bound
    that was still increasing near the end of the range).
    """

    value: float
    status: str = "exact"

    @property
    def infinite(self) -> bool:
        return self.value == INF

    @property
    def certified(self) -> bool:
        return self.status == "exact"

    def likely_infinite(self) -> bool:
        return self.infinite or self.status == "growing"

    def to_json(self):
        if self.infinite:
            return "inf"
        if self.status == "growing":
            return "growing"
        return int(self.value) if self.certified else {"at-least": int(self.value)}

    def __str__(self):
        if self.infinite:
            return "inf"
        tag = {"exact": "", "lower-bound": "+", "growing": "+ (growing)"}[self.status]
        return f"{int(self.value)}{tag}"


def _primes_of(values: Iterable[int]) -> set[int]:
    out: set[int] = set()
    for v in values:
        if v > 1:
            out.update(sympy.factorint(v))
    return out


def _matrix(b: int, a: int):
    return ((b, a), (1, 0))


def _matmul(x, y):
    return tuple(tuple(sum(x[i][t] * y[t][j] for t in range(2)) for j in range(2)) for i in range(2))


def _apply(m, w):
    return (m[0][0] * w[0] + m[0][1] * w[1], m[1][0] * w[0] + m[1][1] * w[1])


@dataclass
class ExponentReport:
    L: dict[int, Exponent]
    R: dict[int, Exponent]
    depth: int
    mode: str
    gcds: list[int] = field(default_factory=list)
    cofactors: list[int] = field(default_factory=list)
    complete: bool = False

    def get(self, which: str, p: int) -> Exponent:
        table = self.L if which == "L" else self.R
        if p in table:
            return table[p]
        return Exponent(0, "exact" if self.complete else "lower-bound")


def _finite_scan(sys: SadicSystem, K: int):
    taus = sys.taus(K + 2)
    a = a_sequence(taus)
    lens = [sys.length_v(k) for k in range(K + 2)]
    gcds = [math.gcd(lens[k], lens[k + 1]) for k in range(K + 1)]
    prods, prod = [], sys.length_v(0)
    for k in range(K + 1):
        prod *= a[k]
        prods.append(prod)
    cof = [prods[k] // gcds[k] for k in range(K + 1)]
    return a, gcds, cof


def _lower_bounds(values: list[int], primes: set[int], K: int) -> dict[int, Exponent]:
    out = {}
    quarter = max(1, (K + 1) // 4)
    for p in sorted(primes):
        vals = [valuation(x, p) for x in values]
        best = max(vals)
        if best == 0:
            continue
        recent = max(vals[-quarter:])
        earlier = max(vals[:-quarter]) if len(vals) > quarter else 0
        out[p] = Exponent(best, "growing" if recent > earlier else "lower-bound")
    return out


def _periodic_exact(sys: SadicSystem, start: int, period: int, primes: set[int],
                    pre_gcds: list[int], pre_cof: list[int]):
    """Exact exponents when the parameters are periodic from ``start`` on.

    From level ``s = start + 1`` the step matrices ``[[b_k, a_k], [1, 0]]``
    repeat with the given period.  Infinite exponents are read off the
    product ``T`` over one period; finite ones come from the eventually
    periodic orbit of the length vector modulo a power of ``p``.
    """
    s = start + 1
    taus = sys.taus(s + 2 * period + 2)
    a = a_sequence(taus)
    b = [t.m + t.r for t in taus]
    steps = [_matrix(b[s + i], a[s + i]) for i in range(period)]
    T = ((1, 0), (0, 1))
    for M in steps:
        T = _matmul(M, T)
    W = (sys.length_v(s), sys.length_v(s - 1))
    tr, det = T[0][0] + T[1][1], T[0][0] * T[1][1] - T[0][1] * T[1][0]
    TW = _apply(T, W)
    eigen = None
    if TW[0] * W[1] == TW[1] * W[0]:
        eigen = Fraction(TW[0], W[0]) if W[0] else Fraction(TW[1], W[1])
    v0 = sys.length_v(0)
    a_pre = math.prod(a[:s])
    L, R = {}, {}
    for p in sorted(primes):
        D = valuation(det, p)
        t = valuation(tr, p)
        mu1 = min(t, D / 2)
        if eigen is not None:
            growth = valuation(eigen, p) if eigen else INF
            r_inf = growth > 0
            l_inf = D - growth > 0
        else:
            r_inf = mu1 > 0
            l_inf = D > 0
        r_val = INF if r_inf else None
        l_val = INF if l_inf else None
        if eigen is not None:
            # the period multiplies every length by the integer eigenvalue,
            # so valuations repeat with period ``period`` after level s - 1
            _, g_all, c_all = _finite_scan(sys, s + period)
            r_val = max(valuation(g, p) for g in g_all) if r_val is None else r_val
            l_val = max(valuation(c, p) for c in c_all) if l_val is None else l_val
        elif r_val is None or l_val is None:
            fin_r, fin_l = _cycle_max(steps, W, p, v0 * a_pre, pre_gcds, pre_cof)
            r_val = fin_r if r_val is None else r_val
            l_val = fin_l if l_val is None else l_val
        if r_val:
            R[p] = Exponent(r_val, "exact")
        if l_val:
            L[p] = Exponent(l_val, "exact")
    return L, R


def _cycle_max(steps, W, p, prod_before, pre_gcds, pre_cof):
    """Exact sup of ``v_p(g_k)`` and ``v_p(cofactor_k)`` over the tail.

    The state ``(phase, vector mod p^N)`` eventually cycles and valuations
    below ``N`` are determined by the state, so ``N`` is doubled until every
    valuation seen stays below it.  Only called when ``R(p)`` is finite, in
    which case every tail ``a_k`` is a ``p``-unit (the period determinant has
    valuation 0) or ``L(p)`` is already known to be infinite.
    """
    period = len(steps)
    base_r = max((valuation(g, p) for g in pre_gcds), default=0)
    base_l = max((valuation(c, p) for c in pre_cof), default=0)
    cum = valuation(prod_before, p)
    N = 8
    while True:
        mod = p ** N
        seen = set()
        phase, w = 0, (W[0] % mod, W[1] % mod)
        best_r, best_l, overflow = 0, 0, False
        while (phase, w) not in seen:
            seen.add((phase, w))
            g = math.gcd(w[0], w[1], mod)
            vr = valuation(g, p)
            if vr >= N:
                overflow = True
                break
            best_r = max(best_r, vr)
            best_l = max(best_l, cum - vr)
            w = _apply(steps[phase], w)
            w = (w[0] % mod, w[1] % mod)
            phase = (phase + 1) % period
        if not overflow:
            return max(base_r, best_r), max(base_l, best_l)
        N *= 2


def group_exponents(sys: SadicSystem, K: int) -> ExponentReport:
    """Exponent maps ``L`` and ``R``.

    Finite-depth maxima are lower bounds.  With a declared periodic tail the
    values are exact (including infinity) and primes outside the reported
    maps have exponent exactly 0.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    a, gcds, cof = _finite_scan(sys, K)
    tail = sys.periodic_tail()
    if tail is not None:
        start, period = tail
        s = start + 1
        primes = _primes_of([sys.length_v(0)] + a_sequence(sys.taus(s + 2 * period + 2)))
        pre = min(s, K + 1)
        L, R = _periodic_exact(sys, start, period, primes, gcds[:pre], cof[:pre])
        return ExponentReport(L, R, K, "periodic-exact", gcds, cof, complete=True)
    primes = _primes_of([sys.length_v(0)] + a)
    return ExponentReport(_lower_bounds(cof, primes, K), _lower_bounds(gcds, primes, K), K,
                          "finite-depth", gcds, cof, complete=False)


# ---------------------------------------------------------------------------
# Descriptor and membership


@dataclass
class EigenvalueGroupDescriptor:
    """Enclosure of ``alpha``, exponent maps and offset pairs at depth ``K``."""

    alpha: Interval
    L: dict[int, Exponent]
    R: dict[int, Exponent]
    offsets: list[tuple[Fraction, Fraction]]
    depth: int
    gcds: list[int]
    complete: bool
    mode: str

    def exponent(self, which: str, p: int) -> Exponent:
        table = self.L if which == "L" else self.R
        if p in table:
            return table[p]
        return Exponent(0, "exact" if self.complete else "lower-bound")

    def to_json(self) -> dict:
        def emap(m):
            return [[p, e.to_json()] for p, e in sorted(m.items())]

        return {
            "alpha": self.alpha.as_strings(),
            "L": emap(self.L),
            "R": emap(self.R),
            "offsets": [[frac_str(q), frac_str(r)] for q, r in self.offsets],
            "depth": self.depth,
            "mode": self.mode,
        }


def eigenvalue_group(sys: SadicSystem, K: int) -> EigenvalueGroupDescriptor:
    rep = group_exponents(sys, K)
    return EigenvalueGroupDescriptor(
        alpha_enclosure(sys, max(K, 2)), rep.L, rep.R, eigenvalue_offsets(sys, K), K,
        rep.gcds, rep.complete, rep.mode,
    )


def _rational_bezout(values: list[Fraction]) -> tuple[Fraction, list[int]]:
    """Generator ``h`` of the subgroup of Q spanned by ``values`` and integer
    coefficients ``c`` with ``sum(c_i values_i) = h``."""
    den = math.lcm(*(v.denominator for v in values))
    ints = [int(v * den) for v in values]
    g, coeffs = 0, [0] * len(ints)
    for i, x in enumerate(ints):
        if x == 0:
            continue
        if g == 0:
            g, coeffs = abs(x), [0] * len(ints)
            coeffs[i] = 1 if x > 0 else -1
            continue
        d, s, t = _ext_gcd(g, x)
        coeffs = [s * c for c in coeffs]
        coeffs[i] += t
        g = d
    return Fraction(g, den), coeffs


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def offset_for(desc: EigenvalueGroupDescriptor, q: Fraction) -> Fraction | None:
    """A rational ``r_q`` with ``q alpha + r_q`` an eigenvalue, from stored offsets.

    Writes ``q`` as an integer combination of ``1`` (for ``alpha`` itself)
    and the ``q_k``; returns ``None`` when ``q`` is outside their span.
    """
    q = Fraction(q)
    gens = [Fraction(1)] + [qk for qk, _ in desc.offsets]
    rhos = [Fraction(0)] + [rk for _, rk in desc.offsets]
    h, coeffs = _rational_bezout(gens)
    if q == 0:
        return Fraction(0)
    t = q / h
    if t.denominator != 1:
        return None
    return sum((int(t) * c * r for c, r in zip(coeffs, rhos)), Fraction(0))


def eigenvalue_membership(desc: EigenvalueGroupDescriptor, q, r) -> str:
    """Is ``q alpha + r`` an additive continuous eigenvalue?

    Returns ``"member"``, ``"non-member"`` or ``"unknown-at-depth"``.
    """
    q, r = Fraction(q), Fraction(r)
    unknown = False
    for p in _primes_of([q.denominator]):
        need = -valuation(q, p)
        e = desc.exponent("L", p)
        if e.value >= need:
            continue
        if e.certified:
            return "non-member"
        unknown = True
    if unknown:
        return "unknown-at-depth"
    r_q = offset_for(desc, q)
    if r_q is None:
        return "unknown-at-depth"
    rest = r - r_q
    g_last = desc.gcds[-1] if desc.gcds else 1
    if g_last % rest.denominator == 0:
        return "member"
    for p in _primes_of([rest.denominator]):
        need = -valuation(rest, p)
        e = desc.exponent("R", p)
        if e.value >= need and e.certified:
            continue
        if e.certified or (e.value < need and e.status == "exact"):
            return "non-member"
        unknown = True
    return "unknown-at-depth" if unknown else "member"
