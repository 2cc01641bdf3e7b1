"""Derived integer sequences, parameter constraint tables and decay data."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidParameters
from .words import SadicSystem, TauParams, hamming, prefix


@dataclass
class DerivedSeqs:
    """Exact sequences derived from a system up to depth ``K``.

    Attributes
    ----------
    a, b : list of int
        ``a[k]`` for ``0 <= k <= K + 1`` and ``b[k]`` for ``0 <= k <= K``.
    lengths : list of int
        ``|v_k|`` for ``0 <= k <= K + 1``.
    v_minus1 : int
        The seed value ``|u_0| - |v_0|``.
    betas : list of Fraction
        ``beta_k`` for ``0 <= k <= K``.
    products : list of Fraction
        ``products[k]`` is the product of ``beta_0 .. beta_{k-1}``.
    """

    K: int
    taus: list[TauParams]
    a: list[int]
    b: list[int]
    lengths: list[int]
    v_minus1: int
    betas: list[Fraction] = field(default_factory=list)
    products: list[Fraction] = field(default_factory=list)

    def length(self, k: int) -> int:
        return self.v_minus1 if k == -1 else self.lengths[k]

    def a_product(self, lo: int, hi: int) -> int:
        """``a_lo * ... * a_hi`` (empty product is 1)."""
        return math.prod(self.a[lo:hi + 1])

    def gcds(self) -> list[int]:
        """``gcd(|v_k|, |v_{k+1}|)`` for ``0 <= k <= K``."""
        return [math.gcd(self.lengths[k], self.lengths[k + 1]) for k in range(self.K + 1)]


def a_sequence(taus: list[TauParams]) -> list[int]:
    """``a_0 = 2^[r_0 > 0]`` and ``a_{k+1} = 2^[r_{k+1} > 0] (n_k - m_k)``."""
    out = [2 ** taus[0].has_r]
    for k in range(len(taus) - 1):
        out.append(2 ** taus[k + 1].has_r * (taus[k].n - taus[k].m))
    return out


def lengths(sys: SadicSystem, K: int) -> list[int]:
    """``|v_0| .. |v_K|`` from the three-term recursion alone."""
    taus = sys.taus(K + 1)
    a = a_sequence(taus)
    prev, cur = sys.length_v(-1), sys.length_v(0)
    out = [cur]
    for k in range(K):
        prev, cur = cur, (taus[k].m + taus[k].r) * cur + a[k] * prev
        out.append(cur)
    return out


def derive_ab(sys: SadicSystem, K: int, check: bool = True) -> DerivedSeqs:
    """Exact ``a_k``, ``b_k``, ``|v_k|`` and ``beta_k`` up to depth ``K``.

    With ``check`` the recursion lengths are compared with the lengths of
    the substituted words and the two formulas for ``beta_k`` are compared.
    """
    if K < 0:
        raise InvalidParameters("K must be nonnegative")
    taus = sys.taus(K + 2)
    a = a_sequence(taus)
    b = [t.m + t.r for t in taus[:K + 1]]
    lens = lengths(sys, K + 1)
    if check:
        direct = [sys.length_v(k) for k in range(K + 2)]
        if direct != lens:
            raise ArithmeticError("length recursion disagrees with word expansion")
    seqs = DerivedSeqs(K, taus, a, b, lens, sys.length_v(-1))
    prev = Fraction(a[0] * seqs.v_minus1, lens[0])
    prod = Fraction(1)
    seqs.products.append(prod)
    for k in range(K + 1):
        direct_beta = Fraction(a[k + 1] * lens[k], lens[k + 1])
        rec_beta = Fraction(a[k + 1]) / (b[k] + prev)
        if check and direct_beta != rec_beta:
            raise ArithmeticError(f"beta_{k}: {direct_beta} != {rec_beta}")
        seqs.betas.append(direct_beta)
        prod *= direct_beta
        seqs.products.append(prod)
        prev = direct_beta
    return seqs


def beta(seqs: DerivedSeqs, k: int) -> Fraction:
    """``beta_k``, checked against its continued-fraction recursion."""
    if not 0 <= k <= seqs.K:
        raise IndexError(k)
    direct = Fraction(seqs.a[k + 1] * seqs.lengths[k], seqs.lengths[k + 1])
    prev = seqs.betas[k - 1] if k else Fraction(seqs.a[0] * seqs.v_minus1, seqs.lengths[0])
    rec = Fraction(seqs.a[k + 1]) / (seqs.b[k] + prev)
    if direct != rec:
        raise ArithmeticError(f"beta_{k}: {direct} != {rec}")
    return direct


# ---------------------------------------------------------------------------
# decay


@dataclass
class DecayReport:
    epsilons: list[Fraction]
    products: list[Fraction]
    ratios: list[float]
    kappa: float
    constant: float
    summable: bool
    certified: bool

    @property
    def envelope_holds(self) -> bool:
        return all(float(p) <= self.constant * self.kappa ** k * (1 + 1e-12)
                   for k, p in enumerate(self.products))


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def decay_report(seqs: DerivedSeqs, K: int | None = None, certified: bool = True) -> DecayReport:
    """Exact epsilons, product sequence and a least-squares geometric fit.

    ``epsilons[k] = a_0 ... a_k / |v_k|``.  The fit is of ``log`` of the
    beta products against ``k``; ``constant`` is then raised to the
    smallest value making the envelope valid on the computed range.
    """
    K = seqs.K if K is None else K
    eps = [Fraction(seqs.a_product(0, k), seqs.lengths[k]) for k in range(K + 1)]
    prods = seqs.products[:K + 1]
    ks = np.arange(len(prods), dtype=float)
    logs = np.array([_log(p) for p in prods])
    slope, _ = np.polyfit(ks, logs, 1) if len(prods) > 1 else (0.0, 0.0)
    kappa = float(math.exp(slope))
    constant = float(max(math.exp(lg - k * slope) for k, lg in enumerate(logs)))
    ratios = [float(eps[k + 1] / eps[k]) for k in range(len(eps) - 1)]
    tail = ratios[len(ratios) // 2:] or ratios
    summable = kappa < 1 and bool(tail) and max(tail) < 1
    return DecayReport(eps, prods, ratios, kappa, constant, summable, certified)


# ---------------------------------------------------------------------------
# constraint tables


@dataclass
class KVerdict:
    k: int
    status: str
    cases: list[str] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)


@dataclass
class ConstraintReport:
    verdicts: list[KVerdict]

    @property
    def passed(self) -> bool:
        return all(not v.violations for v in self.verdicts)

    @property
    def label(self) -> str:
        return "necessary-conditions-hold" if self.passed else "violated"

    def violations(self) -> list[str]:
        return [f"k={v.k}: {msg}" for v in self.verdicts for msg in v.violations]


def _cond(text: str, ok: bool) -> tuple[str, bool]:
    return text, ok


def _exactly_one(tag: str, cases: dict[str, list[tuple[str, bool]]], verdict: KVerdict) -> None:
    holding = [name for name, conds in cases.items() if all(ok for _, ok in conds)]
    if len(holding) == 1:
        verdict.cases.append(f"{tag}({holding[0]})")
        return
    if not holding:
        detail = "; ".join(
            f"({name}) fails " + ", ".join(text for text, ok in conds if not ok)
            for name, conds in cases.items()
        )
        verdict.violations.append(f"{tag}: no case holds: {detail}")
    else:
        verdict.violations.append(f"{tag}: several cases hold: {holding}")


def check_constraints(sys: SadicSystem, K: int) -> ConstraintReport:
    """Evaluate the parameter tables for ``2 <= k <= K``.

    Levels below 2 are reported as ``unchecked-by-theory``.
    """
    taus = sys.taus(K + 2)
    a = a_sequence(taus)
    verdicts = []
    for k in range(K + 1):
        if k < 2:
            verdicts.append(KVerdict(k, "unchecked-by-theory"))
            continue
        t, t1, t2, nxt = taus[k], taus[k - 1], taus[k - 2], taus[k + 1]
        m, n, r = t.m, t.n, t.r
        ver = KVerdict(k, "checked")
        if n > 2 * m:
            _exactly_one("svp", {
                "i": [
                    _cond(f"n_k = 2m_k+2 ({n} vs {2 * m + 2})", n == 2 * m + 2),
                    _cond(f"n_(k-1) = m_(k-1)+1 ({t1.n} vs {t1.m + 1})", t1.n == t1.m + 1),
                    _cond(f"3n_(k-2) <= 4m_(k-2)+3 ({3 * t2.n} vs {4 * t2.m + 3})",
                          3 * t2.n <= 4 * t2.m + 3),
                    _cond(f"r_k = r_(k-1) = 0 ({r}, {t1.r})", r == 0 and t1.r == 0),
                ],
                "ii": [
                    _cond(f"n_k = 2m_k+1 ({n} vs {2 * m + 1})", n == 2 * m + 1),
                    _cond(f"n_(k-1) <= 2m_(k-1) ({t1.n} vs {2 * t1.m})", t1.n <= 2 * t1.m),
                    _cond(f"r_k = 0 ({r})", r == 0),
                ],
                "iii": [
                    _cond(f"n_k = 2m_k+1 ({n} vs {2 * m + 1})", n == 2 * m + 1),
                    _cond(f"m_(k-1) = 1 ({t1.m})", t1.m == 1),
                    _cond(f"n_(k-1) = 3 ({t1.n})", t1.n == 3),
                    _cond(f"n_(k-2) = m_(k-2)+1 ({t2.n} vs {t2.m + 1})", t2.n == t2.m + 1),
                    _cond(f"r_k = r_(k-1) = r_(k-2) = 0 ({r}, {t1.r}, {t2.r})",
                          r == 0 and t1.r == 0 and t2.r == 0),
                ],
            }, ver)
        if nxt.r > 0:
            if 3 * n > 4 * m + 3:
                ver.violations.append(f"rk: r_(k+1) > 0 but 3n_k <= 4m_k+3 fails ({3 * n} > {4 * m + 3})")
            _exactly_one("rk", {
                "i": [_cond(f"2n_k <= 3m_k ({2 * n} vs {3 * m})", 2 * n <= 3 * m)],
                "ii": [
                    _cond(f"(m_k, n_k) = (3, 5) ({m}, {n})", (m, n) == (3, 5)),
                    _cond(f"n_(k-1) = m_(k-1)+1 ({t1.n} vs {t1.m + 1})", t1.n == t1.m + 1),
                    _cond(f"r_k = r_(k-1) = 0 ({r}, {t1.r})", r == 0 and t1.r == 0),
                ],
                "iii": [
                    _cond(f"(m_k, n_k) = (1, 2) ({m}, {n})", (m, n) == (1, 2)),
                    _cond(f"n_(k-1) <= 2m_(k-1) ({t1.n} vs {2 * t1.m})", t1.n <= 2 * t1.m),
                    _cond(f"r_k = 0 ({r})", r == 0),
                ],
                "iv": [
                    _cond(f"(m_k, n_k) = (1, 2) ({m}, {n})", (m, n) == (1, 2)),
                    _cond(f"(m_(k-1), n_(k-1)) = (1, 3) ({t1.m}, {t1.n})", (t1.m, t1.n) == (1, 3)),
                    _cond(f"n_(k-2) = m_(k-2)+1 ({t2.n} vs {t2.m + 1})", t2.n == t2.m + 1),
                    _cond(f"r_k = r_(k-1) = 0 ({r}, {t1.r})", r == 0 and t1.r == 0),
                ],
            }, ver)
        bk = m + r
        if a[k + 1] > bk + 2:
            ver.violations.append(f"a2: a_(k+1) <= b_k+2 fails ({a[k + 1]} > {bk + 2})")
        elif a[k + 1] == bk + 2:
            if nxt.r != 0 or n != 2 * m + 2:
                ver.violations.append(
                    f"a2: a_(k+1) = b_k+2 = {bk + 2} requires r_(k+1) = 0 and n_k = 2m_k+2 "
                    f"(got r_(k+1) = {nxt.r}, n_k = {n})"
                )
            else:
                ver.cases.append("a2(equality)")
        else:
            ver.cases.append("a2")
        verdicts.append(ver)
    return ConstraintReport(verdicts)


# ---------------------------------------------------------------------------
# mean almost periodicity


def commutator_bound(sys: SadicSystem, k: int) -> int:
    """``2 |u_0| 2^(#r_j>0, j<k) prod_(j<k) (n_j - m_j)``."""
    taus = sys.taus(k)
    return 2 * sys.length_u(0) * 2 ** sum(t.has_r for t in taus) * math.prod(t.n - t.m for t in taus)


def commutator_distance(sys: SadicSystem, k: int, budget: int | None = None) -> int:
    """Hamming distance between ``v_k u_k`` and ``u_k v_k`` (materialized)."""
    v, u = sys.word_v(k, budget=budget), sys.word_u(k, budget=budget)
    return hamming(v + u, u + v)


@dataclass
class MeanAPReport:
    k: int
    shift: int
    prefix_len: int
    mismatches: int
    density: Fraction
    bound: Fraction

    @property
    def below(self) -> bool:
        return self.density < self.bound


def mean_ap_bound(sys: SadicSystem, k: int) -> Fraction:
    """``8 |u_0| 2^(#r_j>0, j<k) prod_(j<k) (n_j - m_j) / |v_(k+1)|``."""
    taus = sys.taus(k)
    num = 8 * sys.length_u(0) * 2 ** sum(t.has_r for t in taus) * math.prod(t.n - t.m for t in taus)
    return Fraction(num, sys.length_v(k + 1))


def mean_ap_report(sys: SadicSystem, k: int, prefix_len: int) -> MeanAPReport:
    """Density of positions where a generated prefix differs from its shift by ``|v_k|``."""
    shift = sys.length_v(k)
    if prefix_len <= 2 * sys.length_v(k + 1) + shift:
        raise InvalidParameters(
            f"prefix of length {prefix_len} too short for level {k} (needs > {2 * sys.length_v(k + 1) + shift})"
        )
    x = np.frombuffer(prefix(sys, prefix_len).encode("utf-32-le"), dtype=np.uint32)
    span = prefix_len - shift
    bad = int(np.count_nonzero(x[:span] != x[shift:shift + span]))
    return MeanAPReport(k, shift, prefix_len, bad, Fraction(bad, span), mean_ap_bound(sys, k))
