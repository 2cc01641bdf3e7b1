"""Incidence matrices, frequencies, balance data and cylinder measures."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidParameters, NonPrimitive, NotAFactor
from .mef import compare_eigenvalue_groups
from .spectrum import (
    EigenvalueGroupDescriptor,
    Interval,
    alpha_enclosure,
    alpha_k_enclosure,
    convergents,
    eigenvalue_group,
    eigenvalue_offsets,
)
from .structure import a_sequence
from .words import SadicSystem, Substitution, build_tau, factor_set, prefix

# ---------------------------------------------------------------------------
# Incidence matrices


@dataclass(frozen=True)
class IncidenceMatrix:
    """``counts[i][j]`` = occurrences of ``rows[i]`` in the image of ``cols[j]``."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.counts, dtype=object)

    def max_entry(self) -> int:
        return max(max(r) for r in self.counts)

    def __matmul__(self, other: "IncidenceMatrix") -> "IncidenceMatrix":
        if self.cols != other.rows:
            raise InvalidParameters("alphabets do not chain")
        prod = self.as_array().dot(other.as_array())
        return IncidenceMatrix(self.rows, other.cols, tuple(tuple(int(x) for x in r) for r in prod))


def incidence(s: Substitution) -> IncidenceMatrix:
    rows = tuple(sorted(s.target))
    cols = tuple(sorted(s.source))
    counts = tuple(tuple(s[c].count(r) for c in cols) for r in rows)
    return IncidenceMatrix(rows, cols, counts)


def level_incidence(sys: SadicSystem, k: int) -> IncidenceMatrix:
    """Incidence of ``pi`` for ``k = -1``, else of ``tau_k``."""
    return incidence(sys.pi if k == -1 else build_tau(sys.tau(k)))


def cumulative_incidence(sys: SadicSystem, k: int) -> IncidenceMatrix:
    """``M_{-1} M_0 ... M_{k-1}``, the letter counts of ``v_k`` and ``u_k``."""
    out = level_incidence(sys, -1)
    for j in range(k):
        out = out @ level_incidence(sys, j)
    return out


# ---------------------------------------------------------------------------
# Perron root


def _is_primitive(M: np.ndarray) -> bool:
    n = M.shape[0]
    B = (M > 0).astype(np.int64)
    P = B.copy()
    for _ in range((n - 1) ** 2 + 1):
        if np.all(P > 0):
            return True
        P = ((P @ B) > 0).astype(np.int64)
    return False


def perron(M, tol: float = 1e-12, max_iter: int = 100_000) -> Interval:
    """Collatz-Wielandt enclosure of the Perron root of a primitive matrix.

    Iterates ``x -> M x`` on integer vectors; ``min (Mx)_i / x_i`` and
    ``max (Mx)_i / x_i`` bracket the root exactly.
    """
    if isinstance(M, IncidenceMatrix):
        M = M.counts
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    if any(len(r) != n for r in A) or any(x < 0 for r in A for x in r):
        raise InvalidParameters("need a square nonnegative matrix")
    if not _is_primitive(np.array(A, dtype=np.int64)):
        raise NonPrimitive("matrix is not primitive")
    x = [1] * n
    for _ in range(max_iter):
        y = [sum(A[i][j] * x[j] for j in range(n)) for i in range(n)]
        if all(v > 0 for v in x):
            ratios = [Fraction(y[i], x[i]) for i in range(n)]
            lo, hi = min(ratios), max(ratios)
            if hi - lo <= Fraction(tol):
                return Interval(lo, hi)
        g = math.gcd(*y)
        x = [v // g for v in y] if g > 1 else y
    raise ArithmeticError("power iteration did not reach the tolerance")


# ---------------------------------------------------------------------------
# Frequencies


def _seed_letter_counts(sys: SadicSystem, letter: str) -> tuple[int, int]:
    """``(g_{-2}, g_{-1}) = (|u_0|_c - |v_0|_c, |v_0|_c)``."""
    cv, cu = sys.v0.count(letter), sys.u0.count(letter)
    return cu - cv, cv


def _combine(x: int | Fraction, I: Interval, y: int | Fraction, J: Interval) -> Interval:
    a = I.scale(Fraction(x))
    b = J.scale(Fraction(y))
    return Interval(a.lo + b.lo, a.hi + b.hi)


def letter_frequency(sys: SadicSystem, K: int, letter: str = "1") -> Interval:
    """Enclosure of the frequency of ``letter``.

    ``g_{-2} alpha + g_{-1} alpha_0`` with seed counts ``g``.
    """
    g2, g1 = _seed_letter_counts(sys, letter)
    return _combine(g2, alpha_enclosure(sys, K), g1, alpha_k_enclosure(sys, 0, K))


def frequency_vector(sys: SadicSystem, K: int) -> dict[str, Interval]:
    return {c: letter_frequency(sys, K, c) for c in sorted(sys.pi.target)}


# ---------------------------------------------------------------------------
# Balance series


@dataclass
class BalanceSeries:
    """Terms of the letter-balance series and the proof's comparison bound.

    ``top`` and ``vector`` are upper bounds for the top-entry term and the
    full-vector term (both multiplied by the largest entry of ``M_k``);
    ``bound`` is ``8 C eps_k``.
    """

    letter: str
    top: list[float]
    vector: list[float]
    bound: list[float]
    partial_sums: list[float]
    C: int

    @property
    def within_bound(self) -> bool:
        return all(t <= b for t, b in zip(self.top, self.bound))

    def ratios(self) -> list[float]:
        return [self.vector[k + 1] / self.vector[k] for k in range(len(self.vector) - 1) if self.vector[k]]

    def geometric_tail(self) -> float:
        """Fitted geometric rate of the tail terms (below 1 means summable)."""
        tail = self.ratios()[len(self.vector) // 2:]
        return max(tail) if tail else float("nan")


def _abs_upper(n: int, length: int, freq: Interval) -> Fraction:
    return max(abs(n - length * freq.lo), abs(n - length * freq.hi))


def balance_series(sys: SadicSystem, K: int, letter: str = "1", depth: int = 60) -> BalanceSeries:
    if K < 1:
        raise InvalidParameters("K must be at least 1")
    freq = letter_frequency(sys, depth, letter)
    g2, g1 = _seed_letter_counts(sys, letter)
    C = abs(g2 * sys.length_v(0) - g1 * sys.length_v(-1))
    a = a_sequence(sys.taus(K + 2))
    top, vec, bound, sums = [], [], [], []
    total = 0.0
    cv, cu = g1, g1 + g2
    for k in range(K + 1):
        if k:
            # letter counts follow the same recursion as the lengths
            t = sys.tau(k - 1)
            extra_v = (t.r - 1) * cv + cu if t.r else 0
            cv, cu = (t.m - 1) * cv + cu + extra_v, (t.n - 1) * cv + cu + extra_v
        lv, lu = sys.length_v(k), sys.length_u(k)
        norm = level_incidence(sys, k).max_entry()
        x = _abs_upper(cv, lv, freq)
        y = _abs_upper(cu, lu, freq)
        top.append(float(x * norm))
        term = math.hypot(float(x), float(y)) * norm
        vec.append(term)
        total += term
        sums.append(total)
        bound.append(float(8 * C * Fraction(math.prod(a[:k + 1]), lv)))
    return BalanceSeries(letter, top, vec, bound, sums, C)


@dataclass(frozen=True)
class BalanceReport:
    word: str
    window_length: int
    discrepancy: int
    min_count: int
    max_count: int
    prefix_len: int


def occurrence_starts(text: str, v: str) -> np.ndarray:
    if len(v) == 1:
        from .words import as_codes

        return np.flatnonzero(as_codes(text) == ord(v))
    return np.fromiter((m.start() for m in re.finditer(f"(?={re.escape(v)})", text)), dtype=np.int64)


def empirical_balance(sys: SadicSystem, v: str, window_length: int, prefix_len: int,
                      text: str | None = None) -> BalanceReport:
    """Spread of occurrence counts of ``v`` over all windows of one length."""
    if not v:
        raise InvalidParameters("v must be nonempty")
    if prefix_len < 2 * window_length:
        raise InvalidParameters("prefix must be at least twice the window length")
    text = text if text is not None else prefix(sys, prefix_len)
    n = len(text)
    if window_length < len(v):
        return BalanceReport(v, window_length, 0, 0, 0, n)
    occ = np.zeros(n + 1, dtype=np.int64)
    occ[occurrence_starts(text, v) + 1] = 1
    cs = np.cumsum(occ)
    span = window_length - len(v) + 1
    counts = cs[span:n - len(v) + 2] - cs[:n - len(v) + 2 - span]
    counts = counts[: n - window_length + 1]
    lo, hi = int(counts.min()), int(counts.max())
    return BalanceReport(v, window_length, hi - lo, lo, hi, n)


# ---------------------------------------------------------------------------
# Cylinder measures


@dataclass
class CylinderMeasure:
    """``mu([w])`` as an enclosure and as ``Q alpha + R`` with rational ``Q, R``."""

    word: str
    enclosure: Interval
    alpha_coeff: Fraction
    rational_part: Fraction
    level: int
    seeds: tuple[Fraction, Fraction]

    def value_in(self, alpha: Interval) -> Interval:
        return alpha.scale(self.alpha_coeff).shift(self.rational_part)


def _ending_counts(block: str, context: str, w: str) -> int:
    """Occurrences of ``w`` in ``context + block`` that end inside ``block``."""
    text = context[len(context) - (len(w) - 1):] + block if len(w) > 1 else block
    return len(occurrence_starts(text, w))


def measure_cylinder(sys: SadicSystem, w: str, K: int = 40) -> CylinderMeasure:
    """Frequency of ``w``, exactly and as an enclosure.

    Occurrences are attributed to the level-``k1`` block where they end; the
    left context of any block is the previous block, whose last ``|v_k1|``
    symbols are always ``v_k1``.  The per-block counts then follow the
    length recursion from level ``k1`` on.
    """
    if not w:
        one = Interval(Fraction(1), Fraction(1))
        return CylinderMeasure(w, one, Fraction(0), Fraction(1), 0, (Fraction(0), Fraction(0)))
    lang, _ = factor_set(sys, len(w))
    if w not in lang:
        raise NotAFactor(f"{w!r} is not in the language")
    k1 = 1
    while sys.length_v(k1) < len(w) - 1:
        k1 += 1
    v, u = sys.word_v(k1), sys.word_u(k1)
    hv, hu = _ending_counts(v, v, w), _ending_counts(u, v, w)
    t = sys.tau(k1 - 1)
    delta = t.n - t.m
    f1 = Fraction(hv)
    f2 = Fraction(hu - hv, delta)
    conv = convergents(sys, k1, K)
    lo_hi = []
    for k in (K - 1, K):
        lo_hi.append((f2 * conv.at("c", k) + f1 * conv.at("e", k)) / conv.at("d", k))
    enc = Interval(min(lo_hi), max(lo_hi))
    # exact form through the offsets: alpha_k1 = q alpha + rho and
    # alpha_k1 lambda_k1 = (-1)^k1 |v_k1| / (|v_0| a_0 ... a_{k1-1}) alpha + r_k1
    offs = eigenvalue_offsets(sys, k1)
    a = a_sequence(sys.taus(k1 + 2))
    q_prev, rho_prev = offs[k1 - 1]
    lam_q = Fraction((-1) ** k1 * sys.length_v(k1), sys.length_v(0) * math.prod(a[:k1]))
    lam_r = offs[k1][1] * a[k1]
    Q = f2 * lam_q + f1 * q_prev
    R = f2 * lam_r + f1 * rho_prev
    return CylinderMeasure(w, enc, Q, R, k1, (f2, f1))


# ---------------------------------------------------------------------------
# Dimension group


@dataclass
class DimensionGroupDescriptor:
    """The ordered group ``(E, E intersected with the positive reals, 1)``."""

    spectrum: EigenvalueGroupDescriptor
    unit: Fraction = Fraction(1)
    cone: str = "E_X intersected with positive reals"

    def equivalent(self, other: "DimensionGroupDescriptor", sys1=None, sys2=None):
        """(Strong) orbit equivalence verdict via the eigenvalue groups."""
        return compare_eigenvalue_groups(self.spectrum, other.spectrum, sys1, sys2)

    def to_json(self) -> dict:
        out = self.spectrum.to_json()
        out["unit"] = "1/1"
        out["positive_cone"] = self.cone
        return out


def dimension_group(sys: SadicSystem, K: int) -> DimensionGroupDescriptor:
    return DimensionGroupDescriptor(eigenvalue_group(sys, K))
