"""Factor languages, complexity counts, special words and structure inference.

Complexity values come in two flavours.  Brute force counts the exact factor
set; the closed forms add up the increments contributed by the right-special
words of each level, starting from one brute-force calibration point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import sympy

from .errors import (
    InsufficientDepth,
    InvalidParameters,
    NotLowComplexity,
    PeriodicInput,
)
from .words import SadicSystem, TauParams, factor_set, pk_sk_lengths

# ---------------------------------------------------------------------------
# Language samples


@dataclass
class LanguageSample:
    """Exact factor sets ``factors[q]`` for ``0 <= q <= q_max``.

    ``source_depth`` is the block level the factors were read from and
    ``stabilized`` records that the next level produced the same set.
    """

    q_max: int
    factors: list[frozenset[str]]
    source_depth: int
    stabilized: bool

    def alphabet(self) -> frozenset[str]:
        return self.factors[1] if self.q_max >= 1 else frozenset()

    def _check(self, q: int, extra: int = 0) -> None:
        if not 0 <= q or q + extra > self.q_max:
            raise IndexError(f"length {q} out of range for a sample with q_max = {self.q_max}")


def _truncations(top: set[str], q_max: int) -> list[frozenset[str]]:
    out = [frozenset(top)]
    for q in range(q_max - 1, -1, -1):
        out.append(frozenset(w[:q] for w in out[-1]))
    return out[::-1]


def sample_language(sys: SadicSystem, q_max: int, budget: int | None = None,
                    certify: bool = True) -> LanguageSample:
    """Exact ``L_q`` for every ``q <= q_max``.

    Factors of length ``q_max`` are read off consecutive block pairs at the
    first level whose blocks are long enough; shorter factors are prefixes of
    longer ones.  With ``certify`` the same set is recomputed one level deeper
    and the two must agree.
    """
    if q_max < 1:
        raise InvalidParameters("q_max must be at least 1")
    top, level = factor_set(sys, q_max, budget)
    stabilized = False
    if certify:
        deeper, _ = factor_set(sys, q_max, budget, level=level + 1)
        if deeper != top:
            raise NotLowComplexity(f"factor sets of length {q_max} differ between levels {level} and {level + 1}")
        stabilized = True
    return LanguageSample(q_max, _truncations(top, q_max), level, stabilized)


def complexity(sample: LanguageSample, q: int) -> int:
    sample._check(q)
    return len(sample.factors[q])


def brute_complexity(sys: SadicSystem, q: int, budget: int | None = None) -> int:
    """``p(q)`` from a single exact factor set."""
    return len(factor_set(sys, q, budget)[0])


def right_special(sample: LanguageSample, q: int) -> dict[str, frozenset[str]]:
    """Right-special words of length ``q`` with their sets of right extensions."""
    sample._check(q, 1)
    ext: dict[str, set[str]] = {}
    for w in sample.factors[q + 1]:
        ext.setdefault(w[:-1], set()).add(w[-1])
    return {w: frozenset(e) for w, e in ext.items() if len(e) > 1}


def left_special(sample: LanguageSample, q: int) -> dict[str, frozenset[str]]:
    sample._check(q, 1)
    ext: dict[str, set[str]] = {}
    for w in sample.factors[q + 1]:
        ext.setdefault(w[1:], set()).add(w[0])
    return {w: frozenset(e) for w, e in ext.items() if len(e) > 1}


@dataclass
class RauzyGraph:
    """Directed multigraph on ``L_n`` with one edge per word of ``L_{n+1}``.

    Each edge carries the long word as ``label``.
    """

    n: int
    graph: nx.MultiDiGraph

    @property
    def vertices(self) -> set[str]:
        return set(self.graph.nodes)

    @property
    def edges(self) -> set[str]:
        return {d["label"] for _, _, d in self.graph.edges(data=True)}

    def right_special(self) -> set[str]:
        return {x for x in self.graph.nodes if self.graph.out_degree(x) > 1}

    def left_special(self) -> set[str]:
        return {x for x in self.graph.nodes if self.graph.in_degree(x) > 1}

    def return_labels(self, w: str) -> list[str]:
        """Labels of the simple loops at ``w``, when every other vertex has one successor."""
        labels = []
        for _, nxt, data in self.graph.out_edges(w, data=True):
            label = data["label"][-1]
            seen = {w}
            while nxt != w:
                if nxt in seen or self.graph.out_degree(nxt) != 1:
                    raise NotLowComplexity(f"loop from {w!r} does not close uniquely")
                seen.add(nxt)
                _, nxt, data = next(iter(self.graph.out_edges(nxt, data=True)))
                label += data["label"][-1]
            labels.append(label)
        return labels


def rauzy_graph(sample: LanguageSample, n: int) -> RauzyGraph:
    sample._check(n, 1)
    g = nx.MultiDiGraph()
    g.add_nodes_from(sample.factors[n])
    for e in sorted(sample.factors[n + 1]):
        g.add_edge(e[:n], e[1:], label=e)
    return RauzyGraph(n, g)


# ---------------------------------------------------------------------------
# Increment intervals


@dataclass(frozen=True)
class SpecialInterval:
    """Half-open integer interval ``(lo, hi]`` of lengths with an extra right-special word.

    ``kind`` is ``"n"`` for the family ending at ``|s_k v_k^(n_k-2) p_k|`` and
    ``"r"`` for the family ending at ``|s_k v_k^(r_k-1) u_k v_k^(r_k-1) p_k|``.
    """

    k: int
    kind: str
    lo: int
    hi: int

    def __contains__(self, q: int) -> bool:
        return self.lo < q <= self.hi

    def count_below(self, a: int, b: int) -> int:
        """Number of integers of the interval lying in ``[a, b)``."""
        return max(0, min(self.hi, b - 1) - max(self.lo + 1, a) + 1)


def level_intervals(sys: SadicSystem, k: int, plens=None, slens=None) -> list[SpecialInterval]:
    if plens is None:
        plens, slens = pk_sk_lengths(sys, k)
    t = sys.tau(k)
    v, u = sys.length_v(k), sys.length_u(k)
    base = slens[k] + plens[k]
    out = [SpecialInterval(k, "n", base + (t.m - 1) * v, base + (t.n - 2) * v)]
    if t.r:
        out.append(SpecialInterval(k, "r", base + (t.r - 1) * v, base + 2 * (t.r - 1) * v + u))
    return out


def intervals_up_to(sys: SadicSystem, q: int) -> list[SpecialInterval]:
    """Every interval whose left end is below ``q``.

    Left ends grow at least like ``|s_k|``, which is strictly increasing.
    """
    out: list[SpecialInterval] = []
    k = 0
    plens, slens = pk_sk_lengths(sys, 0)
    while slens[k] < q:
        out.extend(iv for iv in level_intervals(sys, k, plens, slens) if iv.lo < q)
        k += 1
        plens, slens = pk_sk_lengths(sys, k)
    return out


def predicted_increment(sys: SadicSystem, q: int) -> int:
    """``p(q+1) - p(q)`` from the right-special words of each level."""
    s0 = pk_sk_lengths(sys, 0)[1][0]
    if q <= s0:
        raise InvalidParameters(f"the increment formula needs q > |s_0| = {s0}")
    return 1 + sum(q in iv for iv in intervals_up_to(sys, q))


# ---------------------------------------------------------------------------
# Calibrated closed forms


@dataclass(frozen=True)
class Calibration:
    """Brute-force anchor for the closed forms.

    ``base_q``/``base_p`` is a brute-force value of ``p``; increments agree
    with brute force on ``[base_q, checked_to]``.  ``C`` is the additive
    constant for the literal special-length formulas, fitted at the smallest
    special length.
    """

    base_q: int
    base_p: int
    checked_to: int
    C: int
    s0: int


def calibrate(sys: SadicSystem, check_to: int | None = None, budget: int | None = None) -> Calibration:
    """Find where the increment formula starts to agree with brute force.

    For a canonical seed this is ``|s_0| + 1``.  Other seeds can disagree on
    a finite stretch of short lengths; the anchor is moved past the last
    disagreement seen up to ``check_to``.
    """
    plens, slens = pk_sk_lengths(sys, 1)
    s0 = slens[0]
    first = min(iv.hi for iv in level_intervals(sys, 0, plens, slens))
    if check_to is None:
        check_to = max(64, 2 * first, s0 + 16, 4 * (len(sys.v0) + len(sys.u0)))
    sample = sample_language(sys, check_to + 1, budget, certify=False)
    counts = [len(f) for f in sample.factors]
    start = s0 + 1
    for q in range(s0 + 1, check_to + 1):
        if counts[q + 1] - counts[q] != predicted_increment(sys, q):
            start = q + 1
    if start > check_to - 8:
        raise NotLowComplexity("increment formula never settles within the checked range")
    cal = Calibration(start, counts[start], check_to, 0, s0)
    specials = sorted(special_lengths(sys, 2), key=lambda t: t[2])
    for k, kind, q in specials:
        if q >= start and q <= check_to:
            C = counts[q] - _literal(sys, k, kind, 0)
            return Calibration(start, counts[start], check_to, C, s0)
    return cal


def complexity_formula(sys: SadicSystem, q: int, cal: Calibration | None = None) -> int:
    """``p(q)`` by summing predicted increments from the calibration anchor."""
    cal = cal or calibrate(sys)
    if q < cal.base_q:
        raise InvalidParameters(f"q = {q} is below the calibrated range starting at {cal.base_q}")
    extra = sum(iv.count_below(cal.base_q, q) for iv in intervals_up_to(sys, q))
    return cal.base_p + (q - cal.base_q) + extra


def special_lengths(sys: SadicSystem, K: int) -> list[tuple[int, str, int]]:
    """``(k, kind, q_k)`` for ``k < K``: right ends of the increment intervals."""
    plens, slens = pk_sk_lengths(sys, K)
    out = []
    for k in range(K):
        out.extend((k, iv.kind, iv.hi) for iv in level_intervals(sys, k, plens, slens))
    return out


def _literal(sys: SadicSystem, k: int, kind: str, C: int) -> int:
    """The displayed special-length formula with constant ``C``.

    Counts each level's own interval in full at its right end; exact counting
    gives one less whenever that interval is nonempty.
    """
    ivs = level_intervals(sys, k)
    t = sys.tau(k)
    v, u = sys.length_v(k), sys.length_u(k)

    def n_sum(top):
        return sum((sys.tau(j).n - sys.tau(j).m - 1) * sys.length_v(j) for j in range(top))

    def r_sum(top):
        return sum((sys.tau(j).r - 1) * sys.length_v(j) + sys.length_u(j)
                   for j in range(top) if sys.tau(j).r)

    if kind == "n":
        ell = min((t.n - t.r - 1) * v, (t.r - 1) * v + u) if t.r else 0
        return ivs[0].hi + ell + n_sum(k + 1) + r_sum(k) + C
    if not t.r:
        raise InvalidParameters(f"level {k} has r = 0 and no second special length")
    q = ivs[1].hi
    overlap = max(0, min(ivs[0].hi, q) - max(ivs[0].lo, 1))
    return q + n_sum(k) + r_sum(k + 1) + overlap + C


@dataclass(frozen=True)
class SpecialLength:
    k: int
    kind: str
    q: int
    p: int
    literal: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.p, self.q)


def special_length_complexity(sys: SadicSystem, k: int, C: int | None = None,
                              cal: Calibration | None = None,
                              above_anchor: bool = False) -> list[SpecialLength]:
    """Complexity at the special lengths of level ``k`` (one or two of them).

    ``p`` is the exact interval count from the calibration anchor; ``literal``
    is the displayed closed form with constant ``C`` (defaults to the
    calibrated one).  ``above_anchor`` skips lengths below the calibrated
    range instead of raising.
    """
    cal = cal or calibrate(sys)
    C = cal.C if C is None else C
    out = []
    for iv in level_intervals(sys, k):
        if above_anchor and iv.hi < cal.base_q:
            continue
        out.append(SpecialLength(k, iv.kind, iv.hi, complexity_formula(sys, iv.hi, cal),
                                 _literal(sys, k, iv.kind, C)))
    return out


# ---------------------------------------------------------------------------
# limsup p(q)/q


@dataclass
class LimsupEstimate:
    """Ratios ``p(q_k)/q_k`` at the special lengths, with summaries.

    ``tail_max`` is the maximum over ``k >= K // 2``.  ``closed_form`` is an
    exact algebraic limit when the parameters end in a constant triple.
    """

    values: list[SpecialLength]
    maximum: Fraction
    tail_max: Fraction
    closed_form: sympy.Expr | None = None
    limit: float | None = None
    per_family: dict[str, sympy.Expr] = field(default_factory=dict)

    @property
    def estimate(self) -> Fraction:
        """Best finite-depth estimate of the limsup: the tail maximum.

        Early levels can exceed the limit (short words), so the maximum over
        all levels is a poor estimate on its own.
        """
        return self.tail_max


def _tail_limit(sys: SadicSystem, start: int, cal: Calibration, kind: str):
    """Exact limit of ``p(q_k)/q_k`` along one family on a constant tail.

    Along the tail, ``q_k`` and ``p(q_k)`` satisfy the linear recurrence with
    characteristic polynomial ``(x^2 - b x - a)(x - 1)``; writing each as
    ``A kappa^k + B kappa'^k + D`` the ratio tends to ``A_p / A_q``.
    """
    t = sys.tau(start)
    a, b = (2 if t.r else 1) * (t.n - t.m), t.m + t.r
    rows = []
    for k in range(start, start + 8):
        sl = [s for s in special_length_complexity(sys, k, cal=cal) if s.kind == kind]
        if not sl:
            return None
        rows.append((sl[0].q, sl[0].p))
    for col in (0, 1):
        xs = [r[col] for r in rows]
        for j in range(len(xs) - 3):
            if xs[j + 3] != (b + 1) * xs[j + 2] - (b - a) * xs[j + 1] - a * xs[j]:
                return None
    kappa = (b + sympy.sqrt(b * b + 4 * a)) / 2
    kappa2 = (b - sympy.sqrt(b * b + 4 * a)) / 2
    vander = sympy.Matrix([[1, 1, 1], [kappa, kappa2, 1], [kappa ** 2, kappa2 ** 2, 1]])
    coeffs = []
    for col in (0, 1):
        rhs = sympy.Matrix([rows[0][col], rows[1][col], rows[2][col]])
        coeffs.append(vander.LUsolve(rhs)[0])
    return sympy.radsimp(sympy.simplify(coeffs[1] / coeffs[0]))


def limsup_estimate(sys: SadicSystem, K: int, cal: Calibration | None = None) -> LimsupEstimate:
    cal = cal or calibrate(sys)
    values = []
    for k in range(K + 1):
        values.extend(special_length_complexity(sys, k, cal=cal, above_anchor=True))
    if not values:
        raise InsufficientDepth(f"no special length at or above {cal.base_q} for k <= {K}")
    maximum = max(s.ratio for s in values)
    tail = [s.ratio for s in values if s.k >= K // 2] or [maximum]
    est = LimsupEstimate(values, maximum, max(tail))
    periodic = sys.periodic_tail()
    if periodic is not None and periodic[1] == 1:
        start = max(periodic[0], 1)
        while level_intervals(sys, start)[0].lo < cal.base_q:
            start += 1
        for kind in ("n", "r"):
            lim = _tail_limit(sys, start, cal, kind)
            if lim is not None:
                est.per_family[kind] = lim
        if est.per_family:
            est.closed_form = max(est.per_family.values(), key=lambda e: float(e))
            est.limit = float(est.closed_form)
    return est


# ---------------------------------------------------------------------------
# Structure inference


def detect_seed(sample: LanguageSample) -> tuple[str, str, str]:
    """Smallest bispecial word that is the only special word of its length.

    Returns ``(v, u, w)`` where ``v`` and ``u`` label the short and long loops
    at ``w`` in the Rauzy graph of order ``|w|``.
    """
    counts = [len(f) for f in sample.factors]
    if counts[-1] <= sample.q_max:
        raise PeriodicInput(f"p({sample.q_max}) = {counts[-1]} is at most the length: eventually periodic")
    for q in range(sample.q_max):
        if counts[q + 1] - counts[q] != 1:
            continue
        rs, ls = right_special(sample, q), left_special(sample, q)
        if len(rs) != 1 or set(rs) != set(ls):
            continue
        w = next(iter(rs))
        try:
            loops = sorted(rauzy_graph(sample, q).return_labels(w), key=len)
        except NotLowComplexity:
            continue
        if len(loops) != 2:
            continue
        y, z = loops
        if len(y) < len(z) and z.endswith(y) and y[0] != z[0]:
            return y, z, w
    raise InsufficientDepth(f"no qualifying bispecial word up to length {sample.q_max - 1}")


def block_stream(text: str, v: str, u: str, anchor: str = "") -> str:
    """Parse ``text`` into blocks ``v -> "0"`` and ``u -> "1"``.

    Parsing starts right after the first occurrence of ``anchor`` (a word
    whose occurrences end at block boundaries) and stops at the first
    incomplete block.  ``v`` and ``u`` must begin with different letters.
    """
    if v[0] == u[0]:
        raise InvalidParameters("blocks must begin with different letters")
    i = text.find(anchor) + len(anchor) if anchor else 0
    if anchor and i < len(anchor):
        raise InsufficientDepth(f"anchor {anchor!r} not found")
    out = []
    first = {v[0]: ("0", v), u[0]: ("1", u)}
    while i < len(text):
        try:
            code, blk = first[text[i]]
        except KeyError:
            raise NotLowComplexity(f"symbol {text[i]!r} at {i} starts no block") from None
        if not text.startswith(blk, i):
            if len(text) - i < len(blk):
                break
            raise NotLowComplexity(f"text does not continue with {blk!r} at {i}")
        out.append(code)
        i += len(blk)
    return "".join(out)


def _gaps(blocks: str) -> list[int]:
    ones = [i for i, c in enumerate(blocks) if c == "1"]
    return [b - a - 1 for a, b in zip(ones, ones[1:])]


def infer_level(blocks: str) -> tuple[TauParams, str]:
    """Recover the parameter triple producing a ``0``/``1`` block stream.

    Returns the triple and the next-level stream (incomplete ends dropped).
    """
    gaps = _gaps(blocks)
    S = sorted(set(gaps))
    if len(S) < 2:
        raise PeriodicInput(f"gap set {S} has fewer than two elements")
    if len(S) == 2:
        m, n = S[0] + 1, S[1] + 1
        return TauParams(m, n, 0), "".join("0" if g == m - 1 else "1" for g in gaps)
    if len(S) > 3:
        raise NotLowComplexity(f"gap set {S} has more than three elements")
    x, y, z = S
    i = next((j for j in range(len(gaps) - 1) if gaps[j] != x and gaps[j + 1] == x), None)
    if i is None:
        raise NotLowComplexity("no block boundary found in the gap sequence")
    nxt = []
    while i + 1 < len(gaps):
        big, small = gaps[i], gaps[i + 1]
        if big == x or small != x:
            raise NotLowComplexity(f"gap pattern ({big}, {small}) at {i} fits no block")
        nxt.append("0" if big == y else "1")
        i += 2
    return TauParams(y + 1, z + 1, x + 1), "".join(nxt)


def infer_levels(blocks: str, depth: int) -> list[TauParams]:
    """Apply :func:`infer_level` repeatedly while the stream stays informative."""
    out = []
    for _ in range(depth):
        try:
            params, blocks = infer_level(blocks)
        except (PeriodicInput, NotLowComplexity):
            break
        out.append(params)
    return out
