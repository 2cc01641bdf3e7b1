"""Words, substitutions and S-adic systems built from the tau family.

Words are plain Python strings whose characters are the symbols.  The
two-letter level alphabet is always ``"01"``; the seed substitution may map
into any alphabet of single characters.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    AlphabetMismatch,
    AmbiguousParse,
    BudgetExceeded,
    CommonRootError,
    InvalidParameters,
    NotAFactor,
)

DEFAULT_BUDGET = 1 << 28
BUDGET_ENV = "SADIC_BUDGET_BYTES"


def default_budget(explicit: int | None = None) -> int:
    """Byte budget for materialized words.

    The environment variable ``SADIC_BUDGET_BYTES`` takes precedence over
    ``explicit``, which takes precedence over the built-in default.
    """
    env = os.environ.get(BUDGET_ENV)
    if env:
        return int(env)
    if explicit is not None:
        return int(explicit)
    return DEFAULT_BUDGET


@dataclass(frozen=True, order=True)
class TauParams:
    """Parameters ``(m, n, r)`` of one substitution, with ``0 <= r < m < n``."""

    m: int
    n: int
    r: int = 0

    def __post_init__(self):
        for name in ("m", "n", "r"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, int):
                raise InvalidParameters(f"{name} must be an integer, got {val!r}")
        if not 0 <= self.r < self.m < self.n:
            raise InvalidParameters(
                f"need 0 <= r < m < n, got (m, n, r) = ({self.m}, {self.n}, {self.r})"
            )

    @property
    def has_r(self) -> int:
        """1 when r > 0, else 0."""
        return 1 if self.r > 0 else 0

    def runs(self, letter: str) -> tuple[tuple[str, int], ...]:
        """Run-length form of the image of ``letter``."""
        lead = self.m - 1 if letter == "0" else self.n - 1
        out = [("0", lead), ("1", 1)]
        if self.r:
            out += [("0", self.r - 1), ("1", 1)]
        return tuple((c, k) for c, k in out if k)

    def as_list(self) -> list[int]:
        return [self.m, self.n, self.r]


class Substitution:
    """A map from single-character symbols to nonempty words."""

    __slots__ = ("_images", "_table")

    def __init__(self, images: Mapping[str, str]):
        imgs = {}
        for key, val in images.items():
            if not isinstance(key, str) or len(key) != 1:
                raise InvalidParameters(f"symbols must be single characters, got {key!r}")
            if not isinstance(val, str) or not val:
                raise InvalidParameters(f"image of {key!r} must be a nonempty word")
            imgs[key] = val
        if not imgs:
            raise InvalidParameters("a substitution needs at least one symbol")
        self._images = dict(sorted(imgs.items()))
        self._table = {ord(k): v for k, v in self._images.items()}

    @property
    def images(self) -> dict[str, str]:
        return dict(self._images)

    @property
    def source(self) -> frozenset[str]:
        return frozenset(self._images)

    @property
    def target(self) -> frozenset[str]:
        return frozenset("".join(self._images.values()))

    def __getitem__(self, symbol: str) -> str:
        return self._images[symbol]

    def __call__(self, word: str) -> str:
        extra = set(word) - self.source
        if extra:
            raise AlphabetMismatch(f"symbols {sorted(extra)} outside the source alphabet")
        return word.translate(self._table)

    def __eq__(self, other):
        return isinstance(other, Substitution) and self._images == other._images

    def __hash__(self):
        return hash(tuple(self._images.items()))

    def __repr__(self):
        body = ", ".join(f"{k}->{v}" for k, v in self._images.items())
        return f"Substitution({body})"


def build_tau(p: TauParams | Sequence[int]) -> Substitution:
    """Substitution for parameters ``(m, n, r)``.

    >>> build_tau(TauParams(3, 5, 0)).images
    {'0': '001', '1': '00001'}
    """
    if not isinstance(p, TauParams):
        p = TauParams(*p)
    tail = "1" + ("0" * (p.r - 1) + "1" if p.r else "")
    return Substitution({"0": "0" * (p.m - 1) + tail, "1": "0" * (p.n - 1) + tail})


def identity(alphabet: str = "01") -> Substitution:
    return Substitution({c: c for c in alphabet})


def compose(outer: Substitution, inner: Substitution) -> Substitution:
    """Return ``outer o inner``, i.e. ``a -> outer(inner(a))``."""
    if not inner.target <= outer.source:
        raise AlphabetMismatch(
            f"inner target {sorted(inner.target)} not inside outer source {sorted(outer.source)}"
        )
    return Substitution({a: outer(w) for a, w in inner.images.items()})


# ---------------------------------------------------------------------------
# S-adic systems

TauRule = Callable[[int, "SadicSystem"], TauParams]


class SadicSystem:
    """Seed substitution on ``{0, 1}`` followed by a sequence of tau parameters.

    The sequence is either an explicit list (extended by repeating the final
    triple, by cycling the whole list, or not at all) or a deterministic rule
    ``rule(k, system) -> TauParams``.  A rule may query lengths of level ``k``
    words but nothing deeper.

    Instances are immutable from the outside; derived data are memoized.
    """

    def __init__(
        self,
        pi: Substitution | Mapping[str, str],
        taus: Sequence[TauParams | Sequence[int]] = (),
        repeat: str | None = "last",
        rule: TauRule | None = None,
        name: str | None = None,
    ):
        if not isinstance(pi, Substitution):
            pi = Substitution(pi)
        if pi.source != frozenset("01"):
            raise InvalidParameters("the seed must be defined on exactly {0, 1}")
        if repeat not in ("last", "cycle", None):
            raise InvalidParameters(f"unknown repeat mode {repeat!r}")
        params = []
        for i, t in enumerate(taus):
            if not isinstance(t, TauParams):
                try:
                    t = TauParams(*t)
                except (TypeError, InvalidParameters) as exc:
                    raise InvalidParameters(f"tau entry {i}: {exc}") from exc
            params.append(t)
        if rule is None and not params:
            raise InvalidParameters("need at least one tau triple or a rule")
        self.pi = pi
        self.explicit = tuple(params)
        self.repeat = repeat if rule is None else None
        self.rule = rule
        self.name = name
        self._taus: list[TauParams] = []
        self._lv: list[int] = [len(pi["0"])]
        self._lu: list[int] = [len(pi["1"])]
        self._wv: dict[int, str] = {0: pi["0"]}
        self._wu: dict[int, str] = {0: pi["1"]}

    # -- parameters --------------------------------------------------------
    def tau(self, k: int) -> TauParams:
        if k < 0:
            raise IndexError("tau index must be nonnegative")
        while len(self._taus) <= k:
            self._taus.append(self._next_tau(len(self._taus)))
        return self._taus[k]

    def _next_tau(self, k: int) -> TauParams:
        if self.rule is not None:
            out = self.rule(k, self)
            return out if isinstance(out, TauParams) else TauParams(*out)
        if k < len(self.explicit):
            return self.explicit[k]
        if self.repeat == "last":
            return self.explicit[-1]
        if self.repeat == "cycle":
            return self.explicit[k % len(self.explicit)]
        raise IndexError(f"tau sequence has only {len(self.explicit)} entries")

    def taus(self, count: int) -> list[TauParams]:
        return [self.tau(k) for k in range(count)]

    def periodic_tail(self) -> tuple[int, int] | None:
        """``(start, period)`` when the parameter sequence is declared periodic."""
        if self.rule is not None:
            tail = getattr(self.rule, "periodic_tail", None)
            return tail() if callable(tail) else None
        if self.repeat == "last":
            return (len(self.explicit) - 1, 1)
        if self.repeat == "cycle":
            return (0, len(self.explicit))
        return None

    # -- lengths -----------------------------------------------------------
    def _extend_lengths(self, k: int) -> None:
        while len(self._lv) <= k:
            j = len(self._lv) - 1
            t = self.tau(j)
            lv, lu = self._lv[j], self._lu[j]
            extra = (t.r - 1) * lv + lu if t.r else 0
            self._lv.append((t.m - 1) * lv + lu + extra)
            self._lu.append((t.n - 1) * lv + lu + extra)

    def length_v(self, k: int) -> int:
        """|v_k|; ``k = -1`` gives the seed value |u_0| - |v_0|."""
        if k == -1:
            return self._lu[0] - self._lv[0]
        self._extend_lengths(k)
        return self._lv[k]

    def length_u(self, k: int) -> int:
        self._extend_lengths(k)
        return self._lu[k]

    # -- words -------------------------------------------------------------
    def word_v(self, k: int, budget: int | None = None) -> str:
        return self._word(k, "0", budget)

    def word_u(self, k: int, budget: int | None = None) -> str:
        return self._word(k, "1", budget)

    def _word(self, k: int, letter: str, budget: int | None) -> str:
        store = self._wv if letter == "0" else self._wu
        if k in store:
            return store[k]
        limit = default_budget(budget)
        size = self.length_v(k) if letter == "0" else self.length_u(k)
        if size > limit:
            raise BudgetExceeded(f"|{'v' if letter == '0' else 'u'}_{k}| = {size} exceeds budget {limit}")
        v = self._word(k - 1, "0", budget)
        u = self._word(k - 1, "1", budget)
        pieces = {"0": v, "1": u}
        word = "".join(pieces[c] * cnt for c, cnt in self.tau(k - 1).runs(letter))
        store[k] = word
        return word

    def block(self, k: int, letter: str, budget: int | None = None) -> str:
        return self._word(k, letter, budget)

    def xi(self, k: int, budget: int | None = None) -> Substitution:
        """The composed substitution pi o tau_0 o ... o tau_{k-1}."""
        return Substitution({"0": self.word_v(k, budget), "1": self.word_u(k, budget)})

    # -- derived systems -----------------------------------------------------
    def shifted(self, level: int) -> "SadicSystem":
        """Identity-seeded system running the parameters from ``level`` on."""
        base = self
        return SadicSystem(identity(), rule=_ShiftRule(base, level), name=f"{self.name}>>{level}")

    def with_override(self, k: int, params: TauParams) -> "SadicSystem":
        """Copy of this system whose k-th parameter triple is replaced."""
        return SadicSystem(self.pi, rule=_OverrideRule(self, k, params), name=f"{self.name}*")

    @property
    def v0(self) -> str:
        return self.pi["0"]

    @property
    def u0(self) -> str:
        return self.pi["1"]

    def __repr__(self):
        if self.rule is not None:
            desc = f"rule={self.rule!r}"
        else:
            desc = f"taus={[t.as_list() for t in self.explicit]}, repeat={self.repeat!r}"
        return f"SadicSystem(pi={self.pi.images}, {desc})"


class _ShiftRule:
    def __init__(self, base: SadicSystem, level: int):
        self.base, self.level = base, level

    def __call__(self, k, _sys):
        return self.base.tau(k + self.level)

    def periodic_tail(self):
        tail = self.base.periodic_tail()
        if tail is None:
            return None
        start, period = tail
        return (max(0, start - self.level), period)


class _OverrideRule:
    def __init__(self, base: SadicSystem, k: int, params: TauParams):
        self.base, self.k, self.params = base, k, params

    def __call__(self, k, _sys):
        return self.params if k == self.k else self.base.tau(k)

    def periodic_tail(self):
        tail = self.base.periodic_tail()
        if tail is None:
            return None
        start, period = tail
        return (max(start, self.k + 1), period)

    def __repr__(self):
        return f"override(k={self.k}, {self.params.as_list()})"


# ---------------------------------------------------------------------------
# Lazy access to long words


class LazyWord:
    """Length-only handle on ``v_k`` (letter "0") or ``u_k`` (letter "1").

    Indexing walks down the block tree, so arbitrarily long words can be
    read at any position without being materialized.
    """

    def __init__(self, system: SadicSystem, k: int, letter: str, chunk: int = 1 << 16):
        self.system, self.k, self.letter, self.chunk = system, k, letter, chunk

    @property
    def length(self) -> int:
        s = self.system
        return s.length_v(self.k) if self.letter == "0" else s.length_u(self.k)

    def __len__(self):
        return self.length

    def _size(self, k, letter):
        return self.system.length_v(k) if letter == "0" else self.system.length_u(k)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            start, stop, step = idx.indices(self.length)
            if step != 1:
                raise ValueError("only contiguous slices are supported")
            return "".join(self._pieces(self.k, self.letter, start, stop))
        if idx < 0:
            idx += self.length
        if not 0 <= idx < self.length:
            raise IndexError(idx)
        k, letter = self.k, self.letter
        while k > 0:
            for c, cnt in self.system.tau(k - 1).runs(letter):
                size = self._size(k - 1, c)
                if idx < cnt * size:
                    idx %= size
                    letter = c
                    break
                idx -= cnt * size
            k -= 1
        return self.system.pi[letter][idx]

    def _pieces(self, k, letter, start, stop) -> Iterator[str]:
        if start >= stop:
            return
        if k == 0 or self._size(k, letter) <= self.chunk:
            yield self.system.block(k, letter)[start:stop]
            return
        pos = 0
        for c, cnt in self.system.tau(k - 1).runs(letter):
            size = self._size(k - 1, c)
            for _ in range(cnt):
                lo, hi = pos, pos + size
                if hi > start and lo < stop:
                    yield from self._pieces(k - 1, c, max(start, lo) - lo, min(stop, hi) - lo)
                pos = hi
                if pos >= stop:
                    return

    def materialize(self, budget: int | None = None) -> str:
        return self.system.block(self.k, self.letter, budget)

    def __repr__(self):
        return f"LazyWord({'v' if self.letter == '0' else 'u'}_{self.k}, length={self.length})"


def words_uk_vk(sys: SadicSystem, k: int, materialize_limit: int | None = None):
    """Return ``(v_k, u_k)``; each is a ``str`` or, if too long, a :class:`LazyWord`."""
    if k < 0:
        raise IndexError("k must be nonnegative")
    limit = default_budget(materialize_limit) if materialize_limit is None else materialize_limit
    out = []
    for letter in "01":
        size = sys.length_v(k) if letter == "0" else sys.length_u(k)
        out.append(sys.block(k, letter) if size <= limit else LazyWord(sys, k, letter))
    return tuple(out)


# ---------------------------------------------------------------------------
# Combinatorics on words


def common_prefix(a: str, b: str) -> str:
    return os.path.commonprefix([a, b])


def periodic_suffix(v: str, u: str) -> str:
    """Maximal common suffix of the left-infinite words ``v^inf`` and ``v^inf u``.

    Raises :class:`CommonRootError` if ``v`` and ``u`` are powers of one word,
    detected when the last ``|v| + |u|`` symbols all agree.
    """
    if not v or not u:
        raise InvalidParameters("words must be nonempty")
    lv, lu = len(v), len(u)
    for i in range(lv + lu):
        left = v[-1 - (i % lv)]
        right = u[-1 - i] if i < lu else v[-1 - ((i - lu) % lv)]
        if left != right:
            return (v * (i // lv + 1))[len(v) * (i // lv + 1) - i:]
    raise CommonRootError(f"{v!r} and {u!r} are powers of a common word")


def is_root(v: str, w: str) -> bool:
    """True iff ``|v| <= |w|`` and ``w`` is a suffix of the left-infinite ``v^inf``."""
    if len(v) > len(w):
        return False
    if not v:
        return not w
    reps = len(w) // len(v) + 1
    return (v * reps).endswith(w)


def occurrences(w: str, v: str) -> int:
    """Number of (possibly overlapping) occurrences of ``v`` in ``w``."""
    if not v:
        return len(w) + 1
    count, pos = 0, w.find(v)
    while pos != -1:
        count += 1
        pos = w.find(v, pos + 1)
    return count


def as_codes(w: str) -> np.ndarray:
    """Code points of ``w`` as a numpy array."""
    return np.frombuffer(w.encode("utf-32-le"), dtype=np.uint32)


def hamming(w1: str, w2: str) -> int:
    if len(w1) != len(w2):
        raise InvalidParameters(f"length mismatch: {len(w1)} vs {len(w2)}")
    if len(w1) < 64:
        return sum(a != b for a, b in zip(w1, w2))
    if w1.isascii() and w2.isascii():
        x = np.frombuffer(w1.encode("ascii"), dtype=np.uint8)
        y = np.frombuffer(w2.encode("ascii"), dtype=np.uint8)
        return int(np.count_nonzero(x != y))
    return int(np.count_nonzero(as_codes(w1) != as_codes(w2)))


# ---------------------------------------------------------------------------
# Exact factor sets


def level_pairs(p: TauParams) -> set[str]:
    """Two-letter words occurring in the level sequence that ``p`` produces.

    Pairs inside the two images, plus junctions: every image ends in 1 and
    both letters follow something at the next level.
    """
    tau = build_tau(p)
    pairs = set()
    for img in tau.images.values():
        pairs.update(img[i:i + 2] for i in range(len(img) - 1))
        pairs.add("1" + img[0])
    return pairs


def factor_set(sys: SadicSystem, q: int, budget: int | None = None,
               level: int | None = None) -> tuple[set[str], int]:
    """All factors of length ``q`` of the subshift, plus the level used.

    Picks the first level ``k`` whose blocks are at least ``q`` long (or the
    given ``level``); then a window of length ``q`` meets at most two
    consecutive level-k blocks, and the consecutive pairs are read off the
    next parameter triple.
    """
    if q == 0:
        return {""}, 0
    k = 0
    while min(sys.length_v(k), sys.length_u(k)) < q:
        k += 1
    if level is not None:
        if level < k:
            raise ValueError(f"level {level} blocks are shorter than {q}")
        k = level
    limit = default_budget(budget)
    blocks = {"0": sys.word_v(k, limit), "1": sys.word_u(k, limit)}
    out: set[str] = set()
    for pair in level_pairs(sys.tau(k)):
        w = blocks[pair[0]] + blocks[pair[1]]
        out.update(w[i:i + q] for i in range(len(w) - q + 1))
    return out, k


# ---------------------------------------------------------------------------
# Block decomposition


@dataclass(frozen=True)
class Decomposition:
    """Interior parse of a factor into level blocks.

    ``offset`` is where the first complete block starts; ``head`` and
    ``tail`` are the partial fragments before and after the complete blocks.
    """

    offset: int
    blocks: tuple[str, ...]
    head: str
    tail: str
    level: int
    starts: tuple[int, ...] = ()


def _parse_from(w: str, i: int, v: str, u: str) -> tuple[list[str], int]:
    seq = []
    longer_first = ((u, "U"), (v, "V")) if len(u) >= len(v) else ((v, "V"), (u, "U"))
    n = len(w)
    while i < n:
        for blk, tag in longer_first:
            if w.startswith(blk, i):
                seq.append(tag)
                i += len(blk)
                break
        else:
            break
    return seq, i


def _kinds(fragment: str, v: str, u: str, at_end: bool) -> set[str]:
    out = set()
    for blk, tag in ((v, "V"), (u, "U")):
        if len(fragment) < len(blk) and (blk.startswith(fragment) if at_end else blk.endswith(fragment)):
            out.add(tag)
    return out


def decompose(w: str, sys: SadicSystem, level: int, window: int = 12) -> Decomposition:
    """Unique interior parse of ``w`` into ``v_level`` / ``u_level`` blocks.

    Candidate alignments must parse syntactically and the resulting block
    sequence (with edge fragments whose block type is unambiguous) must
    belong to the level block language on every window of ``window`` blocks.
    """
    v, u = sys.word_v(level), sys.word_u(level)
    span = max(len(v), len(u))
    found = []
    for off in range(min(span, len(w) + 1)):
        head = w[:off]
        hk = _kinds(head, v, u, at_end=False) if head else {"-"}
        if not hk:
            continue
        seq, end = _parse_from(w, off, v, u)
        tail = w[end:]
        tk = _kinds(tail, v, u, at_end=True) if tail else {"-"}
        if not tk:
            continue
        if not seq and (head or tail) and off > 0:
            continue
        full = list(seq)
        if head and len(hk) == 1:
            full.insert(0, next(iter(hk)))
        if tail and len(tk) == 1:
            full.append(next(iter(tk)))
        found.append((off, tuple(seq), head, tail, "".join("0" if b == "V" else "1" for b in full)))
    if not found:
        raise NotAFactor(f"no parse of the word at level {level}")
    lang_cache: dict[int, set[str]] = {}
    shifted = sys.shifted(level)

    def admissible(code: str) -> bool:
        h = min(window, len(code))
        for length in range(2, h + 1):
            if length not in lang_cache:
                lang_cache[length] = factor_set(shifted, length)[0]
            lang = lang_cache[length]
            if any(code[i:i + length] not in lang for i in range(len(code) - length + 1)):
                return False
        return True

    good = [f for f in found if admissible(f[4])]
    if not good:
        raise NotAFactor(f"no admissible parse of the word at level {level}")
    if len(good) > 1:
        raise AmbiguousParse(
            f"{len(good)} admissible alignments at level {level} (offsets {[g[0] for g in good]})"
        )
    off, seq, head, tail, _ = good[0]
    pos, starts = off, []
    for b in seq:
        starts.append(pos)
        pos += len(v) if b == "V" else len(u)
    return Decomposition(off, seq, head, tail, level, tuple(starts))


def prefix(sys: SadicSystem, length: int, budget: int | None = None) -> str:
    """First ``length`` symbols of ``v_k`` for the first ``k`` with ``|v_k| >= length``."""
    k = 0
    while sys.length_v(k) < length:
        k += 1
    return sys.word_v(k, budget)[:length]


# ---------------------------------------------------------------------------
# p_k and s_k


def pk_sk_lengths(sys: SadicSystem, K: int) -> tuple[list[int], list[int]]:
    """``|p_k|`` and ``|s_k|`` for ``0 <= k <= K`` without materializing words.

    ``p_{k+1} = v_k^(m_k - 1) p_k`` and ``s_{k+1} = s_k v_{k+1}``.
    """
    p0 = common_prefix(sys.v0, sys.u0)
    s0 = periodic_suffix(sys.v0, sys.u0)
    plens, slens = [len(p0)], [len(s0)]
    for k in range(K):
        plens.append((sys.tau(k).m - 1) * sys.length_v(k) + plens[-1])
        slens.append(slens[-1] + sys.length_v(k + 1))
    return plens, slens


def pk_sk(sys: SadicSystem, k: int, budget: int | None = None) -> tuple[str, str]:
    """The words ``p_k`` and ``s_k``.

    ``p_0`` is the longest common prefix of ``v_0`` and ``u_0`` and ``s_0`` the
    longest common suffix of ``v_0^inf`` and ``v_0^inf u_0``.
    """
    p = common_prefix(sys.v0, sys.u0)
    s = periodic_suffix(sys.v0, sys.u0)
    limit = default_budget(budget)
    plens, slens = pk_sk_lengths(sys, k)
    if max(plens[k], slens[k]) > limit:
        raise BudgetExceeded(f"|p_{k}| or |s_{k}| exceeds budget {limit}")
    for j in range(k):
        p = sys.word_v(j, limit) * (sys.tau(j).m - 1) + p
        s = s + sys.word_v(j + 1, limit)
    return p, s
