"""Gap sequences of a germ set and the order relations between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .exact import INF, Rational, is_inf
from .germ.profile import DIV, is_marker
from .germ.sets import FiniteSet, GermSet
from .tails import IndexSet, com_set, consecutive_max
from .verdict import Status, TailVerdict, certified, conjoin, empirical, inconclusive

DEFAULT_C_GRID = (Fraction(3, 2), Fraction(2), Fraction(3), Fraction(5), Fraction(9))


class ComponentError(ValueError):
    """A supplied interval is not a connected component of the complement."""


# -- index maps --------------------------------------------------------------------
# A gap sequence is a map k -> gap index of E.  Structured maps know their
# eventual range, which is what makes order questions decidable.

@dataclass(frozen=True)
class Enumerated:
    """Increasing enumeration of an index set."""

    s: IndexSet

    def __call__(self, k):
        return self.s.nth(k)

    def range_set(self):
        return self.s if self.s.periodic else None

    strict = True


@dataclass(frozen=True)
class Repeat:
    """Each entry of ``base`` repeated ``m`` times."""

    base: Enumerated
    m: int

    def __call__(self, k):
        return self.base((k - 1) // self.m + 1)

    def range_set(self):
        return self.base.range_set()

    @property
    def strict(self):
        return self.m == 1


@dataclass(frozen=True)
class Listed:
    """A finite, explicitly supplied list of gap indices."""

    items: tuple

    def __call__(self, k):
        if k > len(self.items):
            raise IndexError("listed gap sequence exhausted")
        return self.items[k - 1]

    def range_set(self):
        return None

    strict = False


class GapSequence:
    """A sequence of gaps ``(a_k, b_k)`` of a germ set, each a component of the complement."""

    def __init__(self, E: GermSet, index, label: str = "", finite_len: int | None = None):
        self.E = E
        self.index = index
        self.label = label
        self.finite_len = finite_len if finite_len is not None else (
            len(index.items) if isinstance(index, Listed) else None)

    # basic access
    def idx(self, k: int) -> int:
        return self.index(k)

    def entry(self, k: int):
        return self.E.gap(self.idx(k))

    def entries(self, depth: int):
        n = depth if self.finite_len is None else min(depth, self.finite_len)
        return [self.entry(k) for k in range(1, n + 1)]

    def length(self, depth: int) -> int:
        return depth if self.finite_len is None else min(depth, self.finite_len)

    def range_set(self) -> IndexSet | None:
        return self.index.range_set()

    def __repr__(self):
        return f"GapSequence({self.E.name}, {self.label or self.index})"

    # constructors
    @staticmethod
    def all_gaps(E: GermSet) -> "GapSequence":
        return GapSequence(E, Enumerated(IndexSet.all()), "all gaps")

    @staticmethod
    def of_set(E: GermSet, s: IndexSet, label: str = "") -> "GapSequence":
        return GapSequence(E, Enumerated(s), label or s.label)

    @staticmethod
    def every(E: GermSet, step: int, offset: int = 0) -> "GapSequence":
        """Gaps ``step*k + offset`` (k >= 1, index >= 1)."""
        return GapSequence(E, Enumerated(IndexSet.all().subsample(step, offset)),
                           f"every {step}th gap, offset {offset}")

    @staticmethod
    def from_pairs(E: GermSet, pairs, depth: int = 4096) -> "GapSequence":
        """Locate each supplied (a, b) among the components; errors if one is not."""
        out = []
        for a, b in pairs:
            out.append(_locate_component(E, a, b, depth))
        return GapSequence(E, Listed(tuple(out)), "supplied")

    def subsequence(self, step: int, offset: int = 0) -> "GapSequence":
        if isinstance(self.index, Enumerated):
            return GapSequence(self.E, Enumerated(self.index.s.subsample(step, offset)),
                               f"{self.label}[{step}k+{offset}]")
        raise TypeError("subsequences are defined for enumerated sequences")

    def repeated(self, m: int) -> "GapSequence":
        if not isinstance(self.index, Enumerated):
            raise TypeError("repetition is defined for enumerated sequences")
        return GapSequence(self.E, Repeat(self.index, m), f"{self.label} x{m}")


def _locate_component(E, a, b, depth):
    for n in range(1, depth + 1):
        ga, gb = E.gap(n)
        if gb < b:
            break
        if ga == a and gb == b:
            return n
    raise ComponentError(f"({a}, {b}) is not a component of the complement")


# -- class flags -------------------------------------------------------------------

def _range_ratio_entries(G, S: IndexSet):
    """Gap-ratio profile entries met by the tail of S over one common period."""
    import math
    base = max(G.start, S.start)
    P = math.lcm(G.period, S.period)
    return [G.entry(n) for n in range(base, base + P) if S.contains(n)]


def _growth(values) -> bool:
    n = len(values)
    if n < 8:
        return False
    q = n // 4
    mins = [min(values[i * q:(i + 1) * q]) for i in range(4)]
    return mins[3] > mins[2] > mins[1]


def is_IE_member(E: GermSet, S: GapSequence, depth: int) -> TailVerdict:
    """Verdict on a_k -> 0 together with b_k / a_k -> infinity."""
    n = S.length(depth)
    for k in range(1, n + 1):
        a, b = S.entry(k)
        if not (a > 0 and b > a):
            raise ComponentError(f"entry {k} is not a component")
    G, _ = E.profiles(depth)
    R = S.range_set()
    if S.finite_len is not None:
        return empirical(False, depth, reason="finite sequence")
    if R is not None and G.is_periodic:
        ents = _range_ratio_entries(G, R)
        if all(e is DIV for e in ents):
            return certified(True, depth, reason="every gap met eventually has a diverging ratio")
        bad = [e for e in ents if not is_marker(e)]
        return certified(False, depth, reason="a bounded gap ratio recurs", bounded_ratio=max(bad))
    if G.is_diagonal and R is not None and R.period == 1:
        return certified(False, depth, reason="every diagonal ratio recurs")
    ratios = [E.gap_ratio(S.idx(k)) for k in range(1, n + 1)]
    return empirical(_growth(ratios), depth)


def almost_decreasing(S: GapSequence, depth: int) -> TailVerdict:
    if isinstance(S.index, (Enumerated, Repeat)):
        return certified(True, depth, from_index=1)
    idx = [S.idx(k) for k in range(1, S.length(depth) + 1)]
    last_bad = max((k for k in range(1, len(idx)) if idx[k] < idx[k - 1]), default=0)
    return empirical(last_bad < len(idx) // 2, depth, from_index=last_bad + 1)


def almost_strictly_decreasing(S: GapSequence, depth: int) -> TailVerdict:
    if isinstance(S.index, Enumerated):
        return certified(True, depth, from_index=1)
    if isinstance(S.index, Repeat):
        return certified(S.index.m == 1, depth, from_index=1)
    idx = [S.idx(k) for k in range(1, S.length(depth) + 1)]
    last_bad = max((k for k in range(1, len(idx)) if idx[k] <= idx[k - 1]), default=0)
    return empirical(last_bad < len(idx) // 2, depth, from_index=last_bad + 1)


@dataclass(frozen=True)
class ClassFlags:
    member_of_IE: TailVerdict
    almost_decreasing: TailVerdict
    almost_strictly_decreasing: TailVerdict


def class_flags(E: GermSet, S: GapSequence, depth: int) -> ClassFlags:
    return ClassFlags(is_IE_member(E, S, depth), almost_decreasing(S, depth),
                      almost_strictly_decreasing(S, depth))


# -- preorder ----------------------------------------------------------------------

@dataclass(frozen=True)
class Embedding:
    """a_n = l_{f(n)} for n >= N1, f monotone; ``table`` holds f up to the checked depth."""

    N1: int
    table: dict

    def f(self, n: int) -> int:
        return self.table[n]


@dataclass(frozen=True)
class Precedence:
    embedding: Embedding | None
    verdict: TailVerdict
    first_unmatched: int | None = None

    def __bool__(self):
        return self.verdict.truthy


def _greedy(A: GapSequence, L: GapSequence, depth: int, search: int):
    table: dict = {}
    last_bad, first_bad = 0, None
    k = 1
    nA = A.length(depth)
    nL_cap = L.length(search)
    for n in range(1, nA + 1):
        t = A.idx(n)
        k0 = k
        while k <= nL_cap and L.idx(k) < t:
            k += 1
        if k <= nL_cap and L.idx(k) == t:
            table[n] = k
        else:
            last_bad = n
            first_bad = first_bad or n
            k = k0 if k > nL_cap else k
            # f restarts after an unmatched index, monotonicity only needed beyond it
            table = {}
    return last_bad, first_bad, table


def precedes(A: GapSequence, L: GapSequence, depth: int) -> Precedence:
    """Whether A's tail re-indexes monotonically into L."""
    last_bad, first_bad, table = _greedy(A, L, depth, search=max(depth, 1) * 64)
    emb = Embedding(last_bad + 1, table) if table else None
    RA, RL = A.range_set(), L.range_set()
    if RA is not None and RL is not None and A.finite_len is None and L.finite_len is None:
        ok = RA.tail_subset_of(RL)
        return Precedence(emb if ok else None, certified(ok, depth, N1=last_bad + 1),
                          None if ok else first_bad)
    nA = A.length(depth)
    ok = last_bad <= nA // 2 and bool(table)
    return Precedence(emb if ok else None, empirical(ok, depth, N1=last_bad + 1),
                      None if ok else first_bad)


def equiv(A: GapSequence, L: GapSequence, depth: int) -> TailVerdict:
    return conjoin([precedes(A, L, depth).verdict, precedes(L, A, depth).verdict], depth)


def strictify(L: GapSequence, depth: int = 64) -> GapSequence:
    """Subsequence with strictly decreasing left endpoints, keeping universality."""
    ad = almost_decreasing(L, depth)
    if not ad.truthy:
        raise ValueError("strictification needs an almost decreasing gap sequence")
    if isinstance(L.index, Enumerated):
        return L
    if isinstance(L.index, Repeat):
        return GapSequence(L.E, L.index.base, f"strict({L.label})")
    n1 = ad.witness.get("from_index", 1)
    items = [L.idx(n1)]
    for k in range(n1 + 1, L.length(depth) + 1):
        # a strictly smaller left endpoint means a strictly deeper gap
        if L.idx(k) > items[-1]:
            items.append(L.idx(k))
    return GapSequence(L.E, Listed(tuple(items)), f"strict({L.label})")


# -- M constant --------------------------------------------------------------------

def _m_ratio(L: GapSequence, k: int):
    a, _ = L.entry(k)
    _, b_next = L.entry(k + 1)
    return a / b_next


def M_of(L: GapSequence, depth: int):
    """limsup of l_k / m_{k+1}; returns (value, verdict on "M is finite")."""
    E = L.E
    G, B = E.profiles(depth)
    R = L.range_set()
    if R is not None and L.finite_len is None and G.is_periodic and B.is_periodic:
        M = consecutive_max(G, B, R)
        return M, certified(not is_inf(M), depth, M=M)
    n = L.length(depth) - 1
    vals = [_m_ratio(L, k) for k in range(1, n + 1)]
    if not vals:
        return None, inconclusive(depth)
    half = vals[len(vals) // 2:]
    grows = len(vals) >= 8 and max(half) > 2 * max(vals[: len(vals) // 2])
    return max(half), empirical(not grows, depth, tail_max=max(half))


# -- universality --------------------------------------------------------------------

@dataclass
class UniversalityReport:
    verdict: TailVerdict
    c: Fraction | None = None
    t_schedule: dict = field(default_factory=dict)
    M_value: object = None
    M_verdict: TailVerdict | None = None
    universal_sequence: GapSequence | None = None
    method: str = ""
    band_witness: dict = field(default_factory=dict)


def _data_candidates(values) -> list:
    vals = sorted(set(v for v in values if v.is_small))
    out = []
    for lo, hi in zip(vals, vals[1:]):
        if hi >= 2 * lo:
            out.append(lo.to_fraction())
    return out


def first_below_all(E: GermSet, S: IndexSet, c, K, G, limit: int = 100_000) -> int:
    """Least n such that every gap m >= n of ratio above c has ratio above K."""
    last_bad = 0
    # residues whose values grow need one good occurrence each
    pending = set(j for j, e in enumerate(G.entries) if e is DIV)
    for n in range(1, limit + 1):
        g = E.gap_ratio(n)
        if g > c and not g > K:
            last_bad = n
        if n >= G.start:
            j = (n - G.start) % G.period
            if j in pending and g > K:
                pending.discard(j)
            if not pending and n >= G.start + G.period:
                return last_bad + 1
    raise RuntimeError("threshold search exceeded its bound")


def universality_certificate(E, depth: int, c_grid=None) -> UniversalityReport:
    """Decide whether E has a universal gap sequence, with a threshold c."""
    grid = sorted(Fraction(c) for c in (c_grid or DEFAULT_C_GRID))
    if isinstance(E, FiniteSet):
        return UniversalityReport(certified(False, depth), method="no accumulating gaps")
    G, B = E.profiles(depth)
    if G.is_periodic:
        if not any(e is DIV for e in G.entries):
            return UniversalityReport(
                certified(False, depth, reason="gap ratios bounded; no strongly porous gap sequence"),
                method="bounded ratios")
        fin = [e for e in G.entries if not is_marker(e)]
        cmax = max(fin) if fin else Fraction(1)
        cands = [c for c in grid if c > 1 and c >= cmax] or [cmax]
        c = cands[0]
        S = com_set(E, c, G, depth)
        L = GapSequence.of_set(E, S, f"gaps with ratio > {c}")
        every = all(e is DIV for e in G.entries)
        ts = {}
        for K in (2 * c, 10 * c, 100 * c):
            n_star = first_below_all(E, S, c, K, G)
            ts[K] = E.block(n_star).lo
        M, Mv = M_of(L, depth)
        return UniversalityReport(
            certified(True, depth, c=c), c, ts, M, Mv, L,
            "every component eventually enumerated" if every else "periodic ratio tail",
        )
    if G.is_diagonal and G.base > 1:
        bands = {}
        for c in grid:
            j = 1
            while not G.scale * G.base ** j > c:
                j += 1
            K = G.scale * G.base ** j
            hits = [n for n in range(max(1, depth // 2), depth + 1) if E.gap_ratio(n) == K]
            bands[c] = {"K": K, "recurs_at": hits[-3:]}
        return UniversalityReport(
            certified(False, depth, reason="every band (c, K] recurs"),
            method="diagonal recurrence", band_witness=bands)
    # no structural claim: look at the data
    vals = [E.gap_ratio(n) for n in range(1, depth + 1)]
    for c in sorted(set(grid) | set(_data_candidates(vals))):
        sel = [v for v in vals if v > c]
        if _growth(sel):
            S = com_set(E, c, G, depth)
            L = GapSequence.of_set(E, S, f"gaps with ratio > {c}")
            M, Mv = M_of(L, depth)
            return UniversalityReport(empirical(True, depth, c=c), c, {}, M, Mv, L, "empirical")
    return UniversalityReport(empirical(False, depth), method="empirical")
