"""Exact reasoning about tails of periodic gap structures.

Everything here works on profiles (see :mod:`porolab.germ.profile`): the
gap ratio profile ``G`` (``g_n = b_n / a_n`` for gap ``n``) and the block ratio
profile ``B`` (``beta_n = hi_n / lo_n`` for block ``n``).  Gap ``n`` sits just
below block ``n``.  When both profiles are periodic, every multiplicative
distance between two points of the set that are a bounded number of steps
apart is eventually either a fixed rational or tends to infinity, so tail
questions reduce to finitely many exact products over one common period.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

from .exact import INF, is_inf
from .germ.profile import DIV, ZERO, Profile, is_marker


class IndexSet:
    """A set of positive integers enumerated in increasing order.

    Periodic sets are ``head`` (finitely many small elements) followed by
    ``{start + q*period + r : q >= 0, r in residues}``.  Predicate sets are
    lazy scans and carry no structural claim.
    """

    def __init__(self, *, head=(), start=1, period=1, residues=(0,), pred=None,
                 scan_limit=1_000_000, label=""):
        self.label = label
        self.pred = pred
        if pred is None:
            residues = tuple(sorted(set(residues)))
            if not residues or any(not 0 <= r < period for r in residues):
                raise ValueError("residues must be non-empty offsets below the period")
            head = tuple(sorted({h for h in head if h < start}))
            self.head, self.start, self.period, self.residues = head, start, period, residues
        else:
            self._memo: list[int] = []
            self._next = 1
            self._lock = threading.Lock()
            self._scan_limit = scan_limit

    @property
    def periodic(self) -> bool:
        return self.pred is None

    @staticmethod
    def all(start: int = 1) -> "IndexSet":
        return IndexSet(start=start, period=1, residues=(0,), label="all")

    def contains(self, n: int) -> bool:
        if self.pred is not None:
            return bool(self.pred(n))
        if n in self.head:
            return True
        return n >= self.start and (n - self.start) % self.period in self.residues

    def nth(self, k: int) -> int:
        """The k-th element (1-based)."""
        if k < 1:
            raise IndexError("index sets are enumerated from 1")
        if self.pred is None:
            h = len(self.head)
            if k <= h:
                return self.head[k - 1]
            q, r = divmod(k - h - 1, len(self.residues))
            return self.start + q * self.period + self.residues[r]
        while len(self._memo) < k:
            with self._lock:
                while len(self._memo) < k:
                    n = self._next
                    if n > self._scan_limit:
                        raise LookupError("predicate index set exhausted its scan limit")
                    self._next += 1
                    if self.pred(n):
                        self._memo.append(n)
        return self._memo[k - 1]

    def count_below(self, n: int) -> int:
        """Number of elements strictly less than n (needs a periodic set)."""
        if self.pred is not None:
            k = 0
            while self.nth(k + 1) < n:
                k += 1
            return k
        c = sum(1 for h in self.head if h < n)
        if n > self.start:
            q, r = divmod(n - self.start, self.period)
            c += q * len(self.residues) + sum(1 for s in self.residues if s < r)
        return c

    def subsample(self, step: int, off: int = 0) -> "IndexSet":
        """The set ``{nth(step*e + off) : e >= 1}`` with ``step*e + off >= 1``."""
        if step < 1:
            raise ValueError("step must be positive")
        e_min = max(1, -(-(1 - off) // step))
        if self.pred is not None:
            src = self
            cache: dict = {}

            def pred(n, src=src):
                # n is selected when its enumeration position has the right residue
                if not src.contains(n):
                    return False
                if n not in cache:
                    cache[n] = src.count_below(n) + 1
                pos = cache[n]
                return pos >= step * e_min + off and (pos - off) % step == 0
            return IndexSet(pred=pred, label=f"{self.label}[{step}e+{off}]")
        h, R = len(self.head), len(self.residues)
        e0 = e_min
        head = []
        while step * e0 + off <= h:
            head.append(self.nth(step * e0 + off))
            e0 += 1
        C = math.lcm(step, R) // step
        new_period = self.period * (math.lcm(step, R) // R)
        first = self.nth(step * e0 + off)
        res = sorted(self.nth(step * e + off) - first for e in range(e0, e0 + C))
        return IndexSet(head=head, start=first, period=new_period, residues=res,
                        label=f"{self.label}[{step}e+{off}]")

    def tail_subset_of(self, other: "IndexSet") -> bool:
        """Whether every large element of self lies in other (periodic sets only)."""
        if not (self.periodic and other.periodic):
            raise ValueError("tail inclusion is decidable for periodic sets only")
        base = max(self.start, other.start)
        P = math.lcm(self.period, other.period)
        return all(other.contains(n) for n in range(base, base + P) if self.contains(n))

    def describe(self) -> str:
        if self.pred is not None:
            return f"scan({self.label})"
        return (f"head={list(self.head)} start={self.start} period={self.period} "
                f"residues={list(self.residues)}")


def com_set(E, c, G: Profile, depth: int) -> IndexSet | None:
    """Gaps with ratio exceeding c.

    With a periodic gap profile the set is exact and periodic; ``None`` means it
    is finite.  Otherwise a lazy scan is returned.
    """
    c = Fraction(c)
    if G.is_periodic:
        head = [n for n in range(1, G.start) if E.gap_ratio(n) > c]
        res = [j for j, e in enumerate(G.entries) if e is DIV or (not is_marker(e) and e > c)]
        if not res:
            return None
        return IndexSet(head=head, start=G.start, period=G.period, residues=res,
                        label=f"ratio>{c}")
    return IndexSet(pred=lambda n: E.gap_ratio(n) > c, label=f"ratio>{c}")


# -- ladder products -------------------------------------------------------------

def _mul(x, y):
    if is_inf(x) or is_inf(y):
        return INF
    return x * y


def _val(e):
    if e is DIV:
        return INF
    if e is ZERO:
        raise ValueError("ratio profile tends to zero; gap/block ratios must stay >= 1")
    return e


def _base(G: Profile, B: Profile, *sets) -> tuple[int, int]:
    starts = [G.start, B.start] + [s.start + 1 for s in sets]
    P = math.lcm(G.period, B.period, *[s.period for s in sets])
    return max(starts) + 1, P


def _block_span(G, B, i, j, top, bottom):
    # hi_i / lo_j style ratios; written out to keep the index bookkeeping obvious
    r = Fraction(1)
    if top == "hi" and (i < j or bottom == "lo"):
        r = _mul(r, _val(B.entry(i)))
    for n in range(i, j):
        r = _mul(r, _val(G.entry(n)))
        if n + 1 < j or (n + 1 == j and bottom == "lo"):
            r = _mul(r, _val(B.entry(n + 1)))
    return r


def ratio_between(G: Profile, B: Profile, i: int, top: str, j: int, bottom: str):
    """Eventual value of ``point(i, top) / point(j, bottom)`` for blocks ``i <= j``,
    with ``point(n, "hi") = hi_n`` and ``point(n, "lo") = lo_n``."""
    if i > j:
        raise ValueError("need i <= j")
    if i == j:
        if top == bottom:
            return Fraction(1)
        if top == "hi" and bottom == "lo":
            return _val(B.entry(i))
        raise ValueError("lo of a block lies below its hi")
    return _block_span(G, B, i, j, top, bottom)


def consecutive_max(G: Profile, B: Profile, S: IndexSet):
    """limsup of ``a_i / b_{i'}`` over consecutive elements ``i < i'`` of S.

    This is ``hi_{i+1} / lo_{i'}``; it is the M constant of the enumeration of S.
    """
    base, P = _base(G, B, S)
    best = Fraction(0)
    n = base
    first = _next_in(S, n)
    i = first
    while i < first + P:
        nxt = _next_in(S, i + 1)
        val = ratio_between(G, B, i + 1, "hi", nxt, "lo")
        if is_inf(val):
            return INF
        best = max(best, val)
        i = nxt
    return best


def consecutive_min(G: Profile, B: Profile, S: IndexSet):
    base, P = _base(G, B, S)
    first = _next_in(S, base)
    i, best = first, None
    while i < first + P:
        nxt = _next_in(S, i + 1)
        val = ratio_between(G, B, i + 1, "hi", nxt, "lo")
        best = val if best is None or (not is_inf(val) and (is_inf(best) or val < best)) else best
        i = nxt
    return best


def _next_in(S: IndexSet, n: int) -> int:
    while not S.contains(n):
        n += 1
    return n


def _prev_in(S: IndexSet, n: int) -> int:
    while not S.contains(n):
        n -= 1
        if n < 1:
            raise ValueError("no element below")
    return n


def tau_ratios(G: Profile, B: Profile, S: IndexSet, T: IndexSet, kind: str):
    """Eventual ratios ``l / tau`` for test points at blocks in T.

    ``tau`` is the ``kind`` endpoint ("lo" or "hi") of block j, and ``l`` is the
    left end of the nearest gap of S above block j, i.e. ``hi_{d+1}`` with
    ``d = max{i in S : i < j}``.  Returns the list over one common period.
    """
    base, P = _base(G, B, S, T)
    base += max(S.period, 1)
    out = []
    j = _next_in(T, base)
    stop = j + P
    while j < stop:
        d = _prev_in(S, j - 1)
        out.append(ratio_between(G, B, d + 1, "hi", j, kind))
        j = _next_in(T, j + 1)
    return out


def limsup_of(values):
    best = Fraction(0)
    for v in values:
        if is_inf(v):
            return INF
        best = max(best, v)
    return best


def liminf_of(values):
    fin = [v for v in values if not is_inf(v)]
    return min(fin) if fin else INF


def window_misses_eventually(G: Profile, B: Profile, T: IndexSet, kind: str, k, K) -> bool:
    """Whether ``(k*tau_n, K*tau_n)`` eventually misses the set, tau at blocks of T.

    Walks upward from tau in relative (multiplicative) coordinates.  The window
    misses the set exactly when the highest gap starting at or below ``k``
    reaches ``K``; a gap whose ratio diverges reaches every ``K`` eventually.
    """
    k, K = Fraction(k), Fraction(K)
    base, P = _base(G, B, T)
    j = _next_in(T, base + max(G.period, B.period))
    stop = j + P
    while j < stop:
        if not _fits_above(G, B, j, kind, k, K):
            return False
        j = _next_in(T, j + 1)
    return True


def _e(prof: Profile, n: int):
    # periodic extension in both directions: the eventual pattern, read anywhere
    return prof.entries[(n - prof.start) % prof.period]


def _fits_above(G, B, j, kind, k, K, max_steps=1_000_000) -> bool:
    pos = Fraction(1)
    n = j
    candidate = None  # (lo_rel, hi_rel) of the highest gap with lo_rel <= k
    if kind == "lo":
        beta = _val(_e(B, n))
        if is_inf(beta):
            return False  # tau's own block eventually swallows the window
        pos = beta
        if pos > k:
            return False
    for _ in range(max_steps):
        g = _val(_e(G, n - 1))
        if is_inf(g):
            candidate = (pos, INF)
            break
        candidate = (pos, pos * g)
        pos = pos * g
        if pos > k:
            break
        beta = _val(_e(B, n - 1))
        if is_inf(beta):
            return False
        pos = pos * beta
        if pos > k:
            return False  # the window opens inside block n-1
        n -= 1
    else:
        raise RuntimeError("ladder walk did not leave the window")
    hi = candidate[1]
    return is_inf(hi) or hi >= K
