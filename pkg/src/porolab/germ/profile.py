"""Eventual shape of a positive sequence indexed from 1.

A profile is a claim about the tail of a sequence that a generator knows from
its construction.  It is what lets an asymptotic question be answered exactly
instead of from a finite sample.  Three shapes exist:

* ``periodic``: from index ``start`` on, the sequence cycles through
  ``entries``.  An entry is a fixed ``Fraction``, ``DIV`` (along that residue
  class the values increase strictly to infinity) or ``ZERO`` (they decrease
  strictly to zero).
* ``diagonal``: from ``start`` on, value ``n`` is ``scale * base**e(n+offset)``
  where ``e`` walks the triangle 1; 2, 1; 3, 2, 1; ...  so every power recurs
  infinitely often.
* ``unknown``: nothing is claimed.

Profiles only ever come from the structure of a construction; ``verify``
checks the claim against exact values up to a depth, which is the
monotonicity evidence certified verdicts require.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..exact import Rational


class _Marker:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    def __reduce__(self):
        return (_marker, (self.name,))


def _marker(name):
    return DIV if name == "DIV" else ZERO


DIV = _Marker("DIV")
ZERO = _Marker("ZERO")


def is_marker(e) -> bool:
    return isinstance(e, _Marker)


def diag_exponent(n: int) -> int:
    """Exponent at position ``n >= 1`` of the triangle 1; 2, 1; 3, 2, 1; ..."""
    k = (math.isqrt(8 * (n - 1) + 1) - 1) // 2  # groups fully before n
    if k * (k + 1) // 2 >= n:
        k -= 1
    i = n - k * (k + 1) // 2  # 1-based position inside group k+1
    return k + 2 - i


def _inv(e):
    if e is DIV:
        return ZERO
    if e is ZERO:
        return DIV
    return 1 / e


@dataclass(frozen=True)
class Profile:
    kind: str
    start: int = 1
    entries: tuple = ()
    base: Fraction | None = None
    scale: Fraction = Fraction(1)
    offset: int = 0

    # -- constructors --------------------------------------------------------
    @staticmethod
    def periodic(entries, start: int = 1) -> "Profile":
        entries = tuple(e if isinstance(e, _Marker) else Fraction(e) for e in entries)
        if not entries:
            raise ValueError("periodic profile needs at least one entry")
        return Profile("periodic", max(1, start), _minimal_period(entries))

    @staticmethod
    def constant(v, start: int = 1) -> "Profile":
        return Profile.periodic((v,), start)

    @staticmethod
    def diagonal(base, scale=1, start: int = 1, offset: int = 0) -> "Profile":
        return Profile("diagonal", max(1, start), (), Fraction(base), Fraction(scale), offset)

    @staticmethod
    def unknown() -> "Profile":
        return Profile("unknown")

    # -- queries -------------------------------------------------------------
    @property
    def is_periodic(self) -> bool:
        return self.kind == "periodic"

    @property
    def is_diagonal(self) -> bool:
        return self.kind == "diagonal"

    @property
    def known(self) -> bool:
        return self.kind != "unknown"

    @property
    def period(self) -> int:
        return len(self.entries)

    def entry(self, n: int):
        if self.kind != "periodic":
            raise ValueError("entry() needs a periodic profile")
        if n < self.start:
            raise IndexError(f"index {n} precedes the profile start {self.start}")
        return self.entries[(n - self.start) % len(self.entries)]

    def diag_value(self, n: int) -> Rational:
        return Rational(self.scale) * Rational.power(self.base, diag_exponent(n + self.offset))

    def limsup(self):
        """Exact limsup (``math.inf`` when unbounded); ``None`` if unknown."""
        if self.kind == "diagonal":
            return math.inf if self.base > 1 else self.scale * self.base
        if self.kind != "periodic":
            return None
        best = Fraction(0)
        for e in self.entries:
            if e is DIV:
                return math.inf
            if e is not ZERO and e > best:
                best = e
        return best

    def finite_entries(self):
        return [e for e in self.entries if not isinstance(e, _Marker)]

    def residues(self, pred):
        return [j for j, e in enumerate(self.entries) if pred(e)]

    # -- transformations -----------------------------------------------------
    def reciprocal(self) -> "Profile":
        if self.kind == "periodic":
            return Profile.periodic(tuple(_inv(e) for e in self.entries), self.start)
        if self.kind == "diagonal":
            return Profile.diagonal(1 / self.base, 1 / self.scale, self.start, self.offset)
        return self

    def scaled(self, c) -> "Profile":
        c = Fraction(c)
        if c <= 0:
            raise ValueError("profiles scale by positive factors only")
        if self.kind == "periodic":
            return Profile.periodic(
                tuple(e if isinstance(e, _Marker) else c * e for e in self.entries), self.start)
        if self.kind == "diagonal":
            return Profile.diagonal(self.base, self.scale * c, self.start, self.offset)
        return self

    def shift(self, s: int) -> "Profile":
        """Profile of ``n -> seq(n + s)``; ``s`` may be negative (a prepended prefix)."""
        if self.kind == "unknown":
            return self
        new_start = max(1, self.start - s)
        if self.kind == "diagonal":
            return Profile.diagonal(self.base, self.scale, new_start, self.offset + s)
        p = len(self.entries)
        rot = (new_start + s - self.start) % p
        return Profile.periodic(self.entries[rot:] + self.entries[:rot], new_start)

    def subsample(self, step: int, off: int = 0) -> "Profile":
        """Profile of ``n -> seq(step * n + off)``."""
        if self.kind != "periodic":
            return Profile.unknown()
        new_start = max(1, -(-(self.start - off) // step))
        p = len(self.entries)
        new_p = p // math.gcd(p, step)
        ents = tuple(self.entry(step * (new_start + j) + off) for j in range(new_p))
        return Profile.periodic(ents, new_start)

    @staticmethod
    def interleave(a: "Profile", b: "Profile") -> "Profile":
        """Profile of odd positions from ``a`` and even positions from ``b``."""
        if not (a.is_periodic and b.is_periodic):
            return Profile.unknown()
        start = max(2 * a.start - 1, 2 * b.start)
        p = 2 * math.lcm(a.period, b.period)
        ents = []
        for n in range(start, start + p):
            ents.append(a.entry((n + 1) // 2) if n % 2 else b.entry(n // 2))
        return Profile.periodic(ents, start)

    @staticmethod
    def product(a: "Profile", b: "Profile") -> "Profile":
        """Termwise product, when both tails are periodic and the result is decidable."""
        if not (a.is_periodic and b.is_periodic):
            return Profile.unknown()
        start = max(a.start, b.start)
        p = math.lcm(a.period, b.period)
        ents = []
        for n in range(start, start + p):
            x, y = a.entry(n), b.entry(n)
            if isinstance(x, _Marker) and isinstance(y, _Marker):
                if x is not y:
                    return Profile.unknown()
                ents.append(x)
            elif isinstance(x, _Marker) or isinstance(y, _Marker):
                ents.append(x if isinstance(x, _Marker) else y)
            else:
                ents.append(x * y)
        return Profile.periodic(ents, start)

    # -- evidence ------------------------------------------------------------
    def verify(self, value, depth: int) -> tuple[bool, int | None]:
        """Check the claim against ``value(n)`` for ``start <= n <= depth``.

        Returns ``(ok, first_bad_index)``.
        """
        if self.kind == "unknown":
            return False, None
        for n in range(self.start, depth + 1):
            v = value(n)
            if v <= 0:
                return False, n
            if self.kind == "diagonal":
                if v != self.diag_value(n):
                    return False, n
                continue
            e = self.entry(n)
            if isinstance(e, _Marker):
                prev = n - self.period
                if prev >= self.start:
                    w = value(prev)
                    if (e is DIV and not v > w) or (e is ZERO and not v < w):
                        return False, n
            elif v != e:
                return False, n
        return True, None

    def describe(self) -> str:
        if self.kind == "periodic":
            body = ", ".join(repr(e) if isinstance(e, _Marker) else str(e) for e in self.entries)
            return f"periodic(start={self.start}; {body})"
        if self.kind == "diagonal":
            return f"diagonal(base={self.base}, scale={self.scale}, start={self.start})"
        return "unknown"


def _minimal_period(entries: tuple) -> tuple:
    p = len(entries)
    for d in range(1, p + 1):
        if p % d == 0 and all(entries[i] is entries[i % d] or entries[i] == entries[i % d]
                              for i in range(p)):
            return entries[:d]
    return entries
