"""Germ sets: closed sets near 0 built from disjoint rational blocks."""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

from ..exact import Rational, as_rational
from .laws import DecayLaw, RatioMap, RatioTable, SemanticError
from .profile import ZERO, Profile, is_marker

DEFAULT_DEPTH = 64
M0_SEARCH_BOUND = 10_000


class ElaborationError(ValueError):
    pass


@dataclass(frozen=True)
class Block:
    lo: Rational
    hi: Rational

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if not (self.lo > 0 and self.lo <= self.hi):
            raise ValueError(f"block needs 0 < lo <= hi, got [{self.lo}, {self.hi}]")

    def contains(self, y) -> bool:
        return self.lo <= y <= self.hi

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


# -- shapes ----------------------------------------------------------------------

@dataclass(frozen=True)
class Points:
    law: DecayLaw


@dataclass(frozen=True)
class Thicken:
    law: DecayLaw
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        if self.q <= 1:
            raise SemanticError("thickening factor q must exceed 1")


@dataclass(frozen=True)
class Bands:
    law: DecayLaw


@dataclass(frozen=True)
class ExplicitBlocks:
    pairs: tuple  # ((lo, hi), ...) as Fractions


@dataclass(frozen=True)
class RatioGaps:
    gap_ratio: RatioMap
    block_ratio: RatioMap
    seed: Fraction

    def __post_init__(self):
        object.__setattr__(self, "seed", Fraction(self.seed))
        if self.seed <= 0:
            raise SemanticError("seed must be positive")


Shape = Union[Points, Thicken, Bands, ExplicitBlocks, RatioGaps]


@dataclass(frozen=True)
class SetSpec:
    name: str
    shape: Shape
    depth: int = DEFAULT_DEPTH
    origin_in_set: bool = True
    depth_given: bool = field(default=False, compare=False)


# -- sets ------------------------------------------------------------------------

class Origin(enum.Enum):
    ACCUMULATES_AT_ZERO = "AccumulatesAtZero"
    DOES_NOT_ACCUMULATE = "DoesNotAccumulate"


class GermSet:
    """An infinite stream of closed blocks ``block(1) > block(2) > ...`` tending to 0.

    Gap ``n`` is the open interval ``(block(n+1).hi, block(n).lo)``.  Besides
    the blocks, a germ set carries the structural profiles of its gap ratios
    ``block(n).lo / block(n+1).hi`` and block ratios ``block(n).hi / block(n).lo``.
    """

    def __init__(self, block_fn: Callable[[int], Block], *, gap_profile: Profile,
                 block_profile: Profile, name: str = "E", origin_in_set: bool = True,
                 law_meta: DecayLaw | None = None, spec: SetSpec | None = None,
                 m0: int | None = None, lead: int = 0):
        self._block_fn = block_fn
        self._cache: dict[int, Block] = {}
        self._lock = threading.Lock()
        self.gap_profile = gap_profile
        self.block_profile = block_profile
        self.name = name
        self.origin_in_set = origin_in_set
        self.law_meta = law_meta
        self.spec = spec
        self.m0 = m0
        self.lead = lead
        self._verified: dict[int, tuple] = {}

    def block(self, n: int) -> Block:
        if n < 1:
            raise IndexError("blocks are indexed from 1")
        b = self._cache.get(n)
        if b is None:
            b = self._block_fn(n)
            with self._lock:
                b = self._cache.setdefault(n, b)
        return b

    def blocks(self, depth: int) -> list[Block]:
        return [self.block(n) for n in range(1, depth + 1)]

    def gap(self, n: int) -> tuple[Rational, Rational]:
        return (self.block(n + 1).hi, self.block(n).lo)

    def gap_ratio(self, n: int) -> Rational:
        a, b = self.gap(n)
        return b / a

    def block_ratio(self, n: int) -> Rational:
        b = self.block(n)
        return b.hi / b.lo

    is_finite = False

    def profiles(self, depth: int) -> tuple[Profile, Profile]:
        """Gap and block ratio profiles, each replaced by ``unknown`` unless it
        agrees with the exact data up to ``depth``."""
        got = self._verified.get(depth)
        if got is not None:
            return got
        g, bl = self.gap_profile, self.block_profile
        if g.known and not g.verify(self.gap_ratio, depth)[0]:
            g = Profile.unknown()
        if bl.known and not bl.verify(self.block_ratio, depth)[0]:
            bl = Profile.unknown()
        with self._lock:
            self._verified[depth] = (g, bl)
        return g, bl

    def check_invariants(self, depth: int):
        """Exact check that blocks are well formed and strictly separated."""
        for n in range(1, depth + 1):
            b = self.block(n)
            nxt = self.block(n + 1)
            if not nxt.hi < b.lo:
                raise ElaborationError(f"{self.name}: blocks {n} and {n + 1} are not separated")

    def contains(self, y, depth: int) -> bool:
        """Exact membership for ``y`` above ``block(depth).lo``."""
        for n in range(1, depth + 1):
            b = self.block(n)
            if y > b.hi:
                return False
            if y >= b.lo:
                return True
        raise ValueError("point lies below the inspected depth")

    def __repr__(self):
        return f"GermSet({self.name})"


class FiniteSet:
    """Finitely many blocks, so 0 is not an accumulation point."""

    is_finite = True

    def __init__(self, blocks=(), *, name: str = "E", origin_in_set: bool = True, spec=None):
        bl = sorted((b if isinstance(b, Block) else Block(*b) for b in blocks),
                    key=lambda b: b.lo, reverse=True)
        for up, down in zip(bl, bl[1:]):
            if not down.hi < up.lo:
                raise SemanticError("explicit blocks must be pairwise disjoint")
        self.block_list = tuple(bl)
        self.name = name
        self.origin_in_set = origin_in_set
        self.spec = spec

    def __len__(self):
        return len(self.block_list)

    def block(self, n: int) -> Block:
        return self.block_list[n - 1]

    def blocks(self, depth: int | None = None) -> list[Block]:
        return list(self.block_list if depth is None else self.block_list[:depth])

    def contains(self, y, depth=None) -> bool:
        if y == 0:
            return self.origin_in_set
        return any(b.contains(y) for b in self.block_list)

    def __repr__(self):
        return f"FiniteSet({self.name}, {len(self.block_list)} blocks)"


def classify_origin(E) -> Origin:
    return Origin.DOES_NOT_ACCUMULATE if E.is_finite else Origin.ACCUMULATES_AT_ZERO


def gap_at(E: GermSet, n: int):
    if n < 1:
        raise IndexError("gaps are indexed from 1")
    return E.gap(n)


# -- elaboration -------------------------------------------------------------------

def _find_m0(law: DecayLaw, q: Fraction, bound: int) -> int:
    """Least m with q*x_{n+1} < x_n for every n >= m."""
    prof = law.rho_profile()
    limit = Fraction(1) / q
    if prof.is_periodic:
        for e in prof.entries:
            if not is_marker(e) and e >= limit:
                raise ElaborationError(
                    f"q*x(n+1) < x(n) fails for every large n (eventual ratio {e}, q = {q})")
    last_bad = 0
    ok_run = 0
    need = prof.period if prof.is_periodic else None
    for n in range(1, bound + 1):
        if law.rho(n) * q < 1:
            ok_run += 1
        else:
            last_bad, ok_run = n, 0
        # one clean period past the profile start decides every residue class
        if need is not None and n >= prof.start and ok_run >= need:
            return last_bad + 1
    raise ElaborationError(f"no m0 with q*x(n+1) < x(n) found within {bound} indices")


def _merge_desc(intervals):
    """Union of closed intervals, as a list of disjoint (lo, hi) sorted downwards."""
    out = []
    for lo, hi in sorted(intervals, key=lambda t: t[1], reverse=True):
        if out and hi >= out[-1][0]:
            if lo < out[-1][0]:
                out[-1] = (lo, out[-1][1])
        else:
            out.append((lo, hi))
    return out


def _check_law(law: DecayLaw, depth: int):
    if isinstance(law, RatioTable):
        law.validate(depth + 2)


def elaborate(spec: SetSpec, *, m0_bound: int = M0_SEARCH_BOUND, check_depth: int | None = None):
    """Turn a parsed definition into a :class:`GermSet` or :class:`FiniteSet`."""
    shape = spec.shape
    depth = check_depth or spec.depth
    kw = dict(name=spec.name, origin_in_set=spec.origin_in_set, spec=spec)
    if isinstance(shape, ExplicitBlocks):
        return FiniteSet([Block(lo, hi) for lo, hi in shape.pairs], **kw)

    if isinstance(shape, Points):
        law = shape.law
        _check_law(law, depth)
        E = GermSet(lambda n: Block(law.x(n), law.x(n)),
                    gap_profile=law.rho_profile().reciprocal(),
                    block_profile=Profile.constant(1), law_meta=law, **kw)
    elif isinstance(shape, Thicken):
        law, q = shape.law, shape.q
        _check_law(law, depth)
        m0 = _find_m0(law, q, m0_bound)
        lead = _merge_desc([(law.x(i), q * law.x(i)) for i in range(1, m0 + 1)])
        lead_blocks = [Block(lo, hi) for lo, hi in lead]
        L = len(lead_blocks)
        s = m0 - L

        def thick(n, lead_blocks=lead_blocks, L=L, s=s):
            if n <= L:
                return lead_blocks[n - 1]
            x = law.x(n + s)
            return Block(x, q * x)

        # gap n (n >= L) runs from q*x_{n+s+1} up to x_{n+s}
        gprof = law.rho_profile().shift(s).scaled(q).reciprocal()
        gprof = _realign(gprof, L)
        E = GermSet(thick, gap_profile=gprof, block_profile=Profile.constant(q, start=L + 1),
                    law_meta=law, m0=m0, lead=L, **kw)
    elif isinstance(shape, Bands):
        law = shape.law
        _check_law(law, 2 * depth + 2)
        E = GermSet(lambda n: Block(law.x(2 * n + 1), law.x(2 * n)),
                    gap_profile=law.rho_profile().subsample(2, 1).reciprocal(),
                    block_profile=law.rho_profile().subsample(2, 0).reciprocal(),
                    law_meta=law, **kw)
    elif isinstance(shape, RatioGaps):
        g, beta, seed = shape.gap_ratio, shape.block_ratio, shape.seed
        for n in range(1, depth + 2):
            if not g.value(n) > 1:
                raise SemanticError(f"gap ratio at index {n} must exceed 1")
            if not beta.value(n) >= 1:
                raise SemanticError(f"block ratio at index {n} must be at least 1")
        _check_ratio_profiles(g.profile(), beta.profile())
        his = _RatioGapMemo(g, beta, seed)
        E = GermSet(his.block, gap_profile=g.profile(), block_profile=beta.profile(), **kw)
    else:  # pragma: no cover - the parser only builds the shapes above
        raise ElaborationError(f"unknown shape {shape!r}")
    E.check_invariants(min(depth, 256))
    return E


def _realign(prof: Profile, start: int) -> Profile:
    if not prof.known or prof.start >= start:
        return prof
    if prof.is_periodic:
        rot = (start - prof.start) % prof.period
        return Profile.periodic(prof.entries[rot:] + prof.entries[:rot], start)
    return Profile.diagonal(prof.base, prof.scale, start, prof.offset)


def _check_ratio_profiles(g: Profile, beta: Profile):
    if g.is_periodic:
        for e in g.entries:
            if e is ZERO or (not is_marker(e) and e <= 1):
                raise SemanticError("eventual gap ratios must exceed 1")
    if g.is_diagonal and (g.base <= 1 or g.base * g.scale <= 1):
        raise SemanticError("eventual gap ratios must exceed 1")
    if beta.is_periodic:
        for e in beta.entries:
            if e is ZERO or (not is_marker(e) and e < 1):
                raise SemanticError("eventual block ratios must be at least 1")
    if beta.is_diagonal and beta.base < 1:
        raise SemanticError("eventual block ratios must be at least 1")


class _RatioGapMemo:
    def __init__(self, g: RatioMap, beta: RatioMap, seed: Fraction):
        self.g, self.beta = g, beta
        self._blocks = [None]
        self._lock = threading.Lock()
        self._seed = Rational(seed)

    def block(self, n: int) -> Block:
        if n < len(self._blocks):
            return self._blocks[n]
        with self._lock:
            while len(self._blocks) <= n:
                k = len(self._blocks)
                hi = self._seed if k == 1 else self._blocks[k - 1].lo / self.g.value(k - 1)
                self._blocks.append(Block(hi / self.beta.value(k), hi))
            return self._blocks[n]
