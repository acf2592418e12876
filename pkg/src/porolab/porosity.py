"""Largest gaps below a height and right porosity at 0."""

from __future__ import annotations

from dataclasses import dataclass, field

from .exact import Rational, as_rational, is_inf
from .germ.sets import FiniteSet, GermSet
from .verdict import TailVerdict, certified, empirical

LAMBDA_SCAN_LIMIT = 100_000


@dataclass(frozen=True)
class GapLength:
    """Value of the largest-gap function.

    ``exact`` is False only when the scan hit its depth bound, in which case
    ``value`` is a lower bound.  ``where`` is an open interval realizing it.
    """

    value: Rational
    exact: bool
    where: tuple | None = None


def _finite_gaps(E: FiniteSet, h):
    blocks = E.blocks()
    if not blocks:
        yield (Rational(0), h)
        return
    if h > blocks[0].hi:
        yield (blocks[0].hi, h)
    for up, down in zip(blocks, blocks[1:]):
        yield (down.hi, up.lo)
    yield (Rational(0), blocks[-1].lo)


def lambda_gap(E, h, depth: int | None = None) -> GapLength:
    """Length of the largest open subinterval of (0, h) containing no point of E."""
    h = as_rational(h)
    if not h > 0:
        raise ValueError("h must be positive")
    best, where = Rational(0), None
    if isinstance(E, FiniteSet):
        for a, b in _finite_gaps(E, h):
            if a >= h:
                continue
            top = b if b < h else h
            if top - a > best:
                best, where = top - a, (a, top)
        return GapLength(best, True, where)

    limit = depth or LAMBDA_SCAN_LIMIT
    top = E.block(1).hi
    if h > top:
        best, where = h - top, (top, h)
    for n in range(1, limit + 1):
        blk = E.block(n)
        # every gap below block n is shorter than blk.lo
        if blk.lo <= best:
            return GapLength(best, True, where)
        a, b = E.gap(n)
        if h <= a:
            continue
        right = b if b < h else h
        length = right - a
        if length > best:
            best, where = length, (a, right)
    return GapLength(best, E.block(limit + 1).hi <= best, where)


@dataclass(frozen=True)
class PorosityProfile:
    """Per-gap porosity ratios r_n = (b_n - a_n) / b_n up to a depth."""

    ratios: tuple
    tail_max: Rational
    verdict: TailVerdict
    depth: int

    def window_max(self, start: int = 1, stop: int | None = None) -> Rational:
        vals = self.ratios[start - 1: stop]
        return max(vals)


def gap_ratio_limsup(E: GermSet, depth: int):
    """Exact limsup of gap ratios b/a, or None when no structural claim is verified."""
    g, _ = E.profiles(depth)
    return g.limsup() if g.known else None


def _empirical_growth(values) -> bool:
    n = len(values)
    if n < 8:
        return False
    q = n // 4
    maxima = [max(values[i * q:(i + 1) * q]) for i in range(4)]
    return maxima[3] > maxima[2] > maxima[1]


def limsup_one_verdict(E: GermSet, depth: int) -> TailVerdict:
    """Verdict on "limsup of gap ratios is infinite", i.e. porosity at 0 equals 1."""
    L = gap_ratio_limsup(E, depth)
    g, _ = E.profiles(depth)
    if L is not None:
        law = E.law_meta
        tag = law.limit_tag.value if law is not None else None
        return certified(is_inf(L), depth, limsup_gap_ratio=L, profile=g.describe(), law_tag=tag)
    vals = [E.gap_ratio(n) for n in range(1, depth + 1)]
    grows = _empirical_growth(vals)
    return empirical(grows, depth, window_max_gap_ratio=max(vals))


def porosity_profile(E: GermSet, depth: int) -> PorosityProfile:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    rs = []
    for n in range(1, depth + 1):
        a, b = E.gap(n)
        rs.append(1 - a / b)
    half = max(1, depth // 2)
    return PorosityProfile(tuple(rs), max(rs[half - 1:]), limsup_one_verdict(E, depth), depth)


@dataclass(frozen=True)
class PorosityAtZero:
    lower: Rational
    upper: Rational
    verdict: TailVerdict
    exact: bool = field(default=False)

    @property
    def value(self):
        if not self.exact:
            raise ValueError("porosity is only bracketed, not known exactly")
        return self.lower


def porosity_at_zero(E, depth: int) -> PorosityAtZero:
    """Right porosity of E at 0 with a verdict on strong porosity (value 1)."""
    one = Rational(1)
    if isinstance(E, FiniteSet):
        # lambda(h) = h once h is below the least point
        return PorosityAtZero(one, one, certified(True, depth, reason="origin is isolated"), True)
    L = gap_ratio_limsup(E, depth)
    v = limsup_one_verdict(E, depth)
    if L is not None:
        p = one if is_inf(L) else one - one / L
        return PorosityAtZero(p, p, v, True)
    prof = porosity_profile(E, depth)
    return PorosityAtZero(prof.tail_max, one, v, False)


def p_plus_text(p: PorosityAtZero) -> str:
    return str(p.lower) if p.exact else f"[{p.lower}, {p.upper}]"


__all__ = ["GapLength", "lambda_gap", "PorosityProfile", "porosity_profile",
           "PorosityAtZero", "porosity_at_zero", "gap_ratio_limsup", "limsup_one_verdict",
           "p_plus_text"]
