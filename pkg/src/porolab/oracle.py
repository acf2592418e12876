"""Brute-force references over finite truncations.

A truncation keeps the first N blocks and declares everything below the last
block's left end unknown.  Every function here refuses rather than guesses
when that unknown region could change the answer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact import Rational, as_rational


class OracleRefusal(ValueError):
    """The unknown region below the floor could change the answer."""


@dataclass(frozen=True)
class Truncation:
    blocks: tuple  # Blocks, strictly decreasing
    floor: Rational

    @property
    def gaps(self):
        """Known bounded components (a, b), top first."""
        return [(d.hi, u.lo) for u, d in zip(self.blocks, self.blocks[1:])]


def truncate(E, N: int) -> Truncation:
    if N < 1:
        raise ValueError("need at least one block")
    blocks = tuple(E.block(n) for n in range(1, N + 1))
    return Truncation(blocks, blocks[-1].lo)


def brute_lambda(T: Truncation, h) -> Rational:
    """Largest open subinterval of (0, h) missing the set, by exhaustive scan."""
    h = as_rational(h)
    if not h > T.floor:
        raise OracleRefusal(f"h = {h} is not above the floor {T.floor}")
    best = Rational(0)
    top = T.blocks[0].hi
    if h > top:
        best = h - top
    for a, b in T.gaps:
        if a < h:
            right = b if b < h else h
            if right - a > best:
                best = right - a
    # any gap below the floor is shorter than the floor itself
    if T.floor > best:
        raise OracleRefusal("the unknown region below the floor could hold the largest gap")
    return best


@dataclass(frozen=True)
class ProfileSup:
    value: Rational
    gaps_seen: int  # gaps 1..gaps_seen contribute; deeper ones were refused


def _candidates(T: Truncation):
    pts = []
    for a, b in T.gaps:
        pts += [a, b, (a + b) / 2]
    for blk in T.blocks[:-1]:
        pts.append((blk.lo + blk.hi) / 2)
    return pts


def brute_profile_sup(T: Truncation) -> ProfileSup:
    """sup of lambda(h)/h over gap endpoints and midpoints in (floor, b_1]."""
    if len(T.blocks) < 2:
        raise ValueError("need at least two blocks")
    b1 = T.gaps[0][1]
    best, seen = Rational(0), 0
    for h in _candidates(T):
        if not (T.floor < h and (h < b1 or h == b1)):
            continue
        try:
            r = brute_lambda(T, h) / h
        except OracleRefusal:
            continue
        if r > best:
            best = r
    # the largest n with h = b_n accepted tells which gaps the sup covered
    for n, (a, b) in enumerate(T.gaps, 1):
        try:
            brute_lambda(T, b)
        except OracleRefusal:
            break
        seen = n
    return ProfileSup(best, seen)


@dataclass(frozen=True)
class BruteMatching:
    assignment: tuple  # component index per tau_n (0 is the unbounded top component)
    candidates: tuple  # admissible component indices per tau_n


def brute_match(T: Truncation, tau, bound) -> BruteMatching | None:
    """Assign each tau_n a component (a, b) with tau_n <= a <= bound * tau_n.

    Tries every admissible component; the returned assignment picks the nearest
    admissible left end above each point, which is non-increasing when tau is.
    """
    bound = as_rational(bound)
    lefts = [(0, T.blocks[0].hi)] + [(n, a) for n, (a, _) in enumerate(T.gaps, 1)]
    cands, chosen = [], []
    for y in tau:
        y = as_rational(y)
        if not y > T.floor:
            raise OracleRefusal(f"test point {y} is not above the floor")
        ok = [n for n, a in lefts if (y < a or y == a) and (a < bound * y or a == bound * y)]
        if not ok:
            return None
        cands.append(tuple(ok))
        chosen.append(max(ok))  # largest index = nearest left end
    return BruteMatching(tuple(chosen), tuple(cands))
