"""Invariant suites run over the bundled corpus."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus import load_corpus
from .csp import (C_E, C_of_tau, CspStatus, TestSequence, canonical_family, csp_certify,
                  matching_sequence, tau_strongly_porous)
from .gaps import GapSequence, M_of, almost_strictly_decreasing, equiv, strictify
from .germ.sets import FiniteSet
from .oracle import OracleRefusal, brute_lambda, brute_profile_sup, truncate
from .porosity import lambda_gap, porosity_profile
from .verdict import Status, conjoin


@dataclass
class SuiteResult:
    name: str
    tallies: Counter = field(default_factory=Counter)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, what):
        self.failures.append(what)
        self.tallies["fail"] += 1

    def summary(self) -> str:
        parts = ", ".join(f"{k}={v}" for k, v in sorted(self.tallies.items()))
        return f"{self.name}: {'PASS' if self.ok else 'FAIL'} ({parts})"


def three_verdicts(E, depth: int):
    """Matching over the canonical family, universal with finite M, and finite C_E."""
    if isinstance(E, FiniteSet):
        t = conjoin([], depth)
        return t, t, t
    ctx = matching_sequence(E, depth)
    L, U = ctx
    v1 = conjoin([tau_strongly_porous(E, t, depth, ctx).verdict
                  for t in canonical_family(E, depth, ctx)], depth)
    if U.verdict.status is Status.CERTIFIED_TRUE and U.M_verdict is not None:
        v2 = U.M_verdict
    else:
        v2 = U.verdict
    _, v3 = C_E(E, depth)
    return v1, v2, v3


def agreement(depth: int = 64, sets=None) -> SuiteResult:
    r = SuiteResult("agreement")
    for E in sets or load_corpus():
        vs = three_verdicts(E, depth)
        if all(v.certified for v in vs):
            r.tallies["certified"] += 1
            if len({v.truthy for v in vs}) == 1:
                r.tallies["agree"] += 1
            else:
                r.fail((E.name, [v.label() for v in vs]))
        else:
            r.tallies["uncertified"] += 1
    return r


def heights(T):
    """Test heights above the floor: gap endpoints, gap and block midpoints, and above."""
    hs = []
    for a, b in T.gaps:
        hs += [b, (a + b) / 2]
        if a > T.floor:
            hs.append(a)
    for blk in T.blocks[:-1]:
        hs.append((blk.lo + blk.hi) / 2)
    hs.append(2 * T.blocks[0].hi)
    return hs


def oracle(depth: int = 32, sets=None) -> SuiteResult:
    r = SuiteResult("oracle")
    for E in sets or load_corpus():
        if isinstance(E, FiniteSet):
            continue
        T = truncate(E, depth)
        for h in heights(T):
            try:
                ref = brute_lambda(T, h)
            except OracleRefusal:
                r.tallies["refused"] += 1
                continue
            got = lambda_gap(E, h)
            if got.value == ref:
                r.tallies["lambda_agree"] += 1
            else:
                r.fail((E.name, "lambda", str(h)))
        sup = brute_profile_sup(T)
        if sup.gaps_seen:
            w = porosity_profile(E, sup.gaps_seen).window_max()
            if w == sup.value:
                r.tallies["profile_agree"] += 1
            else:
                r.fail((E.name, "profile", str(w), str(sup.value)))
    return r


def c_equals_m(depth: int = 64, sets=None) -> SuiteResult:
    """C at tau_n = m_(n+1) equals M of the universal sequence on certified sets."""
    r = SuiteResult("c-equals-m")
    for E in sets or load_corpus():
        if isinstance(E, FiniteSet):
            continue
        cert = csp_certify(E, depth)
        if cert.status is not CspStatus.CERTIFIED:
            continue
        ctx = matching_sequence(E, depth)
        L, U = ctx
        C, vd = C_of_tau(E, TestSequence.gap_right_endpoints(E, L), depth, ctx)
        if vd.certified and C == U.M_value:
            r.tallies["equal"] += 1
        else:
            r.fail((E.name, str(C), str(U.M_value)))
    return r


def strictify_suite(depth: int = 64, sets=None) -> SuiteResult:
    r = SuiteResult("strictify")
    for E in sets or load_corpus():
        if isinstance(E, FiniteSet):
            continue
        L, U = matching_sequence(E, depth)
        if L is None or not U.verdict.certified or not U.verdict.truthy:
            continue
        for A in (L, L.repeated(2)):
            S = strictify(A, depth)
            lefts = [S.entry(k)[0] for k in range(1, 24)]
            if not all(b < a for a, b in zip(lefts, lefts[1:])):
                r.fail((E.name, A.label, "not strictly decreasing"))
                continue
            if not equiv(S, A, depth).truthy:
                r.fail((E.name, A.label, "not equivalent"))
                continue
            if almost_strictly_decreasing(S, depth).status is not Status.CERTIFIED_TRUE:
                r.fail((E.name, A.label, "strictness not certified"))
                continue
            m1, v1 = M_of(S, depth)
            m0, v0 = M_of(L, depth)
            if v1.certified and v0.certified and m1 != m0:
                r.fail((E.name, A.label, "M changed"))
                continue
            r.tallies["ok"] += 1
    return r


SUITES = {"agreement": agreement, "oracle": oracle, "c-equals-m": c_equals_m,
          "strictify": strictify_suite}
