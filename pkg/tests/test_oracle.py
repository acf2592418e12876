from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import x_power
from porolab.csp import TestSequence, matching_sequence, tau_strongly_porous
from porolab.exact import Rational
from porolab.germ import Block, FiniteSet, load
from porolab.germ.sets import ElaborationError
from porolab.oracle import (OracleRefusal, Truncation, brute_lambda, brute_match,
                            brute_profile_sup, truncate)
from porolab.porosity import lambda_gap, porosity_profile
from strategies import shapes, spec_text


def test_brute_lambda_examples(GEO):
    assert brute_lambda(truncate(GEO, 32), 1) == Fraction(1, 2)
    T = Truncation((Block(Rational(Fraction(1, 4)), Rational(Fraction(1, 2))),),
                   Rational(Fraction(1, 4)))
    assert brute_lambda(T, 1) == Fraction(1, 2)
    with pytest.raises(OracleRefusal):
        brute_lambda(T, Fraction(1, 8))


def test_brute_lambda_refuses_when_floor_could_dominate(GEO):
    # at h just above the floor the unseen region is as long as any known gap
    T = truncate(GEO, 6)
    with pytest.raises(OracleRefusal):
        brute_lambda(T, T.floor * Fraction(3, 2))


def test_truncate_gate(GEO):
    with pytest.raises(ValueError):
        truncate(GEO, 0)


def test_profile_sup_examples(GEO, F1):
    assert brute_profile_sup(truncate(GEO, 32)).value == Fraction(1, 2)
    s = brute_profile_sup(truncate(F1, 8))
    # gap n = (x_(n+1), x_n) has ratio 1 - x_n; the deepest admitted gap wins
    assert s.value == 1 - x_power(s.gaps_seen)
    assert s.gaps_seen == 7


def test_profile_sup_equal_ratios():
    pts = [Fraction(1), Fraction(1, 3), Fraction(1, 9)]
    T = Truncation(tuple(Block(Rational(p), Rational(p)) for p in pts), Rational(pts[-1]))
    assert brute_profile_sup(T).value == Fraction(2, 3)


def test_profile_needs_two_blocks(GEO):
    with pytest.raises(ValueError):
        brute_profile_sup(truncate(GEO, 1))


def test_brute_match_examples(F1, F3):
    T = truncate(F1, 8)
    tau = [x_power(n + 1) for n in range(1, 7)]
    m = brute_match(T, tau, 2)
    assert m.assignment == tuple(range(1, 7))
    T3 = truncate(F3, 6)
    tau3 = [F3.block(n + 1).lo for n in range(1, 5)]
    assert brute_match(T3, tau3, 10) is None
    assert brute_match(T, [], 2).assignment == ()


def test_brute_match_floor_gate(F1):
    T = truncate(F1, 4)
    with pytest.raises(OracleRefusal):
        brute_match(T, [T.floor / 2], 2)


def test_oracle_agreement_on_corpus(corpus):
    pairs = 0
    for E in corpus:
        if isinstance(E, FiniteSet):
            continue
        T = truncate(E, 16)
        for n in range(1, 15):
            a, b = E.gap(n)
            for h in (a, b, (a + b) / 2, (E.block(n).lo + E.block(n).hi) / 2):
                try:
                    ref = brute_lambda(T, h)
                except OracleRefusal:
                    continue
                assert lambda_gap(E, h).value == ref, (E.name, n)
                pairs += 1
        s = brute_profile_sup(T)
        if s.gaps_seen:
            prof = porosity_profile(E, s.gaps_seen)
            assert max(prof.ratios) == s.value, E.name
    assert pairs >= 100


def test_matching_agrees_with_brute_match(corpus):
    for E in corpus:
        if isinstance(E, FiniteSet):
            continue
        ctx = matching_sequence(E, 64)
        tau = TestSequence.block_endpoints(E, "lo", offset=1)
        m = tau_strongly_porous(E, tau, 64, ctx)
        if not m.verdict.truthy or m.C is None:
            continue
        T = truncate(E, 24)
        n = 12
        pts = [tau.tau(k) for k in range(1, n + 1)]
        bm = brute_match(T, pts, 2 * max(m.C, 1))
        assert bm is not None, E.name
        for k in range(1, n + 1):
            if m.slots.k[k - 1] == 0:
                continue
            # the slot choice is among the admissible components
            assert m.gaps.idx(k) in bm.candidates[k - 1], (E.name, k)


@given(shapes, st.integers(8, 24))
@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_profile_sup_matches_window_max(shape, N):
    try:
        E = load(spec_text(shape))
    except (ValueError, ElaborationError):
        return
    s = brute_profile_sup(truncate(E, N))
    if s.gaps_seen:
        assert max(porosity_profile(E, s.gaps_seen).ratios) == s.value
