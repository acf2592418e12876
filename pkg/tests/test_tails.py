from fractions import Fraction

from hypothesis import given, settings, strategies as st

from porolab.exact import INF
from porolab.germ import load
from porolab.tails import (IndexSet, com_set, consecutive_max, ratio_between, tau_ratios,
                           window_misses_eventually)

periodic_sets = st.builds(
    lambda head, start, period, res: IndexSet(head=head, start=start, period=period,
                                              residues=[r % period for r in res]),
    st.lists(st.integers(1, 5), max_size=3), st.integers(6, 9), st.integers(1, 5),
    st.lists(st.integers(0, 20), min_size=1, max_size=4))


def _brute(S, limit=80):
    return [n for n in range(1, limit) if S.contains(n)]


@given(periodic_sets)
def test_enumeration_consistent(S):
    els = _brute(S)
    for k, n in enumerate(els[:30], 1):
        assert S.nth(k) == n
        assert S.count_below(n) == k - 1


@given(periodic_sets, st.integers(1, 4), st.integers(-2, 3))
def test_subsample_matches_brute(S, step, off):
    T = S.subsample(step, off)
    els = [S.nth(k) for k in range(1, 60)]
    want = [els[step * e + off - 1] for e in range(1, 12) if step * e + off >= 1]
    assert [T.nth(k) for k in range(1, len(want) + 1)] == want


@given(periodic_sets, periodic_sets)
@settings(max_examples=60)
def test_tail_subset_matches_brute(A, B):
    got = A.tail_subset_of(B)
    lo = max(A.start, B.start) + 60
    want = all(B.contains(n) for n in range(lo, lo + 120) if A.contains(n))
    assert got == want


def test_predicate_sets(F1):
    S = IndexSet(pred=lambda n: n % 3 == 1)
    assert [S.nth(k) for k in range(1, 5)] == [1, 4, 7, 10]
    assert S.subsample(2, 0).nth(2) == 10


SMALL = [
    "ratio_gaps(cycle(2, 3), cycle(1, 2), seed=1)",
    "ratio_gaps(interleave(linear(a=1, b=1), const(3)), const(2), seed=1)",
    "ratio_gaps(cycle(3/2, 5), const(1), seed=1)",
]


def test_ratio_between_matches_direct_products():
    for shape in SMALL:
        E = load("set T { shape = %s }" % shape)
        G, B = E.profiles(64)
        for i in range(8, 14):
            for j in range(i, i + 5):
                for top in ("lo", "hi"):
                    for bot in ("lo", "hi"):
                        if i == j and (top, bot) == ("lo", "hi"):
                            continue
                        v = ratio_between(G, B, i, top, j, bot)
                        direct = getattr(E.block(i), top) / getattr(E.block(j), bot)
                        if v is INF:
                            continue
                        assert direct == v


def test_consecutive_max_and_tau_ratios():
    E = load("set T { shape = ratio_gaps(interleave(linear(a=1, b=1), const(3)), const(2), seed=1) }")
    G, B = E.profiles(64)
    S = com_set(E, Fraction(3), G, 64)
    # clusters of two blocks of ratio 2 with an inner gap of ratio 3
    assert consecutive_max(G, B, S) == 12
    vals = tau_ratios(G, B, S, IndexSet.all(), "lo")
    assert sorted(vals) == [2, 12]


def test_window_misses_matches_concrete():
    E = load("set T { shape = ratio_gaps(cycle(2, 5), const(1), seed=1) }")
    G, B = E.profiles(64)
    T = IndexSet.all()
    for k, K in [(Fraction(3, 2), 2), (Fraction(3, 2), 3), (1, 2), (Fraction(11, 10), 5)]:
        got = window_misses_eventually(G, B, T, "lo", k, K)
        conc = True
        for n in range(20, 30):
            tau = E.block(n).lo
            lo, hi = k * tau, K * tau
            if any(lo < E.block(m).hi and E.block(m).lo < hi for m in range(n - 4, n + 1)):
                conc = False
        assert got == conc
