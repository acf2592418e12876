from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings

from conftest import x_power
from porolab.csp import (CspStatus, PreconditionError, TestSequence, C_E, C_of_tau,
                         canonical_family, check_asymp_gap, csp_certify, descr_sandwich,
                         dyadic_witness, gap_from_h, h_set_witness, kK_condition,
                         matching_sequence, shell_of, slot_assignment, tau_strongly_porous,
                         uniform_strong_porosity, verify_certificate)
from porolab.exact import is_inf
from porolab.gaps import GapSequence
from porolab.germ import Block, FiniteSet, load
from porolab.germ.sets import ElaborationError
from porolab.exact import Rational
from porolab.suites import three_verdicts
from porolab.verdict import Status
from strategies import shapes, spec_text

D = 64
CT, CF = Status.CERTIFIED_TRUE, Status.CERTIFIED_FALSE


def lo_stream(E, offset=1, step=1):
    return TestSequence.block_endpoints(E, "lo", step=step, offset=offset)


# -- test sequences ------------------------------------------------------------------

def test_dyadic_witness_examples(F1, GEO, F2):
    d = dyadic_witness(F1)
    assert [d.tau(n) for n in range(1, 9)] == [x_power(n) for n in range(1, 9)]
    d = dyadic_witness(GEO)
    assert [d.tau(n) for n in range(1, 9)] == [Fraction(1, 2 ** n) for n in range(1, 9)]
    d = dyadic_witness(F2)
    for n in range(1, 9):
        y, j = d.point(n)
        # the representative is the largest point of E in its shell
        assert F2.block(j).contains(y)
        k = shell_of(y)
        assert y == min(F2.block(j).hi, Rational.power(2, -k + 1)) or y == F2.block(j).hi


def test_dyadic_witness_one_point_per_shell(corpus):
    for E in corpus:
        if isinstance(E, FiniteSet):
            continue
        d = dyadic_witness(E)
        shells = [shell_of(d.tau(n)) for n in range(1, 12)]
        assert shells == sorted(set(shells))
        for n in range(1, 12):
            y, j = d.point(n)
            assert E.block(j).contains(y)


def test_user_sequence_membership(F1):
    t = TestSequence.user(F1, [x_power(3), x_power(4)])
    assert t.length(D) == 2 and t.point(2)[1] == 4
    fake = TestSequence.user(F1, [x_power(3)])
    fake._point = lambda n: (x_power(3) * 3 / 4, 3)
    with pytest.raises(PreconditionError):
        tau_strongly_porous(F1, fake, D)


# -- equivalence -----------------------------------------------------------------

def test_check_asymp_gap_examples(F1, F3):
    ev = check_asymp_gap(lo_stream(F1), GapSequence.all_gaps(F1), D)
    assert ev.verdict.status is CT and ev.c1 == ev.c2 == 1
    # gap n of F3 is (x_(2n+2), x_(2n+1)); tau_n is the band bottom x_(2n+3)
    A = GapSequence.all_gaps(F3)
    ev = check_asymp_gap(lo_stream(F3), A, 16)
    assert ev.verdict.status is CF and is_inf(ev.c2)
    for n in range(1, 5):
        assert A.entry(n)[0] == x_power(2 * n + 2)
        assert A.entry(n)[0] / lo_stream(F3).tau(n) == x_power(2 * n + 2) / x_power(2 * n + 3)


def test_check_asymp_gap_identity(corpus):
    # tau = left endpoints of the gaps themselves
    for E in corpus[:10]:
        if isinstance(E, FiniteSet):
            continue
        tau = TestSequence.block_endpoints(E, "hi", offset=1)
        ev = check_asymp_gap(tau, GapSequence.all_gaps(E), 32)
        assert ev.verdict.truthy and ev.c1 == ev.c2 == 1


# -- tau-strong porosity --------------------------------------------------------------

def test_tau_strongly_porous_examples(F1, F3, GEO):
    m = tau_strongly_porous(F1, dyadic_witness(F1), D)
    assert m.verdict.status is CT and m.C == 1
    m = tau_strongly_porous(F3, lo_stream(F3), D)
    assert m.verdict.status is CF
    for tau in (lo_stream(GEO), dyadic_witness(GEO)):
        assert tau_strongly_porous(GEO, tau, D).verdict.status is CF


def test_finite_set_has_no_test_sequences():
    fin = FiniteSet([Block(Rational(1), Rational(2))])
    with pytest.raises(PreconditionError):
        tau_strongly_porous(fin, None, D)


def test_C_of_tau_examples(F1, F2, F3):
    assert C_of_tau(F1, lo_stream(F1), D)[0] == 1
    L, _ = matching_sequence(F2, D)
    tau = TestSequence.gap_right_endpoints(F2, L)
    C, v = C_of_tau(F2, tau, D)
    assert C == 3 and v.status is CT
    C, v = C_of_tau(F3, lo_stream(F3), D)
    assert is_inf(C) and v.certified


def test_constants(F1, F2, F3):
    assert C_E(F1, D)[0] == 1
    assert C_E(F2, D)[0] == 3
    C, v = C_E(F3, D)
    assert is_inf(C) and v.status is CF
    u = uniform_strong_porosity(F1, D)
    assert u.status is CT and u.witness["c"] == 1
    assert uniform_strong_porosity(F3, D).status is CF
    fin = FiniteSet([Block(Rational(1), Rational(2))])
    assert uniform_strong_porosity(fin, D).status is CT


# -- (k, K) windows ------------------------------------------------------------

def test_kK_examples(F1, GEO):
    v = kK_condition(F1, lo_stream(F1), 2, 100, D)
    assert v.status is CT
    N1 = v.witness["N1"]
    for n in range(N1, N1 + 6):
        assert x_power(n) / x_power(n + 1) > 100
    tau = lo_stream(GEO, offset=0)
    assert kK_condition(GEO, tau, Fraction(3, 2), 3, D).status is CF
    for n in range(2, 10):
        y = tau.tau(n)
        assert Fraction(3, 2) * y < 2 * y < 3 * y and GEO.contains(2 * y, 64)


@pytest.mark.parametrize("k,K", [(1, 2), (2, 2), (3, 2), (Fraction(1, 2), 3)])
def test_kK_domain(F1, k, K):
    with pytest.raises(ValueError):
        kK_condition(F1, lo_stream(F1), k, K, D)


def test_kK_agrees_with_tau_porosity(corpus):
    grid = (Fraction(3, 2), Fraction(2), Fraction(4), Fraction(8), Fraction(64))
    for E in corpus:
        if isinstance(E, FiniteSet):
            continue
        ctx = matching_sequence(E, D)
        for tau in canonical_family(E, D, ctx)[1:]:
            m = tau_strongly_porous(E, tau, D, ctx)
            if not m.verdict.certified:
                continue
            kk = []
            for k in grid:
                vs = [kK_condition(E, tau, k, K, D) for K in (2 * k, 10 * k, 100 * k)]
                kk.append(all(v.truthy for v in vs))
            assert m.verdict.truthy == any(kk), (E.name, tau.label)


# -- slots ---------------------------------------------------------------------------

def test_slot_cover(corpus):
    for E in corpus:
        if isinstance(E, FiniteSet):
            continue
        L, U = matching_sequence(E, D)
        if L is None:
            continue
        slots = [(L.entry(k + 1)[1], L.entry(k)[0]) for k in range(1, 24)]
        for (lo1, hi1), (lo2, hi2) in zip(slots, slots[1:]):
            assert hi2 < lo1
        top = L.entry(1)[1]
        for n in range(1, 30):
            for y in (E.block(n).lo, E.block(n).hi):
                if y < slots[-1][0]:
                    continue
                hits = [s for s in slots if s[0] <= y <= s[1]]
                assert len(hits) == 1 or y >= top
        tau = lo_stream(E)
        sa = slot_assignment(L, tau, 24)
        for n, s in enumerate(sa.slots, 1):
            if s is not None:
                assert s[0] <= tau.tau(n) <= s[1]


def test_matched_sequences_are_almost_decreasing_and_unique(corpus):
    for E in corpus:
        if isinstance(E, FiniteSet):
            continue
        ctx = matching_sequence(E, D)
        for tau in canonical_family(E, D, ctx)[1:3]:
            m = tau_strongly_porous(E, tau, D, ctx)
            if not m.verdict.truthy:
                continue
            idx = [m.gaps.idx(n) for n in range(1, 30) if m.slots.k[n - 1] > 0]
            assert all(a <= b for a, b in zip(idx, idx[1:]))
            # any other sequence satisfying both lemma conditions agrees eventually
            ev = check_asymp_gap(tau, ctx[0], 32)
            if ev.verdict.truthy:
                for n in range(ev.from_index + 8, 30):
                    assert ctx[0].entry(n) == m.gaps.entry(n)


# -- certificates --------------------------------------------------------------

def test_csp_certify_examples(F1, F2, F3, F5, GEO):
    c = csp_certify(F2, D)
    assert c.status is CspStatus.CERTIFIED and c.q >= 3
    for cl in c.clusters[:10]:
        assert cl.first == cl.last  # one block per cluster
        assert cl.center == F2.block(cl.first).hi
    for x, y in zip(c.centers[2:], c.centers[3:]):
        assert y / x < Fraction(1, 16)
    assert csp_certify(F1, D).status is CspStatus.CERTIFIED
    assert csp_certify(F3, D).status is CspStatus.REFUTED
    assert csp_certify(F5, D).refutation["mechanism"] == "no universal gap sequence"
    assert csp_certify(GEO, D).refutation["p_plus"] == Fraction(1, 2)
    fin = FiniteSet([Block(Rational(1), Rational(2))])
    assert csp_certify(fin, D).status is CspStatus.TRIVIAL


def test_certificates_recheck_and_sandwich(corpus):
    for E in corpus:
        c = csp_certify(E, D)
        r = verify_certificate(E, c, D)
        assert r.ok, (E.name, r.violations[:3])
        if c.status is CspStatus.CERTIFIED:
            assert r.checked_blocks == D and c.q > 1
            assert descr_sandwich(E, c, D)


def test_recheck_catches_broken_certificate(F2):
    import dataclasses
    c = csp_certify(F2, D)
    bad = dataclasses.replace(c, q=Fraction(2))
    assert not verify_certificate(F2, bad, D).ok


def test_three_verdicts_agree(corpus):
    for E in corpus:
        v = three_verdicts(E, D)
        if v is not None:
            assert len(set(v)) == 1, (E.name, v)


# -- h witnesses -----------------------------------------------------------------

def test_h_witness_F1(F1):
    h = h_set_witness(F1, lo_stream(F1), 16)
    assert h.equiv.c1 == h.equiv.c2 == 1 and h.equiv.verdict.status is CT
    for n, (hn, r) in enumerate(zip(h.h, h.lambda_values), 1):
        assert hn == x_power(n + 1)
        assert r == 1 - x_power(n + 2) / x_power(n + 1)
    seq, ev = gap_from_h(F1, h.tau, h, 16)
    for n in range(1, 8):
        assert seq.entry(n) == (x_power(n + 2), x_power(n + 1))
    assert ev.c1 == ev.c2 == 1


def test_h_witness_F2(F2):
    h = h_set_witness(F2, dyadic_witness(F2), 16)
    assert Fraction(1, 3) <= h.equiv.c1 and h.equiv.c2 <= 3
    h = h_set_witness(F2, lo_stream(F2), 16)
    seq, ev = gap_from_h(F2, h.tau, h, 16)
    for k in range(1, 6):
        a, b = seq.entry(k)
        assert b == h.h[k - 1] and a == F2.block(seq.idx(k) + 1).hi


def test_h_witness_gates(F3, F1):
    with pytest.raises(PreconditionError):
        h_set_witness(F3, lo_stream(F3), 16)
    h = h_set_witness(F1, lo_stream(F1), 16)
    import dataclasses
    from porolab.verdict import empirical
    bad = dataclasses.replace(h, lambda_ratio=empirical(False, 16))
    with pytest.raises(PreconditionError):
        gap_from_h(F1, h.tau, bad, 16)


# -- random sets ---------------------------------------------------------------

def _load(shape):
    try:
        return load(spec_text(shape))
    except (ValueError, ElaborationError):
        return None


@given(shapes)
@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_random_sets_certificates_are_sound(shape):
    E = _load(shape)
    if E is None:
        return
    c = csp_certify(E, 48)
    if c.status is not CspStatus.EMPIRICAL:
        assert verify_certificate(E, c, 48).ok
    v = three_verdicts(E, 48)
    if v is not None:
        assert len(set(v)) == 1
