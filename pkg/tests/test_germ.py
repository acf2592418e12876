from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import x_power
from porolab.exact import Rational
from porolab.germ import (Bands, Block, FiniteSet, Origin, ParseError, Points, Power,
                          SemanticError, Thicken, classify_origin, elaborate, gap_at, load,
                          parse_spec, parse_specs, print_spec)
from porolab.germ.dsl import MAX_DEPTH
from porolab.germ.sets import ElaborationError

INVALID = (ParseError, SemanticError, ElaborationError)
from porolab.germ.laws import Factorial, Geometric, LimitTag
from strategies import shapes, spec_text

SLOW = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def test_parse_grammar_productions():
    s = parse_spec("set F1 { shape = points(power(alpha=2, x0=1/2)) }")
    assert s.name == "F1" and isinstance(s.shape, Points)
    assert s.shape.law == Power(2, Fraction(1, 2))
    s = parse_spec("set F2 { shape = thicken(power(alpha=2, x0=1/2), q=3) }")
    assert isinstance(s.shape, Thicken) and s.shape.q == 3


def test_semantic_error_reports_position():
    with pytest.raises((ParseError, SemanticError)) as e:
        parse_spec("set BAD { shape = points(geometric(r=3/2)) }")
    assert "ratio must lie in (0,1)" in str(e.value)
    assert str(e.value).startswith("1:")


@pytest.mark.parametrize("text", [
    "set X { shape = points(geometric(r=1/2) }",
    "set { shape = points(geometric(r=1/2)) }",
    "set X { shape = circles(geometric(r=1/2)) }",
    "set X { shape = points(geometric(r=1/0)) }",
    f"set X {{ shape = points(geometric(r=1/2)), depth = {MAX_DEPTH + 1} }}",
    "set X { shape = points(geometric(r=1/" + "9" * 500 + ")) }",
])
def test_malformed_inputs_are_diagnosed(text):
    with pytest.raises((ParseError, SemanticError)) as e:
        parse_spec(text)
    line, col = str(e.value).split(":")[:2]
    assert int(line) >= 1 and int(col) >= 1


def test_comments_and_multiple_definitions():
    specs = parse_specs("# two sets\nset A { shape = points(geometric(r=1/2)) }\n"
                        "set B { shape = bands(factorial(scale=1)), origin = out }  # trailing\n")
    assert [s.name for s in specs] == ["A", "B"] and not specs[1].origin_in_set


@given(shapes, st.sampled_from([None, 16, 64]), st.booleans())
@SLOW
def test_print_parse_round_trip(shape, depth, origin):
    text = "set R { shape = %s%s%s }" % (shape, f", depth = {depth}" if depth else "",
                                          "" if origin else ", origin = out")
    try:
        spec = parse_spec(text)
    except INVALID:
        return
    again = parse_spec(print_spec(spec))
    assert again == spec
    assert print_spec(again) == print_spec(spec)


def test_points_power_blocks(F1):
    assert [F1.block(n).lo for n in range(1, 5)] == [Fraction(1, 2), Fraction(1, 4),
                                                   Fraction(1, 16), Fraction(1, 256)]
    assert all(F1.block(n).degenerate for n in range(1, 20))
    assert F1.block(40).lo == x_power(40)


def test_thicken_finds_m0_and_merges(F2):
    # 3 x_2 = 3/4 > x_1 = 1/2, so the first two blocks merge
    assert F2.m0 == 2
    assert F2.block(1) == Block(Rational(Fraction(1, 4)), Rational(Fraction(3, 2)))
    for n in range(2, 30):
        b = F2.block(n)
        assert b.lo == x_power(n + 1) and b.hi == 3 * x_power(n + 1)


def test_bands_blocks(F3):
    for n in range(1, 20):
        assert F3.block(n) == Block(x_power(2 * n + 1), x_power(2 * n))


def test_gap_at_examples(F1, F2, F3):
    assert gap_at(F1, 1) == (Fraction(1, 4), Fraction(1, 2))
    for n in range(3, 20):
        # deep gaps of the thickened set: (3 x_{m+1}, x_m)
        a, b = gap_at(F2, n)
        assert a == 3 * x_power(n + 2) and b == x_power(n + 1)
        # bands: gaps (x_{2m}, x_{2m-1}) with m = n + 1
        assert gap_at(F3, n) == (x_power(2 * n + 2), x_power(2 * n + 1))


def test_classify_origin(F1):
    assert classify_origin(F1) is Origin.ACCUMULATES_AT_ZERO
    fin = FiniteSet([Block(Rational(1), Rational(2))])
    assert classify_origin(fin) is Origin.DOES_NOT_ACCUMULATE
    assert classify_origin(FiniteSet([])) is Origin.DOES_NOT_ACCUMULATE


def test_law_tags():
    assert Geometric(Fraction(1, 2)).limit_tag is LimitTag.RATIO_TO_CONST
    assert Power(2, Fraction(1, 2)).limit_tag is LimitTag.RATIO_TO_ZERO
    assert Factorial(Fraction(1)).limit_tag is LimitTag.RATIO_TO_ZERO


@pytest.mark.parametrize("law", [Power(2, Fraction(1, 2)), Power(3, Fraction(2, 3)),
                                 Factorial(Fraction(1)), Factorial(Fraction(5))])
def test_decreasing_ratio_for_zero_tagged_laws(law):
    rs = [law.x(n + 1) / law.x(n) for n in range(1, 24)]
    assert all(b < a for a, b in zip(rs, rs[1:]))


@given(shapes)
@SLOW
def test_elaborated_sets_satisfy_invariants(shape):
    try:
        E = load(spec_text(shape))
    except INVALID:
        return
    E.check_invariants(24)
    for n in range(1, 24):
        assert E.block(n + 1).hi < E.block(n).lo
        assert 0 < E.block(n).lo <= E.block(n).hi


@given(shapes)
@SLOW
def test_elaboration_is_deterministic(shape):
    try:
        A, B = load(spec_text(shape)), load(spec_text(shape))
    except INVALID:
        return
    assert [A.block(n) for n in range(1, 16)] == [B.block(n) for n in range(1, 16)]


@given(shapes)
@SLOW
def test_verified_profiles_match_values(shape):
    try:
        E = load(spec_text(shape))
    except INVALID:
        return
    G, B = E.profiles(48)
    if G.is_periodic:
        for n in range(G.start, G.start + 3 * G.period):
            e = G.entry(n)
            if not hasattr(e, "name"):
                assert E.gap_ratio(n) == e


def test_finite_set_orders_blocks_and_rejects_overlap():
    fin = FiniteSet([Block(Rational(1), Rational(2)), Block(Rational(3), Rational(4))])
    assert fin.block(1).lo == 3
    with pytest.raises(ValueError):
        FiniteSet([Block(Rational(1), Rational(3)), Block(Rational(2), Rational(4))])


def test_explicit_blocks_elaborate_to_finite():
    E = load("set P { shape = blocks([1/4, 1/2; 1/16, 1/8;]) }")
    assert isinstance(E, FiniteSet) and len(E.blocks()) == 2


def test_contains(F2):
    assert F2.contains(Rational(Fraction(1, 2)), 16)
    assert not F2.contains(Rational(Fraction(2)), 16)
    assert F2.contains(3 * x_power(5), 16)
