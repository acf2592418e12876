"""Hypothesis strategies for set definitions."""

from fractions import Fraction

from hypothesis import strategies as st

gap_values = st.sampled_from([Fraction(3, 2), Fraction(2), Fraction(3), Fraction(5)])
block_values = st.sampled_from([Fraction(1), Fraction(1), Fraction(3, 2), Fraction(2)])


def _leaf(values, allow_linear=True):
    opts = [values.map(lambda v: f"const({v})"),
            st.lists(values, min_size=1, max_size=3).map(
                lambda vs: "cycle(" + ", ".join(map(str, vs)) + ")")]
    if allow_linear:
        opts.append(st.tuples(st.integers(1, 2), st.integers(1, 2)).map(
            lambda ab: f"linear(a={ab[0]}, b={ab[1]})"))
    return st.one_of(*opts)


def ratio_maps(values, max_leaves=4):
    return st.recursive(
        _leaf(values),
        lambda inner: st.one_of(
            st.tuples(inner, inner).map(lambda p: f"interleave({p[0]}, {p[1]})"),
            st.tuples(st.lists(values, min_size=1, max_size=2), inner).map(
                lambda p: "prefix([" + ", ".join(map(str, p[0])) + f"], {p[1]})")),
        max_leaves=max_leaves)


laws = st.one_of(
    st.sampled_from(["1/2", "1/3", "2/3", "1/5"]).map(lambda r: f"geometric(r={r})"),
    st.tuples(st.sampled_from([2, 3]), st.sampled_from(["1/2", "1/3", "2/3"])).map(
        lambda p: f"power(alpha={p[0]}, x0={p[1]})"),
    st.sampled_from(["1", "1/2", "3"]).map(lambda s: f"factorial(scale={s})"),
)

ratio_gap_shapes = st.tuples(ratio_maps(gap_values), ratio_maps(block_values, 3),
                             st.sampled_from(["1", "1/2", "3/4"])).map(
    lambda t: f"ratio_gaps({t[0]}, {t[1]}, seed={t[2]})")

law_shapes = st.one_of(
    laws.map(lambda l: f"points({l})"),
    laws.map(lambda l: f"bands({l})"),
    st.tuples(laws, st.sampled_from(["3/2", "2", "3"])).map(lambda p: f"thicken({p[0]}, q={p[1]})"),
)

shapes = st.one_of(ratio_gap_shapes, law_shapes)


def spec_text(shape, name="H"):
    return "set %s { shape = %s }" % (name, shape)
