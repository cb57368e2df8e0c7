from fractions import Fraction

from hypothesis import given, strategies as st

from lgfrob.series import MatSeries, Truncation, inverse_series

coef = st.fractions(min_value=-3, max_value=3, max_denominator=4)
exp2 = st.tuples(st.integers(0, 2), st.integers(0, 2))


def series(draw_dict):
    return MatSeries.from_entries(2, [[draw_dict[0], draw_dict[1]], [draw_dict[2], draw_dict[3]]])


entries = st.lists(st.dictionaries(exp2, coef, max_size=3), min_size=4, max_size=4).map(series)


@given(entries, entries)
def test_product_rule(a, b):
    for i in range(2):
        assert (a @ b).derivative(i) == a.derivative(i) @ b + a @ b.derivative(i)


@given(entries)
def test_inverse_series(a):
    unit = MatSeries.identity(2, 2)
    m = unit + a.part(lambda e: sum(e) > 0)
    t = Truncation((True, True), 5)
    inv = inverse_series(m, t)
    assert (m.matmul(inv, t) - unit).is_zero()


@given(entries, st.fractions(min_value=-2, max_value=2, max_denominator=3))
def test_translate_then_evaluate(a, s):
    shifted = a.translate([s, 0])
    for x in (Fraction(0), Fraction(1, 2)):
        assert all(u == v for u, v in zip(shifted.evaluate([x, 1]).flat, a.evaluate([x + s, 1]).flat))
