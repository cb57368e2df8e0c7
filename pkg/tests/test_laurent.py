from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lgfrob.laurent import LaurentPoly, ParseError, format_poly, parse_laurent, parse_param_poly, specialize

N = 2
exps = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
polys = st.dictionaries(exps, coeffs, max_size=5).map(lambda d: LaurentPoly(N, d))


@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == LaurentPoly(N)


@given(polys)
def test_format_parse_roundtrip(p):
    assert parse_laurent(format_poly(p), N) == p


@given(polys, polys)
def test_log_derivative_is_a_derivation(p, q):
    for i in (1, 2):
        assert (p * q).log_derivative(i) == p.log_derivative(i) * q + p * q.log_derivative(i)


@given(polys, st.integers(0, 3))
def test_power_matches_repeated_product(p, k):
    prod = LaurentPoly.constant(N)
    for _ in range(k):
        prod = prod * p
    assert p ** k == prod


def test_parse_examples():
    f = parse_laurent("u1+u2+u1^-1*u2^-1", 2)
    assert f.terms == {(1, 0): 1, (0, 1): 1, (-1, -1): 1}
    assert parse_laurent("3/2*u1^2 - u1^-1", 1).terms == {(2,): Fraction(3, 2), (-1,): -1}


@pytest.mark.parametrize("text", ["u1+", "u3", "u1^", "u1**2", "2*", "u1^0*2", "(u1"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_laurent(text, 2)


def test_parse_error_has_offset():
    with pytest.raises(ParseError) as info:
        parse_laurent("u1 + * u2", 2)
    assert info.value.offset >= 3


def test_parameters_and_specialization():
    F = parse_laurent("u1+u1^-1+x1*u1", 1, r=1)
    assert specialize(F, [Fraction(1, 2)]) == parse_laurent("3/2*u1+u1^-1", 1)
    p = parse_param_poly("x1^2 - 1/3*x2", 2)
    assert p.terms == {(2, 0): 1, (0, 1): Fraction(-1, 3)}
