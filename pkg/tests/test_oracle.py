from fractions import Fraction

import pytest

from lgfrob.jacobi import spectrum
from lgfrob.laurent import parse_laurent
from lgfrob.oracle import graded_dim_bruteforce, jacobi_dim_bruteforce, kontsevich_Nd, spectrum_bruteforce


@pytest.mark.parametrize("text,n,mu", [("u1+u1^-1", 1, 2), ("u1+u2+u1^-1*u2^-1", 2, 3), ("u1^2+u1^-2", 1, 4)])
def test_jacobi_dim(text, n, mu):
    res = jacobi_dim_bruteforce(parse_laurent(text, n))
    assert res.value == mu and res.method == "box-rank"


def test_graded_dims_p1():
    f = parse_laurent("u1+u1^-1", 1)
    assert graded_dim_bruteforce(f, 0).value == 1
    assert graded_dim_bruteforce(f, 1).value == 1
    assert graded_dim_bruteforce(f, Fraction(1, 2)).value == 0


def test_graded_dims_sum_and_symmetry(example):
    f = example.f()
    sp = spectrum_bruteforce(f, example.mu)
    assert sp == list(spectrum(f).values)
    assert sorted(example.n - a for a in sp) == sp


def test_kontsevich():
    assert [kontsevich_Nd(d) for d in range(1, 6)] == [1, 1, 12, 620, 87304]
    with pytest.raises(ValueError):
        kontsevich_Nd(0)
