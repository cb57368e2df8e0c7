from fractions import Fraction

import pytest

from lgfrob.jacobi import (build_ideal, monomial_basis, multiplication_matrix, point_birkhoff_defect,
                           residue_pairing, spectrum)
from lgfrob.laurent import deformation, parse_laurent


def P(text, n, r=0):
    return parse_laurent(text, n, r=r)


def test_normal_forms_p1():
    I = build_ideal(P("u1+u1^-1", 1))
    assert I.normal_form(P("u1^2", 1)) == P("1", 1)
    assert I.normal_form(P("u1+u1^-1", 1)) == P("2*u1", 1)


def test_groebner_is_auxiliary_and_agrees():
    assert [str(g) for g in build_ideal(P("u1+u1^-1", 1)).groebner()] == ["u1**2 - 1"]
    assert [str(g) for g in build_ideal(P("u1+u2+u1^-1*u2^-1", 2)).groebner()] == ["u1 - u2", "u2**3 - 1"]


def test_parametric_multiplication_matrix():
    F = P("u1+u1^-1+x1", 1, r=1)
    M = multiplication_matrix(F, build_ideal(F, 1))
    assert M == [[{(1,): 1}, {(0,): 2}], [{(0,): 2}, {(1,): 1}]]


@pytest.mark.parametrize("text,n,basis", [
    ("u1+u2+u1^-1*u2^-1", 2, [(0, 0), (1, 0), (1, 1)]),
    ("u1+u2+u1^-1+u2^-1", 2, [(0, 0), (1, 0), (0, 1), (1, 1)]),
    ("u1^2+u1^-2", 1, [(0,), (1,), (-1,), (2,)]),
])
def test_birkhoff_monomial_bases(text, n, basis):
    B = monomial_basis(P(text, n))
    assert list(B.monomials) == basis
    assert point_birkhoff_defect(B) == []


def test_spectrum_and_pairing(example):
    B = monomial_basis(example.f())
    assert B.mu == example.mu
    al = B.alphas
    assert al[0] == 0 and al[-1] == example.n
    g = residue_pairing(B)
    mu = B.mu
    for i in range(mu):
        for j in range(mu):
            assert g[i][j] == g[j][i]
            if al[i] + al[j] != example.n:
                assert g[i][j] == 0


def test_spectrum_values():
    assert spectrum(P("u1^3+u1^-3", 1)).values == tuple(Fraction(k) for k in (0, "1/3", "1/3", "2/3", "2/3", 1))


def test_good_max_matrix_shape():
    f = P("u1^2+u1^-2", 1)
    F = deformation(f, [P("1", 1), P("u1", 1), P("u1^-1", 1)])
    M = multiplication_matrix(F, build_ideal(F, 3))
    assert len(M) == 4 and all(len(row) == 4 for row in M)
