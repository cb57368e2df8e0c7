from fractions import Fraction

import pytest

from lgfrob.laurent import parse_laurent
from lgfrob.newton import (NotConvenient, is_convenient, is_nondegenerate, lattice_points_upto, milnor_number,
                           newton_degree, newton_polyhedron, subdiagram_monomials, volume)


@pytest.mark.parametrize("text,n,mu", [
    ("u1+u1^-1", 1, 2), ("u1+u2+u1^-1*u2^-1", 2, 3), ("u1^2+u1^-2", 1, 4),
    ("u1^2+u2^2+u1^-1*u2^-1", 2, 8), ("u1+u2+u3+u1^-1*u2^-1*u3^-1", 3, 4),
])
def test_milnor_number(text, n, mu):
    assert milnor_number(newton_polyhedron(parse_laurent(text, n))) == mu


def test_facets_are_normalized_to_one():
    P = newton_polyhedron(parse_laurent("u1^2+u2^2+u1^-1*u2^-1", 2))
    for fc in P.facets:
        assert all(fc.form(p) == 1 for p in fc.points)
    assert volume(P) == 4
    assert newton_degree(P, (1, 1)) == 1
    assert newton_degree(P, (1, 0)) == Fraction(1, 2)


def test_subdiagram_and_levels():
    P = newton_polyhedron(parse_laurent("u1^2+u2^2+u1^-1*u2^-1", 2))
    assert subdiagram_monomials(P) == [(0, 0), (1, 0), (0, 1)]
    P2 = newton_polyhedron(parse_laurent("u1+u2+u1^-1*u2^-1", 2))
    assert lattice_points_upto(P2, 1) == [(0, 0), (1, 0), (0, 1), (-1, -1)]
    assert lattice_points_upto(P2, 1, strict=True) == [(0, 0)]


def test_convenience():
    assert is_convenient(parse_laurent("u1+u1^-1", 1))
    assert not is_convenient(parse_laurent("u1+u2", 2))
    assert not is_convenient(parse_laurent("u1+u2+u1^-1", 2))
    assert not is_convenient(parse_laurent("u1^2", 1))
    assert not is_convenient(parse_laurent("u1^-3+2*u1^-1", 1))
    with pytest.raises(NotConvenient):
        is_nondegenerate(parse_laurent("u1+u2", 2))


def test_collinear_face_witness():
    rep = is_nondegenerate(parse_laurent("u1^2+2*u1*u2+u2^2+u1^-1*u2^-1", 2))
    assert rep.verdict == "DegenerateWitness"
    assert rep.point == (1, -1)


def test_nondegenerate_corpus(example):
    # edges only in two variables, so the default verdict is already exact
    assert is_nondegenerate(example.f()).verdict == "NondegenerateExact"


def test_three_variables_exact_and_modular():
    bad = parse_laurent("u1^2+u2^2+u3^2+2*u1*u2+2*u1*u3+2*u2*u3+u1^-1*u2^-1*u3^-1", 3)
    assert is_nondegenerate(bad, exact=True).verdict == "DegenerateWitness"
    assert is_nondegenerate(bad, trials=3).verdict == "DegenerateWitness"
    good = parse_laurent("u1+u2+u3+u1^-1*u2^-1*u3^-1", 3)
    assert is_nondegenerate(good, exact=True).verdict == "NondegenerateExact"
    assert is_nondegenerate(good).verdict == "NondegenerateProbabilistic"
    rep = is_nondegenerate(good, exact=False, trials=3, seed=5)
    assert rep.verdict == "NondegenerateProbabilistic" and len(rep.primes) > 0
    assert is_nondegenerate(good, exact=False, trials=0).verdict == "Unknown"
