from fractions import Fraction

import pytest

from lgfrob.laurent import parse_laurent
from lgfrob.structure import (NotSubdiagram, change_of_lattice_iso, check_GC, check_GC_global, check_IC,
                              classify_deformation, frame_identity_defects, is_good, period_map, perturb_binf,
                              primitive_map, pullback_linear, restriction_check, structure_from_json,
                              structure_to_json, translate_structure, verify_structure_relations)

from conftest import good_max_structure, structure_for


def test_p1_worked_example():
    S = good_max_structure("u1+u1^-1", 1)
    assert S.B0.entries() == [[{(1,): 1}, {(0,): 2}], [{(0,): 2}, {(1,): 1}]]
    assert S.C[0].entries() == [[{(0,): -1}, {}], [{}, {(0,): -1}]]
    assert S.alphas == [0, 1]
    assert [list(r) for r in S.g] == [[0, 1], [1, 0]]


def test_relations_good_max(example):
    S = good_max_structure(example.text, example.n)
    rep = verify_structure_relations(S)
    assert rep.ok, str(rep)
    assert frame_identity_defects(S) == []
    assert is_good(S)


def test_relations_other_deformations(example):
    for gs in example.other_deformations:
        S = structure_for(example.text, example.n, gs)
        assert verify_structure_relations(S).ok
        assert not verify_structure_relations(perturb_binf(S)).ok


def test_negative_control_names_failure():
    S = good_max_structure("u1+u2+u1^-1*u2^-1", 2)
    rep = verify_structure_relations(perturb_binf(S))
    assert not rep.ok
    assert rep.first_failure()


def test_not_subdiagram_rejected():
    f = parse_laurent("u1+u1^-1", 1)
    with pytest.raises(NotSubdiagram):
        classify_deformation(f, [parse_laurent("u1", 1)])


def test_period_map_and_primitive_map():
    S = good_max_structure("u1^2+u1^-2", 1)
    assert period_map(S, [0, 0, 0]) == [[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 0]]
    assert check_IC(S, [0, 0, 0]) and check_GC(S, [0, 0, 0])
    assert str(primitive_map(S)) == "(-x1, -x2, -x3, 0)"
    S2 = structure_for("u1^2+u1^-2", 1, ("1", "u1+u1^-1", "u1-u1^-1"))
    assert not is_good(S2)


def test_generation_fails_for_symmetric_square():
    S = good_max_structure("u1+u2+u1^-1+u2^-1", 2)
    assert not check_GC(S, [0])
    assert not check_GC_global(S)


def test_restriction_matches_point_structure(example):
    S = good_max_structure(example.text, example.n)
    a = [Fraction(k + 1, 3 + k) for k in range(S.r)]
    rc = restriction_check(S, a)
    assert rc.ok, rc.notes


def test_translation_is_exact():
    S = good_max_structure("u1+u2+u1^-1*u2^-1", 2)
    a = [Fraction(2, 5)]
    T = translate_structure(S, a)
    assert all(x == y for x, y in zip(T.B0.evaluate([0]).flat, S.B0.evaluate(a).flat))
    assert verify_structure_relations(T).ok


def test_change_of_lattice():
    f = parse_laurent("u1^2+u1^-2", 1)
    g1 = ("1", "u1", "u1^-1")
    g2 = ("1", "u1+u1^-1", "u1-u1^-1")
    D1 = classify_deformation(f, [parse_laurent(g, 1) for g in g1], check_good=False)
    D2 = classify_deformation(f, [parse_laurent(g, 1) for g in g2], check_good=False)
    L = change_of_lattice_iso(D1, D2)
    assert L == [[1, 0, 0], [0, 1, 1], [0, 1, -1]]
    B0, C = pullback_linear(good_max_structure("u1^2+u1^-2", 1), L)
    S2 = structure_for("u1^2+u1^-2", 1, g2)
    assert B0 == S2.B0
    assert all(a == b for a, b in zip(C, S2.C))


def test_json_roundtrip():
    S = good_max_structure("u1^2+u1^-2", 1)
    doc = structure_from_json(structure_to_json(S))
    assert doc.B0 == S.B0 and all(a == b for a, b in zip(doc.C, S.C))
    assert all(x == y for x, y in zip(doc.binf().flat, S.Binf.flat))
    assert structure_to_json(S) == structure_to_json(S)
