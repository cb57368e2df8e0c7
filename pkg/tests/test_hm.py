from fractions import Fraction

import pytest

from lgfrob.hm import (GenerationFailure, check_wdvv, compare_structures, extended_primitive_map,
                       frobenius_manifold_from_deformation, germ_cubic_form, germ_to_json, hm_extend,
                       jacobi_cubic_form, potential_from_json, universal_choice, universal_good_deformation,
                       unit_direction_choice, verify_extension)
from lgfrob.series import MatSeries

from conftest import good_max_structure, structure_for


def test_no_new_variables_returns_input():
    S = good_max_structure("u1+u2+u1^-1*u2^-1", 2)
    H = hm_extend(S, None, 4)
    assert H.ell == 0 and H.B0 == S.B0


def test_unit_direction_column():
    S = good_max_structure("u1+u2+u1^-1*u2^-1", 2)
    H = hm_extend(S, unit_direction_choice(S), 4)
    D = H.C[S.r]
    col = [D.entry(j, 0) for j in range(S.mu)]
    assert col == [{(0, 0): 1}, {}, {}]
    first_cols = [[c.entry(j, 0) for j in range(S.mu)] for c in H.C[:S.r]]
    assert first_cols == [[{k + (0,): v for k, v in c.entry(j, 0).items()} for j in range(S.mu)] for c in S.C]
    assert verify_extension(H).ok


def test_extension_is_deterministic():
    S = good_max_structure("u1^2+u1^-2", 1)
    H1 = universal_good_deformation(S, 3)
    H2 = universal_good_deformation(S, 3)
    assert H1.B0 == H2.B0 and all(a == b for a, b in zip(H1.C, H2.C))


@pytest.mark.parametrize("text,n,chi", [
    ("u1+u1^-1", 1, [{(1, 0): -1}, {(0, 1): 1}]),
    ("u1+u2+u1^-1*u2^-1", 2, [{(1, 0, 0): -1}, {(0, 1, 0): 1}, {(0, 0, 1): 1}]),
])
def test_extended_primitive_map(text, n, chi):
    H = universal_good_deformation(good_max_structure(text, n), 4)
    assert extended_primitive_map(H) == chi


def test_generation_failure_is_reported():
    S = good_max_structure("u1+u2+u1^-1+u2^-1", 2)
    with pytest.raises(GenerationFailure):
        hm_extend(S, universal_choice(S), 3)


def test_p1_potential():
    G = frobenius_manifold_from_deformation(universal_good_deformation(good_max_structure("u1+u1^-1", 1), 6))
    expected = {(2, 1): Fraction(1, 2)}
    for k in range(3, 10):
        expected[(0, k)] = Fraction(1, 1)
        for j in range(2, k + 1):
            expected[(0, k)] /= j
    assert G.potential == expected
    assert [dict(e) for e in G.euler] == [{(1, 0): 1}, {(0, 0): 2}]
    assert check_wdvv(G).ok


def test_germ_matches_jacobi_algebra_cubic_terms():
    S = good_max_structure("u1^2+u1^-2", 1)
    G = frobenius_manifold_from_deformation(universal_good_deformation(S, 3))
    assert germ_cubic_form(G) == jacobi_cubic_form(S)
    assert check_wdvv(G).ok


def test_wdvv_negative_control():
    G = frobenius_manifold_from_deformation(universal_good_deformation(good_max_structure("u1+u2+u1^-1*u2^-1", 2), 4))
    pot = dict(G.potential)
    pot[(0, 0, 5)] += 1
    rep = check_wdvv(G, pot)
    assert not rep.associativity
    assert rep.first_failure_order == 2


def test_compare_with_itself_and_permuted():
    G = frobenius_manifold_from_deformation(universal_good_deformation(good_max_structure("u1+u1^-1", 1), 4))
    cmp = compare_structures(G, G)
    assert cmp.isomorphic and cmp.matrix == [[1, 0], [0, 1]]


def test_compare_detects_different_germs():
    G1 = frobenius_manifold_from_deformation(universal_good_deformation(good_max_structure("u1+u1^-1", 1), 4))
    G2 = frobenius_manifold_from_deformation(universal_good_deformation(good_max_structure("u1+u1^-1", 1), 4))
    G2.potential = {e: c * (2 if sum(e) == 5 else 1) for e, c in G2.potential.items()}
    cmp = compare_structures(G1, G2)
    assert not cmp.isomorphic and cmp.obstruction_order == 5


def test_germ_mode_agrees_with_semi_global():
    S = good_max_structure("u1+u2+u1^-1*u2^-1", 2)
    Hs = universal_good_deformation(S, 3)
    Hg = hm_extend(S, Hs.f_choices, 3, mode="germ")
    assert compare_structures(frobenius_manifold_from_deformation(Hs),
                              frobenius_manifold_from_deformation(Hg)).isomorphic


def test_non_good_lattice_extension():
    S = structure_for("u1^2+u1^-2", 1, ("1", "u1+u1^-1", "u1-u1^-1"))
    H = hm_extend(S, universal_choice(S), 3)
    assert H.ell == 1 and verify_extension(H).ok


def test_germ_json_roundtrip():
    G = frobenius_manifold_from_deformation(universal_good_deformation(good_max_structure("u1+u1^-1", 1), 3))
    text = germ_to_json(G)
    assert potential_from_json(text) == G.potential
    assert text == germ_to_json(G)
