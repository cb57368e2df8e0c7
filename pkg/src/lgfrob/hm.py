"""Hertling-Manin extension of a Frobenius-type structure and the resulting Frobenius germ.

New variables ``y_1..y_l`` are appended after ``x_1..x_r``.  The Higgs field
``D^k`` in direction ``y_k`` commutes with everything, so it is fixed by its
first column: if ``K`` is the matrix of columns ``W(e_1)`` for a generating
set of words ``W`` in ``B0, C^i``, then ``D^k K = [W(D^k e_1)]``.  Order by
order in ``y``::

    D^k[m] = (R^k - D^k K)[m] K_0^-1
    dB0/dy_k = [B_inf, D^k] - D^k,        dC^i/dy_k = dD^k/dx_i

and the last two are integrated with the Euler operator in ``y``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from .linalg import SingularSystem, inverse, rank
from .laurent import LaurentPoly, format_rational
from .series import MatSeries, Truncation, fmat, inverse_series, poly_add, poly_mul, to_array
from .structure import (FrobTypeStructure, RelationReport, StructureError, check_relations, integrate_closed_form,
                        krylov_words, triangular_shape_holds, word_matrix)


class GenerationFailure(SingularSystem):
    """omega does not generate; the order-by-order system is singular."""


@dataclass
class HMDeformation:
    base: FrobTypeStructure
    ell: int
    f_choices: MatSeries  # mu x 1 column of f_{j1}(x, y)
    B0: MatSeries
    C: list[MatSeries]  # r + ell Higgs fields, x-directions first
    N: int
    mode: str  # "semi-global" | "germ"
    words: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def nvars(self) -> int:
        return self.base.r + self.ell

    @property
    def r(self) -> int:
        return self.base.r

    def names(self) -> list[str]:
        return [f"x{i + 1}" for i in range(self.r)] + [f"y{k + 1}" for k in range(self.ell)]

    def y_trunc(self, order: int | None = None) -> Truncation:
        mask = [False] * self.r + [True] * self.ell
        if self.mode == "germ":
            mask = [True] * self.nvars
        return Truncation(mask, self.N if order is None else order)

    def translate(self, a) -> "HMDeformation":
        """Exact pullback by ``x -> x + a`` (semi-global only)."""
        if self.mode != "semi-global":
            raise ValueError("only semi-global extensions can be translated exactly")
        shift = list(a) + [0] * self.ell
        from .structure import translate_structure

        return HMDeformation(translate_structure(self.base, a), self.ell, self.f_choices.translate(shift),
                             self.B0.translate(shift), [c.translate(shift) for c in self.C], self.N, self.mode,
                             self.words)


def first_column(mu: int, nvars: int, entries: dict[int, dict]) -> MatSeries:
    """mu x 1 series with row j given by ``entries[j]`` (exponent -> rational)."""
    rows = [[dict(entries.get(j, {}))] for j in range(mu)]
    return MatSeries.from_entries(nvars, rows)


def unit_direction_choice(S: FrobTypeStructure) -> MatSeries:
    """One extra variable with ``f_11 = y`` and all other ``f_j1 = 0``."""
    nv = S.r + 1
    y = tuple([0] * S.r + [1])
    return first_column(S.mu, nv, {0: {y: Fraction(1)}})


def complement_directions(S: FrobTypeStructure, a=None) -> list[int]:
    """Basis indices completing the period map at ``a`` to an isomorphism."""
    a = a if a is not None else [0] * S.r
    cols = [[-v for v in c.evaluate(a)[:, 0]] for c in S.C]
    chosen = []
    for j in range(S.mu):
        e = [Fraction(int(i == j)) for i in range(S.mu)]
        if rank(cols + [e]) > len(cols):
            cols.append(e)
            chosen.append(j)
    return chosen


def universal_choice(S: FrobTypeStructure, a=None) -> MatSeries:
    """``f_{j1} = y_k`` on the complement directions, zero elsewhere."""
    comp = complement_directions(S, a)
    ell = len(comp)
    nv = S.r + ell
    entries = {}
    for k, j in enumerate(comp):
        entries[j] = {tuple([0] * S.r + [int(i == k) for i in range(ell)]): Fraction(1)}
    return first_column(S.mu, nv, entries)


def _polynomial_inverse(K0: MatSeries, mu: int) -> MatSeries:
    """Inverse over Q[x] of a polynomial matrix with constant nonzero determinant."""
    nv = K0.nvars
    if nv == 0:
        return MatSeries.constant(0, to_array(inverse([list(r) for r in K0.constant_term()])))
    try:
        K0.constant_term()
        inverse([list(r) for r in K0.constant_term()])
    except SingularSystem as exc:
        raise GenerationFailure("omega does not generate at the origin") from exc
    deg = max(K0.max_degree(), 1) * mu + 1
    inv = inverse_series(K0, Truncation((True,) * nv, deg))
    if not (K0.matmul(inv) - MatSeries.identity(nv, mu)).is_zero():
        raise GenerationFailure("word matrix is not invertible over Q[x]: (GC) fails globally")
    return inv


def hm_extend(S: FrobTypeStructure, f_choices: MatSeries | None, N: int = 6, mode: str = "semi-global",
              verify: bool = True) -> HMDeformation:
    """Extend ``S`` in new variables with prescribed first columns ``d f_{.1}/dy_k``.

    ``f_choices`` is a ``mu x 1`` series in ``x_1..x_r, y_1..y_l`` vanishing
    at ``y = 0``.  In semi-global mode everything stays polynomial in ``x``
    and is truncated at ``y``-order ``N``; germ mode truncates in all
    variables (at a larger internal order, cut back to ``N`` at the end).
    """
    mu, r = S.mu, S.r
    if f_choices is None or f_choices.nvars == r:
        H = HMDeformation(S, 0, MatSeries.zero(r, (mu, 1)), S.B0, list(S.C), N, mode)
        return H
    V = f_choices.nvars
    ell = V - r
    if not f_choices.restrict_vars(r).is_zero():
        raise ValueError("prescribed first columns must vanish at y = 0")
    if mode == "semi-global":
        work_trunc = Truncation([False] * r + [True] * ell, N)
    elif mode == "germ":
        work_trunc = Truncation([True] * V, 2 * N + 1)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    ymask = [False] * r + [True] * ell

    def ydeg(e):
        return sum(e[r:])

    try:
        words = krylov_words(S)
    except SingularSystem as exc:
        raise GenerationFailure("omega does not generate at the origin") from exc
    K0x = word_matrix(S, words)
    if mode == "semi-global":
        K0inv = _polynomial_inverse(K0x, mu).extend_vars(ell)
    else:
        try:
            K0inv = inverse_series(K0x, Truncation([True] * r, 2 * N + 1)).extend_vars(ell)
        except SingularSystem as exc:
            raise GenerationFailure("omega does not generate at the origin") from exc
    B = S.B0.extend_vars(ell).truncate(work_trunc)
    Cs = [c.extend_vars(ell).truncate(work_trunc) for c in S.C]
    Ds = [MatSeries.zero(V, (mu, mu)) for _ in range(ell)]
    dcols = [f_choices.derivative(r + k).truncate(work_trunc) for k in range(ell)]
    binf = S.Binf
    for m in range(N + 1):
        if m >= 1:
            for k in range(ell):
                prev = Ds[k].part(lambda e: ydeg(e) == m - 1)
                E = prev.left_const(binf) - prev.right_const(binf) - prev
                B = B + E.multiply_variable(r + k).scale(Fraction(1, m))
                for i in range(r):
                    Cs[i] = Cs[i] + prev.derivative(i).multiply_variable(r + k).scale(Fraction(1, m))
            B = B.truncate(work_trunc)
            Cs = [c.truncate(work_trunc) for c in Cs]
        step = Truncation(ymask, m) if mode == "semi-global" else work_trunc
        K = word_matrix(S, words, B, Cs, trunc=step)
        for k in range(ell):
            Rk = _apply_words(words, B, Cs, dcols[k], step)
            rhs = (Rk - Ds[k].matmul(K, step)).part(lambda e: ydeg(e) == m)
            new = rhs.matmul(K0inv, work_trunc).part(lambda e: ydeg(e) == m)
            Ds[k] = Ds[k] + new
    final = Truncation([True] * V, N) if mode == "germ" else work_trunc
    H = HMDeformation(S, ell, f_choices.truncate(final), B.truncate(final), [c.truncate(final) for c in Cs + Ds],
                      N, mode, words)
    if verify:
        rep = verify_extension(H)
        if not rep.ok:
            raise StructureError("extended relation failed: " + rep.first_failure())
    return H


def _apply_words(words, B: MatSeries, Cs: Sequence[MatSeries], v: MatSeries, trunc) -> MatSeries:
    mats = [B] + list(Cs)
    mu = B.shape[0]
    out = {}
    for j, w in enumerate(words):
        u = v
        for letter in reversed(w):
            u = mats[letter].matmul(u, trunc)
        for e, a in u.terms.items():
            if e not in out:
                out[e] = fmat(mu, len(words))
            out[e][:, j] = a[:, 0]
    return MatSeries(B.nvars, (mu, len(words)), out)


def verify_extension(H: HMDeformation) -> RelationReport:
    """All structure relations in (x, y), plus the pinned first columns and ``y = 0`` restriction."""
    S = H.base
    if H.ell == 0:
        return check_relations(S.B0, S.C, S.Binf, S.g, S.n)
    t = H.y_trunc()
    dt = H.y_trunc(H.N - 1)
    rep = check_relations(H.B0, H.C, S.Binf, S.g, S.n, H.names(), t, dt)
    from .structure import RelationResult

    ok = True
    for k in range(H.ell):
        col = H.C[H.r + k].matmul(MatSeries.constant(H.nvars, to_array([[int(i == 0)] for i in range(S.mu)])))
        want = H.f_choices.derivative(H.r + k)
        if not (col - want).truncate(dt).is_zero():
            ok = False
    rep.results.append(RelationResult("D^k e_1 = df_1/dy_k", ok, None if ok else "first column differs"))
    xcut = Truncation([True] * S.r, H.N if H.mode == "germ" else None)
    same = all((a.restrict_vars(H.r) - b).truncate(xcut).is_zero()
               for a, b in zip([H.B0] + H.C[:H.r], [S.B0] + S.C))
    rep.results.append(RelationResult("restriction to y = 0 is the input", same,
                                      None if same else "y = 0 restriction differs"))
    return rep


def extended_primitive_map(H: HMDeformation) -> list[dict]:
    """``Gamma_j`` with ``dGamma_j = sum_v (C_v)_{j1} dz_v``, vanishing at the origin."""
    comps = []
    for j in range(H.base.mu):
        cols = [c.entry(j, 0) for c in H.C]
        comps.append(integrate_closed_form(cols, H.nvars))
    return comps


def universal_good_deformation(S_good: FrobTypeStructure, N: int = 6, mode: str = "semi-global") -> HMDeformation:
    """Extension with ``f_{i1} = 0`` for ``i <= r`` and ``f_{i1} = y_{i-r}`` after."""
    r, mu = S_good.r, S_good.mu
    ell = mu - r
    entries = {r + k: {tuple([0] * r + [int(i == k) for i in range(ell)]): Fraction(1)} for k in range(ell)}
    H = hm_extend(S_good, first_column(mu, r + ell, entries), N, mode)
    if not triangular_shape_holds(extended_primitive_map(H), r, ell):
        raise StructureError("extended primitive map is not of the unitriangular-plus-shift form")
    return H


# Frobenius germ ------------------------------------------------------------

Series = dict  # exponent tuple -> Fraction


@dataclass
class FrobeniusGerm:
    n: int
    mu: int
    names: list[str]
    unit_index: int
    charges: list[Fraction]
    metric: np.ndarray
    structure: list[list[list[Series]]]  # c[a][b][d] lowered, series in t
    potential: Series
    euler: list[Series]
    N: int

    def raised(self) -> list[list[list[Series]]]:
        """``c_ab^c`` from the lowered constants."""
        ginv = to_array(inverse([list(r) for r in self.metric]))
        mu = self.mu
        out = [[[{} for _ in range(mu)] for _ in range(mu)] for _ in range(mu)]
        for a, b, c in itertools.product(range(mu), repeat=3):
            acc: Series = {}
            for d in range(mu):
                if ginv[c, d]:
                    acc = poly_add(acc, self.structure[a][b][d], ginv[c, d])
            out[a][b][c] = acc
        return out


def _scalar_inverse_series_matrix(J: MatSeries, N: int) -> MatSeries:
    return inverse_series(J, Truncation([True] * J.nvars, N))


def _invert_coordinates(t_of_z: list[Series], nv: int, order: int) -> list[Series]:
    """Formal inverse ``z(t)`` of ``t(z)`` with ``t(0) = 0`` and invertible linear part."""
    lin = [[Fraction(t_of_z[a].get(tuple(int(k == v) for k in range(nv)), 0)) for v in range(nv)] for a in range(nv)]
    Linv = inverse(lin)
    higher = [{e: c for e, c in p.items() if sum(e) >= 2} for p in t_of_z]
    trunc = Truncation([True] * nv, order)
    ident = [{tuple(int(k == a) for k in range(nv)): Fraction(1)} for a in range(nv)]
    z = [dict() for _ in range(nv)]
    for v in range(nv):
        for a in range(nv):
            if Linv[v][a]:
                z[v] = poly_add(z[v], ident[a], Linv[v][a])
    for _ in range(order):
        hz = [_compose(p, z, trunc) for p in higher]
        new = []
        for v in range(nv):
            acc: Series = {}
            for a in range(nv):
                if Linv[v][a]:
                    acc = poly_add(acc, poly_add(ident[a], hz[a], -1), Linv[v][a])
            new.append(acc)
        z = new
    return z


def _compose(p: Series, images: list[Series], trunc: Truncation) -> Series:
    out: Series = {}
    cache: dict = {}

    def power(v, k):
        key = (v, k)
        if key not in cache:
            cache[key] = {(0,) * len(trunc.mask): Fraction(1)} if k == 0 else poly_mul(power(v, k - 1), images[v], trunc)
        return cache[key]

    for e, c in p.items():
        term = {(0,) * len(trunc.mask): Fraction(c)}
        for v, k in enumerate(e):
            if k:
                term = poly_mul(term, power(v, k), trunc)
        out = poly_add(out, term)
    return out


def frobenius_manifold_from_deformation(H: HMDeformation, order: int | None = None) -> FrobeniusGerm:
    """Flat coordinates, structure constants, potential and Euler field at the origin.

    Flat coordinates are ``t = -Gamma`` (minus the extended primitive map),
    so that ``d/dt_a`` corresponds to the flat section ``eps_a`` and the unit
    is ``d/dt_0``.
    """
    S = H.base
    mu, nv = S.mu, H.nvars
    if nv != mu:
        raise StructureError(f"base has dimension {nv} but the fibre has rank {mu}: not a universal deformation")
    N = H.N if order is None else order
    tz = Truncation([True] * nv, N)
    gamma = extended_primitive_map(H)
    t_of_z = [{e: -c for e, c in p.items() if sum(e) <= N + 1} for p in gamma]
    J = MatSeries.from_entries(nv, [[{e: -c for e, c in H.C[v].entry(a, 0).items() if sum(e) <= N}
                                     for v in range(nv)] for a in range(mu)])
    try:
        inverse([list(r) for r in J.constant_term()])
    except SingularSystem as exc:
        raise StructureError("extended period map is not invertible at the origin") from exc
    Jinv = _scalar_inverse_series_matrix(J, N)
    Cgerm = [c.truncate(tz) for c in H.C]
    psi = []
    for a in range(mu):
        acc = MatSeries.zero(nv, (mu, mu))
        for v in range(nv):
            coef = Jinv.entry(v, a)
            if coef:
                acc = acc + _scalar_times(coef, Cgerm[v], tz)
        psi.append(acc)
    z_of_t = _invert_coordinates(t_of_z, nv, N + 1)
    g = S.g
    lowered = [[[{} for _ in range(mu)] for _ in range(mu)] for _ in range(mu)]
    for a in range(mu):
        gp = psi[a].left_const(g)
        ent = gp.entries()
        for b in range(mu):
            for d in range(mu):
                ser = ent[d][b]
                if ser:
                    lowered[a][b][d] = {e: -c for e, c in _compose(ser, z_of_t, tz).items()}
    potential = _integrate_potential(lowered, mu, N)
    b0e1 = [{e: c for e, c in H.B0.entry(j, 0).items() if sum(e) <= N + 1} for j in range(mu)]
    euler = [_compose(p, z_of_t, Truncation([True] * nv, N + 1)) for p in b0e1]
    names = [f"t{a}" for a in range(mu)]
    return FrobeniusGerm(S.n, mu, names, 0, list(S.alphas), g.copy(), lowered, potential, euler, N)


def _scalar_times(coef: Series, m: MatSeries, trunc: Truncation) -> MatSeries:
    out = {}
    for e1, c in coef.items():
        for e2, a in m.terms.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            if not trunc.keeps(e):
                continue
            out[e] = out[e] + a * c if e in out else a * c
    return MatSeries(m.nvars, m.shape, out)


def _integrate_potential(c: list[list[list[Series]]], mu: int, N: int) -> Series:
    """Homogeneous parts of degree k >= 3 via ``sum t_a t_b t_d c_abd = k(k-1)(k-2) Phi_k``."""
    out: Series = {}
    for a, b, d in itertools.product(range(mu), repeat=3):
        for e, v in c[a][b][d].items():
            e2 = list(e)
            e2[a] += 1
            e2[b] += 1
            e2[d] += 1
            k = sum(e2)
            key = tuple(e2)
            out[key] = out.get(key, 0) + Fraction(v, k * (k - 1) * (k - 2))
    return {e: v for e, v in out.items() if v and sum(e) <= N + 3}


def potential_third_derivatives(G: FrobeniusGerm, potential: Series | None = None) -> list[list[list[Series]]]:
    phi = G.potential if potential is None else potential
    mu = G.mu
    out = [[[{} for _ in range(mu)] for _ in range(mu)] for _ in range(mu)]
    for a, b, d in itertools.product(range(mu), repeat=3):
        p = phi
        for v in (a, b, d):
            p = _derive(p, v)
        out[a][b][d] = {e: c for e, c in p.items() if sum(e) <= G.N}
    return out


def _derive(p: Series, v: int) -> Series:
    out = {}
    for e, c in p.items():
        if e[v]:
            out[e[:v] + (e[v] - 1,) + e[v + 1:]] = c * e[v]
    return out


@dataclass
class WDVVReport:
    associativity: bool
    symmetry: bool
    unit: bool
    homogeneity: bool
    potential_matches: bool
    first_failure_order: int | None = None

    @property
    def ok(self) -> bool:
        return self.associativity and self.symmetry and self.unit and self.homogeneity and self.potential_matches


def check_wdvv(G: FrobeniusGerm, potential: Series | None = None) -> WDVVReport:
    """WDVV, symmetry, unit and homogeneity for the potential, through order ``N``."""
    mu, N = G.mu, G.N
    trunc = Truncation([True] * mu, N)
    c3 = potential_third_derivatives(G, potential)
    sym = all(c3[a][b][d] == c3[p[0]][p[1]][p[2]]
              for a, b, d in itertools.product(range(mu), repeat=3)
              for p in itertools.permutations((a, b, d)))
    ginv = to_array(inverse([list(r) for r in G.metric]))
    up = [[[{} for _ in range(mu)] for _ in range(mu)] for _ in range(mu)]
    for a, b, c in itertools.product(range(mu), repeat=3):
        acc: Series = {}
        for d in range(mu):
            if ginv[c, d]:
                acc = poly_add(acc, c3[a][b][d], ginv[c, d])
        up[a][b][c] = acc
    assoc = True
    worst = None
    for a, b, c, f in itertools.product(range(mu), repeat=4):
        lhs: Series = {}
        rhs: Series = {}
        for e in range(mu):
            lhs = poly_add(lhs, poly_mul(up[a][b][e], up[e][c][f], trunc))
            rhs = poly_add(rhs, poly_mul(up[b][c][e], up[a][e][f], trunc))
        diff = poly_add(lhs, rhs, -1)
        if diff:
            assoc = False
            o = min(sum(e) for e in diff)
            worst = o if worst is None else min(worst, o)
    unit = True
    u = G.unit_index
    for b, c in itertools.product(range(mu), repeat=2):
        want = {(0,) * mu: Fraction(1)} if b == c else {}
        if up[u][b][c] != want:
            unit = False
    hom = _homogeneity_ok(G, potential)
    matches = potential is not None or all(
        {e: v for e, v in G.structure[a][b][d].items() if sum(e) <= N} == c3[a][b][d]
        for a, b, d in itertools.product(range(mu), repeat=3))
    return WDVVReport(assoc, sym, unit, hom, matches, worst)


def _homogeneity_ok(G: FrobeniusGerm, potential: Series | None = None) -> bool:
    """``E(Phi) - (3 - n) Phi`` has no terms of degree 3..N+2."""
    phi = G.potential if potential is None else potential
    out: Series = {}
    for a in range(G.mu):
        out = poly_add(out, poly_mul(G.euler[a], _derive(phi, a)))
    out = poly_add(out, phi, -(3 - G.n))
    return all(sum(e) <= 2 or sum(e) > G.N + 2 for e in out)


def euler_is_affine(G: FrobeniusGerm) -> bool:
    return all(sum(e) <= 1 for p in G.euler for e in p)


# comparison --------------------------------------------------------------

@dataclass
class GermComparison:
    isomorphic: bool
    matrix: list[list[Fraction]] | None
    obstruction_order: int | None
    message: str = ""


def _linear_substitute(p: Series, A: Sequence[Sequence[Fraction]], trunc: Truncation) -> Series:
    mu = len(A)
    images = [{tuple(int(k == b) for k in range(mu)): Fraction(A[a][b]) for b in range(mu) if A[a][b]} for a in range(mu)]
    return _compose(p, images, trunc)


def _cut(p: Series, lo: int, hi: int) -> Series:
    return {e: c for e, c in p.items() if lo <= sum(e) <= hi}


def _first_mismatch(p: Series, q: Series, hi: int) -> int | None:
    d = poly_add(_cut(p, 3, hi), _cut(q, 3, hi), -1)
    return min((sum(e) for e in d), default=None)


def compare_structures(G1: FrobeniusGerm, G2: FrobeniusGerm) -> GermComparison:
    """Linear change of flat coordinates ``t2 = A t1`` carrying ``G2`` to ``G1``.

    ``A`` fixes the unit, preserves the charge grading and pulls the metric
    back to the metric; potentials must agree (modulo quadratic terms)
    through degree ``N + 3``.
    """
    if G1.mu != G2.mu or sorted(G1.charges) != sorted(G2.charges):
        return GermComparison(False, None, 0, "spectra differ")
    mu = G1.mu
    hi = min(G1.N, G2.N) + 3
    trunc = Truncation([True] * mu, hi)
    ident = [[Fraction(int(i == j)) for j in range(mu)] for i in range(mu)]
    candidates = [ident]
    if not _maps_ok(G1, G2, ident, trunc, hi):
        candidates = _solve_linear_iso(G1, G2)
    for A in candidates:
        if _maps_ok(G1, G2, A, trunc, hi):
            return GermComparison(True, A, None, "")
    order = _first_mismatch(G1.potential, _linear_substitute(G2.potential, ident, trunc), hi)
    return GermComparison(False, None, order, "no grading-preserving isometry matches the potentials")


def _maps_ok(G1, G2, A, trunc, hi) -> bool:
    mu = G1.mu
    Aa = to_array(A)
    if not all(x == y for x, y in zip(Aa.T.dot(G2.metric).dot(Aa).flat, G1.metric.flat)):
        return False
    pulled = _linear_substitute(G2.potential, A, trunc)
    return _first_mismatch(G1.potential, pulled, hi) is None


def _solve_linear_iso(G1: FrobeniusGerm, G2: FrobeniusGerm) -> list[list[list[Fraction]]]:
    mu = G1.mu
    syms = {}
    A = sympy.zeros(mu, mu)
    for a in range(mu):
        for b in range(mu):
            if b == G1.unit_index:
                A[a, b] = 1 if a == G2.unit_index else 0
            elif G1.charges[b] == G2.charges[a]:
                s = sympy.Symbol(f"a_{a}_{b}")
                syms[s] = (a, b)
                A[a, b] = s
    if not syms:
        return []
    t = sympy.symbols(f"t0:{mu}")
    tv = sympy.Matrix(t)
    g1 = sympy.Matrix(mu, mu, lambda i, j: sympy.Rational(G1.metric[i, j].numerator, G1.metric[i, j].denominator))
    g2 = sympy.Matrix(mu, mu, lambda i, j: sympy.Rational(G2.metric[i, j].numerator, G2.metric[i, j].denominator))
    eqs = list(A.T * g2 * A - g1)

    def cubic(G, subs):
        expr = 0
        for e, c in G.potential.items():
            if sum(e) == 3:
                term = sympy.Rational(c.numerator, c.denominator)
                for v, k in enumerate(e):
                    term *= subs[v] ** k
                expr += term
        return sympy.expand(expr)

    lhs = cubic(G1, list(t))
    rhs = cubic(G2, list(A * tv))
    poly = sympy.Poly(lhs - rhs, *t)
    eqs += list(poly.coeffs())
    eqs = [sympy.expand(e) for e in eqs if sympy.expand(e) != 0]
    sols = sympy.solve(eqs, list(syms), dict=True)
    out = []
    for sol in sols:
        M = A.subs(sol)
        free = M.free_symbols
        if free:
            M = M.subs({s: 0 for s in free})
        try:
            out.append([[Fraction(int(sympy.fraction(M[i, j])[0]), int(sympy.fraction(M[i, j])[1]))
                         for j in range(mu)] for i in range(mu)])
        except TypeError:
            continue
    return out


# JSON --------------------------------------------------------------------

def germ_to_json(G: FrobeniusGerm) -> str:
    doc = {
        "n": G.n,
        "names": G.names,
        "unit": G.names[G.unit_index],
        "charges": [format_rational(c) for c in G.charges],
        "metric": [[format_rational(v) for v in row] for row in G.metric],
        "order": G.N,
        "euler_convention": "E = sum_a euler[a] d/dt_a, E(Phi) = (3 - n) Phi up to quadratic terms; charges are B_inf eigenvalues",
        "potential": [[list(e), format_rational(c)] for e, c in sorted(G.potential.items(), key=lambda t: (sum(t[0]), t[0]))],
        "euler": [[[list(e), format_rational(c)] for e, c in sorted(p.items())] for p in G.euler],
    }
    return json.dumps(doc, indent=2)


def potential_from_json(text: str) -> Series:
    doc = json.loads(text)
    return {tuple(e): Fraction(c) for e, c in doc["potential"]}


def germ_cubic_form(G: FrobeniusGerm) -> list[list[list[Fraction]]]:
    """Third derivatives of the potential at the origin."""
    c3 = potential_third_derivatives(G)
    zero = (0,) * G.mu
    return [[[Fraction(c3[a][b][d].get(zero, 0)) for d in range(G.mu)] for b in range(G.mu)] for a in range(G.mu)]


def jacobi_cubic_form(S: FrobTypeStructure) -> list[list[list[Fraction]]]:
    """``g(b_a b_b, b_d)`` computed with products in the Jacobi algebra of ``f``."""
    from .structure import point_multiplication

    mu = S.mu
    out = []
    for a in range(mu):
        M = to_array(point_multiplication(S.basis, S.basis.element(a)))
        gm = S.g.T.dot(M)  # (g^T M)[d][b] = g(b_a b_b, b_d)
        out.append([[Fraction(gm[d, b]) for d in range(mu)] for b in range(mu)])
    return out
