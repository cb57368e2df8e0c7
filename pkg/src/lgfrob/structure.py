"""Frobenius-type structures on subdiagram deformation spaces.

Given ``F = f + sum_j x_j g_j`` the structure lives on ``Q[x]^mu`` with

* ``B0(x)``: matrix of ``R_0`` (multiplication by ``F``),
* ``C^i(x)``: matrix of ``Phi_{d/dx_i}`` (multiplication by ``-g_i``),
* ``B_inf = diag(alpha)`` and a constant symmetric metric ``g``.

The matrices are taken in a flat frame ``eps = b T(x, theta)`` of the
Brieskorn lattice, where ``b`` is the monomial basis (a Birkhoff solution at
``x = 0``).  Writing ``[F b] = b A(x, theta)`` and ``[-g_i b] = b Cc_i(x, theta)``
for the theta-expansions, the frame is fixed by

    Cc_i T + theta dT/dx_i = T C^i            (flatness in x)
    A T + theta^2 dT/dtheta = T (B0 + theta B_inf)

with ``T(0, theta) = I``.  Both are solved degree by degree in ``x`` and then
checked as exact polynomial identities.  In the raw monomial basis
``dB0/dx_i = -C^i`` and the relation ``C^i + dB0/dx_i = [B_inf, C^i]`` would
force ``[B_inf, C^i] = 0``; the frame change is what repairs it.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .jacobi import JacobiBasis, NewtonReducer, residue_pairing, _rational_terms
from .laurent import Exponent, LaurentPoly, format_poly, format_rational, parse_param_poly, specialize, deformation
from .linalg import SingularSystem, inverse, nullspace, rank, solve
from .newton import NewtonPolyhedron, subdiagram_monomials
from .series import MatSeries, Truncation, commutator, fmat, inverse_series, to_array


class StructureError(ArithmeticError):
    """The canonical structure could not be built or failed verification."""


class NotSubdiagram(ValueError):
    def __init__(self, index: int, monomial: Exponent, degree: Fraction):
        super().__init__(
            f"g{index + 1} has monomial {monomial} of Newton degree {degree} >= 1"
        )
        self.index = index
        self.monomial = monomial
        self.degree = degree


# deformations -------------------------------------------------------------

@dataclass
class SubdiagramDeformation:
    f: LaurentPoly
    gs: list[LaurentPoly]
    injective: bool
    maximal: bool
    surjective: bool
    good: bool | None = None
    basis: JacobiBasis | None = field(default=None, repr=False)

    @property
    def r(self) -> int:
        return len(self.gs)

    @property
    def n(self) -> int:
        return self.f.n

    def F(self) -> LaurentPoly:
        return deformation(self.f, self.gs)


def _basis_for(f: LaurentPoly, basis: JacobiBasis | None) -> JacobiBasis:
    if basis is not None:
        return basis
    red = NewtonReducer(f)
    return JacobiBasis(f, red.mu, red.monomials, red.alphas, red)


def _coefficient_rank(gs: Sequence[LaurentPoly]) -> int:
    support = sorted({e for g in gs for e in g.terms})
    rows = [[Fraction(g.terms.get(e, 0)) for e in support] for g in gs]
    return rank(rows) if rows and support else 0


def point_multiplication(basis: JacobiBasis, h: LaurentPoly) -> list[list[Fraction]]:
    """Matrix of multiplication by a rational ``h`` on ``A_f`` in the monomial basis."""
    red = basis.reducer
    hs = _rational_terms(h)
    cols = []
    for e in basis.monomials:
        prod = {tuple(a + b for a, b in zip(e2, e)): c for e2, c in hs.items()}
        cols.append(red.divide(prod)[1])
    return [[cols[j][i] for j in range(basis.mu)] for i in range(basis.mu)]


def is_lattice(gs: Sequence[LaurentPoly], f: LaurentPoly, basis: JacobiBasis | None = None) -> bool:
    """True iff polynomials in the ``g_i`` span the Jacobi algebra of ``f``."""
    basis = _basis_for(f, basis)
    mats = [to_array(point_multiplication(basis, g)) for g in gs]
    mu = basis.mu
    unit = [Fraction(int(i == 0)) for i in range(mu)]
    span = [unit]
    frontier = [unit]
    while frontier:
        new = []
        for v in frontier:
            for m in mats:
                w = list(m.dot(np.array(v, dtype=object)))
                if rank(span + [w]) > len(span):
                    span.append(w)
                    new.append(w)
        frontier = new
    return len(span) == mu


def classify_deformation(f: LaurentPoly, gs: Sequence[LaurentPoly], basis: JacobiBasis | None = None,
                         check_good: bool = True) -> SubdiagramDeformation:
    basis = _basis_for(f, basis)
    P = basis.reducer.P
    for i, g in enumerate(gs):
        for e in sorted(g.terms):
            d = P.degree(e)
            if d >= 1:
                raise NotSubdiagram(i, e, d)
    gs = list(gs)
    injective = _coefficient_rank(gs) == len(gs)
    nu = len(subdiagram_monomials(P))
    maximal = injective and len(gs) == nu
    surjective = is_lattice(gs, f, basis)
    D = SubdiagramDeformation(f, gs, injective, maximal, surjective, None, basis)
    if check_good and injective:
        D.good = is_good(build_canonical_structure(D))
    return D


def build_good_maximal_deformation(f: LaurentPoly, basis: JacobiBasis | None = None) -> SubdiagramDeformation:
    """Deformation by the basis monomials of spectral value below one."""
    basis = _basis_for(f, basis)
    gs = [LaurentPoly.monomial(e) for e, a in zip(basis.monomials, basis.alphas) if a < 1]
    nu = len(subdiagram_monomials(basis.reducer.P))
    if len(gs) != nu:
        raise StructureError(f"{len(gs)} basis elements below degree one but {nu} subdiagram monomials")
    D = classify_deformation(f, gs, basis, check_good=False)
    return D


# the structure ------------------------------------------------------------

@dataclass
class FrobTypeStructure:
    n: int
    r: int
    mu: int
    B0: MatSeries
    C: list[MatSeries]
    Binf: np.ndarray
    g: np.ndarray
    basis: JacobiBasis | None = field(default=None, repr=False)
    deformation: SubdiagramDeformation | None = field(default=None, repr=False)
    frame: list[MatSeries] | None = field(default=None, repr=False)  # T_p, theta-indexed
    origin: tuple[Fraction, ...] | None = None

    @property
    def alphas(self) -> list[Fraction]:
        return [self.Binf[i, i] for i in range(self.mu)]

    def at(self, a) -> tuple[np.ndarray, list[np.ndarray]]:
        return self.B0.evaluate(a), [c.evaluate(a) for c in self.C]


def _mul_at_degree(a: MatSeries, b: MatSeries, d: int) -> MatSeries:
    out: dict = {}
    for e1, m1 in a.terms.items():
        s1 = sum(e1)
        if s1 > d:
            continue
        for e2, m2 in b.terms.items():
            if s1 + sum(e2) != d:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            p = m1.dot(m2)
            out[e] = out[e] + p if e in out else p
    return MatSeries(a.nvars, (a.shape[0], b.shape[1]), out)


def _theta_matrices(reducer: NewtonReducer, gs: Sequence[LaurentPoly], r: int):
    """theta-expansions of ``F b_k`` and ``-g_i b_k`` as lists of MatSeries."""
    mu = reducer.mu
    g_sparse = [_rational_terms(g) for g in gs]
    zero = (0,) * r

    def shifted(p, e):
        return {tuple(a + b for a, b in zip(e2, e)): c for e2, c in p.items()}

    def columns_to_series(cols):
        depth = max((len(c) for c in cols), default=0)
        out = []
        for p in range(depth):
            entries = [[{} for _ in range(mu)] for _ in range(mu)]
            for k, col in enumerate(cols):
                if p < len(col):
                    for m, vec in col[p].items():
                        for j, v in enumerate(vec):
                            if v:
                                entries[j][k][m] = v
            out.append(MatSeries.from_entries(r, entries))
        return out

    a_cols, c_cols = [], [[] for _ in gs]
    for e in reducer.monomials:
        h = {zero: shifted(reducer._f, e)}
        for j, g in enumerate(g_sparse):
            ej = tuple(int(k == j) for k in range(r))
            h[ej] = shifted(g, e)
        a_cols.append(reducer.theta_expand(h, g_sparse))
        for i, g in enumerate(g_sparse):
            neg = {k: -v for k, v in shifted(g, e).items()}
            c_cols[i].append(reducer.theta_expand({zero: neg}, g_sparse))
    return columns_to_series(a_cols), [columns_to_series(c) for c in c_cols]


def _degree_bound(D: SubdiagramDeformation, P: NewtonPolyhedron) -> int:
    ws = []
    for g in D.gs:
        top = max((P.degree(e) for e in g.terms), default=Fraction(0))
        ws.append(1 - top)
    wmin = min(ws) if ws else Fraction(1)
    return int(math.floor(Fraction(D.n + 2) / wmin)) + 2


def build_canonical_structure(D: SubdiagramDeformation, verify: bool = True) -> FrobTypeStructure:
    basis = _basis_for(D.f, D.basis)
    red = basis.reducer
    if red.birkhoff_ok is False:
        raise StructureError("no monomial basis solves the Birkhoff problem at the origin")
    r, mu = D.r, basis.mu
    A, Cc = _theta_matrices(red, D.gs, r)
    if not _point_birkhoff(A, basis.alphas, mu):
        raise StructureError("monomial basis is not a Birkhoff solution at the origin")
    bound = _degree_bound(D, red.P)
    zero_m = MatSeries.zero(r, (mu, mu))
    T: list[MatSeries] = [MatSeries.identity(r, mu)]
    C = [zero_m.copy() for _ in range(r)]
    cdepth = max((len(c) for c in Cc), default=1)

    def Tp(p):
        return T[p] if p < len(T) else zero_m

    for d in range(bound + 1):
        for i in range(r):
            piece = _mul_at_degree(Cc[i][0], T[0], d) if Cc[i] else zero_m
            for d1 in range(1, d + 1):
                piece = piece - _mul_at_degree(T[0].homogeneous(d1), C[i].homogeneous(d - d1), d)
            C[i] = C[i] + piece.homogeneous(d)
        pmax = len(T) + cdepth
        for p in range(1, pmax + 1):
            total = zero_m
            for i in range(r):
                rhs = _mul_at_degree(Tp(p), C[i], d)
                for q in range(0, min(p, len(Cc[i]) - 1) + 1):
                    rhs = rhs - _mul_at_degree(Cc[i][q], Tp(p - q), d)
                total = total + rhs.multiply_variable(i)
            total = total.homogeneous(d + 1).scale(Fraction(1, d + 1))
            if total.is_zero():
                continue
            while len(T) < p:
                T.append(zero_m.copy())
            T[p - 1] = T[p - 1] + total
    while T and len(T) > 1 and T[-1].is_zero():
        T.pop()
    for m in T + C:
        if m.max_degree() >= bound - 1:
            raise StructureError("flat frame did not close up as a polynomial; degree bound reached")
    trunc = Truncation((True,) * r, bound)
    T0inv = inverse_series(T[0], trunc) if r else MatSeries.identity(0, mu)
    B0 = T0inv.matmul(A[0].matmul(T[0], trunc), trunc)
    if B0.max_degree() >= bound - 1:
        raise StructureError("B0 is not polynomial within the degree bound")
    Binf = fmat(mu, mu)
    for k, a in enumerate(basis.alphas):
        Binf[k, k] = a
    g = to_array(residue_pairing(basis))
    S = FrobTypeStructure(D.n, r, mu, B0, C, Binf, g, basis, D, T, tuple(Fraction(0) for _ in range(r)))
    if verify:
        frame_defects = frame_identity_defects(S, A, Cc)
        if frame_defects:
            raise StructureError("frame identities failed: " + "; ".join(frame_defects))
        rep = verify_structure_relations(S)
        if not rep.ok:
            raise StructureError("structure relation failed: " + rep.first_failure())
    return S


def _point_birkhoff(A: list[MatSeries], alphas, mu: int) -> bool:
    want = fmat(mu, mu)
    for k, a in enumerate(alphas):
        want[k, k] = a
    for p, m in enumerate(A):
        c = m.constant_term()
        if p == 1 and not _arr_eq(c, want):
            return False
        if p >= 2 and any(v != 0 for v in c.flat):
            return False
    return len(A) > 1 or all(v == 0 for v in want.flat)


def frame_identity_defects(S: FrobTypeStructure, A=None, Cc=None) -> list[str]:
    """Check both frame equations exactly; returns failures."""
    if A is None or Cc is None:
        A, Cc = _theta_matrices(S.basis.reducer, S.deformation.gs, S.r)
    T = S.frame
    mu, r = S.mu, S.r
    zero = MatSeries.zero(r, (mu, mu))

    def at(lst, p):
        return lst[p] if 0 <= p < len(lst) else zero

    out = []
    depth = len(T) + max([len(A)] + [len(c) for c in Cc]) + 1
    binf = S.Binf
    for p in range(depth + 1):
        lhs = zero
        for q in range(p + 1):
            lhs = lhs + at(A, q).matmul(at(T, p - q))
        lhs = lhs + at(T, p - 1).scale(p - 1)
        rhs = at(T, p).matmul(S.B0) + at(T, p - 1).right_const(binf)
        if not (lhs - rhs).is_zero():
            out.append(f"theta-equation fails at theta^{p}")
        for i in range(r):
            lhs = zero
            for q in range(p + 1):
                lhs = lhs + at(Cc[i], q).matmul(at(T, p - q))
            lhs = lhs + at(T, p - 1).derivative(i)
            if not (lhs - at(T, p).matmul(S.C[i])).is_zero():
                out.append(f"x{i + 1}-flatness fails at theta^{p}")
    return out


# relations ----------------------------------------------------------------

@dataclass
class RelationResult:
    name: str
    passed: bool
    witness: str | None = None


@dataclass
class RelationReport:
    results: list[RelationResult]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def first_failure(self) -> str:
        for r in self.results:
            if not r.passed:
                return f"{r.name}: {r.witness}"
        return ""

    def __str__(self) -> str:
        return "\n".join(f"{'PASS' if r.passed else 'FAIL'} {r.name}" + (f" ({r.witness})" if r.witness else "")
                         for r in self.results)


def _witness(m: MatSeries, names: Sequence[str]) -> str | None:
    if m.is_zero():
        return None
    e = min(m.terms, key=lambda t: (sum(t), t))
    a = m.terms[e]
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j] != 0:
                mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(names, e) if k) or "1"
                return f"entry ({i + 1},{j + 1}), coefficient of {mono} is {format_rational(a[i, j])}"
    return None


def check_relations(B0: MatSeries, C: Sequence[MatSeries], Binf: np.ndarray, g: np.ndarray, n: int,
                    names: Sequence[str] | None = None, trunc: Truncation | None = None,
                    dtrunc: Truncation | None = None) -> RelationReport:
    """The seven compatibility relations of a Frobenius-type structure.

    ``trunc`` limits algebraic identities and ``dtrunc`` the ones involving
    a derivative (for truncated series the top order is not meaningful there).
    """
    nv = B0.nvars
    names = names or [f"x{i + 1}" for i in range(nv)]
    res: list[RelationResult] = []
    cut = (lambda m: m.truncate(trunc)) if trunc else (lambda m: m)
    dcut = (lambda m: m.truncate(dtrunc)) if dtrunc else cut
    k = len(C)
    gS = MatSeries.constant(nv, g)

    bad = None
    for i, j in itertools.combinations(range(k), 2):
        w = _witness(dcut(C[i].derivative(j) - C[j].derivative(i)), names)
        if w:
            bad = f"i={i + 1}, j={j + 1}: {w}"
            break
    res.append(RelationResult("dC^i/dx_j = dC^j/dx_i", bad is None, bad))

    bad = None
    for i, j in itertools.combinations(range(k), 2):
        w = _witness(cut(commutator(C[i], C[j], trunc)), names)
        if w:
            bad = f"i={i + 1}, j={j + 1}: {w}"
            break
    res.append(RelationResult("[C^i, C^j] = 0", bad is None, bad))

    bad = None
    for i in range(k):
        w = _witness(cut(commutator(B0, C[i], trunc)), names)
        if w:
            bad = f"i={i + 1}: {w}"
            break
    res.append(RelationResult("[B0, C^i] = 0", bad is None, bad))

    bad = None
    for i in range(k):
        lhs = C[i] + B0.derivative(i)
        rhs = C[i].left_const(Binf) - C[i].right_const(Binf)
        w = _witness(dcut(lhs - rhs), names)
        if w:
            bad = f"i={i + 1}: {w}"
            break
    res.append(RelationResult("C^i + dB0/dx_i = [B_inf, C^i]", bad is None, bad))

    bad = None
    for i in range(k):
        m = C[i].left_const(g)
        w = _witness(cut(m - m.transpose()), names)
        if w:
            bad = f"i={i + 1}: {w}"
            break
    res.append(RelationResult("g C^i symmetric", bad is None, bad))

    m = B0.left_const(g)
    w = _witness(cut(m - m.transpose()), names)
    res.append(RelationResult("g B0 symmetric", w is None, w))

    try:
        ginv = to_array(inverse([list(row) for row in g]))
        lhs = Binf + g.dot(Binf.T).dot(ginv)
        want = fmat(*Binf.shape)
        for i in range(Binf.shape[0]):
            want[i, i] = Fraction(n)
        w = _witness(MatSeries.constant(0, lhs - want), [])
        res.append(RelationResult("B_inf + g B_inf^T g^-1 = n I, B_inf constant", w is None, w))
    except SingularSystem:
        res.append(RelationResult("B_inf + g B_inf^T g^-1 = n I, B_inf constant", False, "metric is singular"))
    return RelationReport(res)


def verify_structure_relations(S: FrobTypeStructure) -> RelationReport:
    return check_relations(S.B0, S.C, S.Binf, S.g, S.n)


def perturb_binf(S: FrobTypeStructure, slot: int = 0, delta=1) -> FrobTypeStructure:
    """Copy of ``S`` with one diagonal entry of ``B_inf`` shifted (negative control)."""
    b = S.Binf.copy()
    b[slot, slot] = b[slot, slot] + Fraction(delta)
    return FrobTypeStructure(S.n, S.r, S.mu, S.B0, list(S.C), b, S.g, S.basis, S.deformation, S.frame, S.origin)


# period map, generation and injectivity ------------------------------------

def period_map(S: FrobTypeStructure, a) -> list[list[Fraction]]:
    """``mu x r`` matrix whose column i is ``-Phi_{d/dx_i}(omega)`` at ``x = a``."""
    cols = [[-v for v in c.evaluate(a)[:, 0]] for c in S.C]
    return [[cols[i][j] for i in range(S.r)] for j in range(S.mu)]


def check_IC(S: FrobTypeStructure, a) -> bool:
    pm = period_map(S, a)
    return S.r == 0 or rank(pm) == S.r


def _krylov_span(mats: Sequence[np.ndarray], mu: int) -> list[list[Fraction]]:
    start = [Fraction(int(i == 0)) for i in range(mu)]
    span = [start]
    frontier = [start]
    while frontier:
        new = []
        for v in frontier:
            for m in mats:
                w = list(m.dot(np.array(v, dtype=object)))
                if rank(span + [w]) > len(span):
                    span.append(w)
                    new.append(w)
        frontier = new
    return span


def check_GC(S: FrobTypeStructure, a) -> bool:
    B0, Cs = S.at(a)
    return len(_krylov_span([B0] + Cs, S.mu)) == S.mu


def krylov_words(S: FrobTypeStructure, a=None) -> list[tuple[int, ...]]:
    """Words in (B0, C^1..C^r) whose action on ``e_1`` gives a basis at ``x = a``.

    Letter 0 stands for ``B0`` and letter ``i`` for ``C^i``; words are
    found breadth first, so they are short and deterministic.
    """
    a = a if a is not None else [0] * S.r
    B0, Cs = S.at(a)
    mats = [B0] + Cs
    mu = S.mu
    start = np.array([Fraction(int(i == 0)) for i in range(mu)], dtype=object)
    words: list[tuple[int, ...]] = [()]
    vecs = [list(start)]
    frontier = [((), start)]
    while frontier and len(words) < mu:
        new = []
        for w, v in frontier:
            for k, m in enumerate(mats):
                u = m.dot(v)
                if rank(vecs + [list(u)]) > len(vecs):
                    vecs.append(list(u))
                    words.append(w + (k,))
                    new.append((w + (k,), u))
        frontier = new
    if len(words) < mu:
        raise SingularSystem("omega does not generate at this point")
    return words


def word_matrix(S: FrobTypeStructure, words, B0: MatSeries | None = None, C=None,
                trunc: Truncation | None = None) -> MatSeries:
    """Matrix with columns ``W(e_1)`` for the given words (as series in x)."""
    B0 = B0 or S.B0
    C = C or S.C
    mats = [B0] + list(C)
    nv = B0.nvars
    cols = []
    for w in words:
        v = MatSeries.constant(nv, to_array([[Fraction(int(i == 0))] for i in range(S.mu)]))
        for letter in reversed(w):
            v = mats[letter].matmul(v, trunc)
        cols.append(v)
    out = {}
    for j, v in enumerate(cols):
        for e, a in v.terms.items():
            if e not in out:
                out[e] = fmat(S.mu, len(words))
            out[e][:, j] = a[:, 0]
    return MatSeries(nv, (S.mu, len(words)), out)


def _det_poly(m: MatSeries) -> dict:
    """Determinant of a square polynomial matrix (Leibniz via cofactor expansion)."""
    ent = m.entries()
    from .series import poly_add, poly_mul

    def det(rows, cols):
        if len(rows) == 1:
            return dict(ent[rows[0]][cols[0]])
        out: dict = {}
        r0 = rows[0]
        for k, c in enumerate(cols):
            if not ent[r0][c]:
                continue
            minor = det(rows[1:], cols[:k] + cols[k + 1:])
            out = poly_add(out, poly_mul(ent[r0][c], minor), -1 if k % 2 else 1)
        return out

    n = m.shape[0]
    return det(list(range(n)), list(range(n)))


def check_GC_global(S: FrobTypeStructure) -> bool:
    """Generation over Q[x]: sample points, then a unit determinant certificate."""
    r = S.r
    samples = [[0] * r] + [[int(i == k) for i in range(r)] for k in range(r)] + [list(range(1, r + 1))]
    for a in samples:
        if not check_GC(S, a):
            return False
    words = krylov_words(S)
    K = word_matrix(S, words)
    d = _det_poly(K)
    return len(d) == 1 and next(iter(d)) == (0,) * r


# good deformations and primitive maps ---------------------------------------

def is_good(S: FrobTypeStructure) -> bool:
    """First column of ``-C^i`` is ``e_i`` plus earlier basis vectors, identically in x."""
    if S.r > S.mu:
        return False
    for i, c in enumerate(S.C):
        for j in range(i, S.mu):
            ent = c.entry(j, 0)
            want = {(0,) * S.r: Fraction(-1)} if j == i else {}
            if ent != want:
                return False
    return True


def integrate_closed_form(coeffs: Sequence[dict], nvars: int) -> dict:
    """Potential ``G`` with ``G(0) = 0`` and ``dG/dx_i = coeffs[i]`` (Euler formula)."""
    out: dict = {}
    for i, c in enumerate(coeffs):
        for e, v in c.items():
            e2 = tuple(a + (1 if k == i else 0) for k, a in enumerate(e))
            out[e2] = out.get(e2, 0) + Fraction(v, sum(e2))
    return {e: v for e, v in out.items() if v}


def _poly_derivative(p: dict, i: int) -> dict:
    out = {}
    for e, v in p.items():
        if e[i]:
            out[e[:i] + (e[i] - 1,) + e[i + 1:]] = v * e[i]
    return out


@dataclass
class PrimitiveMapPoly:
    components: list[dict]  # Gamma_j1 as dict exponent -> Fraction
    nvars: int

    def evaluate(self, a) -> list[Fraction]:
        out = []
        for p in self.components:
            s = Fraction(0)
            for e, v in p.items():
                t = Fraction(v)
                for x, k in zip(a, e):
                    t *= Fraction(x) ** k
                s += t
            out.append(s)
        return out

    def __str__(self) -> str:
        return "(" + ", ".join(str(LaurentPoly(self.nvars, p, "x")) for p in self.components) + ")"


def primitive_map(S: FrobTypeStructure) -> PrimitiveMapPoly:
    comps = []
    for j in range(S.mu):
        cols = [c.entry(j, 0) for c in S.C]
        G = integrate_closed_form(cols, S.r)
        for i in range(S.r):
            if _poly_derivative(G, i) != {e: v for e, v in cols[i].items() if v}:
                raise StructureError("first columns of the Higgs fields are not a closed form")
        comps.append(G)
    return PrimitiveMapPoly(comps, S.r)


def triangular_shape_holds(components: Sequence[dict], r: int, extra: int = 0) -> bool:
    """``(-x1 + G1(x2..), ..., -x_r, y_1, ..., y_extra, 0, ...)`` coefficientwise.

    The variables are ordered ``x1..x_r`` then ``y_1..y_extra``.
    """
    nv = r + extra
    for j, p in enumerate(components):
        if j < r:
            lin = tuple(int(k == j) for k in range(nv))
            if p.get(lin) != -1:
                return False
            for e, v in p.items():
                if e == lin:
                    continue
                if any(e[k] for k in range(j + 1)) or any(e[r:]):
                    return False
        elif j < r + extra:
            lin = tuple(int(k == j) for k in range(nv))
            if p != {lin: Fraction(1)}:
                return False
        elif p:
            return False
    return True


# transformations ----------------------------------------------------------

def translate_structure(S: FrobTypeStructure, a) -> FrobTypeStructure:
    a = [Fraction(v) for v in a]
    origin = tuple((S.origin[k] if S.origin else 0) + a[k] for k in range(S.r))
    frame = [t.translate(a) for t in S.frame] if S.frame else None
    return FrobTypeStructure(S.n, S.r, S.mu, S.B0.translate(a), [c.translate(a) for c in S.C], S.Binf.copy(),
                             S.g.copy(), S.basis, S.deformation, frame, origin)


def change_of_lattice_iso(D1: SubdiagramDeformation, D2: SubdiagramDeformation) -> list[list[Fraction]]:
    """Matrix ``L`` with ``gs2[j] = sum_i L[j][i] gs1[i]``."""
    if not (D1.maximal and D2.maximal):
        raise ValueError("both deformations must be maximal")
    support = sorted({e for g in D1.gs + D2.gs for e in g.terms})
    A = [[Fraction(g.terms.get(e, 0)) for g in D1.gs] for e in support]
    L = []
    for g2 in D2.gs:
        L.append(solve(A, [Fraction(g2.terms.get(e, 0)) for e in support]))
    return L


def pullback_linear(S: FrobTypeStructure, L: Sequence[Sequence[Fraction]]) -> tuple[MatSeries, list[MatSeries]]:
    """Matrices of structure 2 predicted from structure 1 under ``gs2 = L gs1``."""
    r = S.r
    images = []
    for i in range(r):
        images.append({tuple(int(k == j) for k in range(r)): Fraction(L[j][i]) for j in range(r) if L[j][i]})
    B0 = S.B0.substitute_linear(images)
    Cs = [c.substitute_linear(images) for c in S.C]
    C2 = []
    for j in range(r):
        acc = MatSeries.zero(r, (S.mu, S.mu))
        for i in range(r):
            if L[j][i]:
                acc = acc + Cs[i].scale(L[j][i])
        C2.append(acc)
    return B0, C2


def extended_connection(S: FrobTypeStructure, a) -> dict:
    """Connection matrix ``-(tau B0(a) + B_inf) dtau/tau + tau sum C^i(a) dx_i``."""
    B0, Cs = S.at(a)
    return {
        "dtau/tau": {"tau^0": -S.Binf, "tau^1": -B0},
        "dx": [{"tau^1": c} for c in Cs],
    }


# restriction to a point ----------------------------------------------------

@dataclass
class RestrictionCheck:
    intertwiner_ok: bool
    metric_ok: bool
    birkhoff_ok: bool
    notes: list[str]

    @property
    def ok(self) -> bool:
        return self.intertwiner_ok and self.metric_ok and self.birkhoff_ok


def restriction_check(S: FrobTypeStructure, a) -> RestrictionCheck:
    """Compare ``S`` at ``x = a`` with the structure built from ``F_a`` alone.

    ``F_a`` gets its own graded basis, multiplication matrices, pairing and
    reducer.  The frame at ``a`` must intertwine multiplication, carry the
    metric to the residue pairing of ``F_a``, and solve the Birkhoff problem
    for ``F_a`` computed with ``F_a``'s own reducer.
    """
    D = S.deformation
    a = [Fraction(v) for v in a]
    Fa = D.f + sum((g * v for g, v in zip(D.gs, a)), LaurentPoly(D.n))
    red_a = NewtonReducer(Fa, search=False, basis=S.basis.monomials)
    basis_a = JacobiBasis(Fa, red_a.mu, red_a.monomials, red_a.alphas, red_a)
    notes = []
    mu = S.mu
    T = [t.evaluate(a) for t in S.frame]
    # classes of the frame in the Jacobi algebra of F_a
    P = T[0]
    MF = to_array(point_multiplication(basis_a, Fa))
    B0a, Ca = S.at(a)
    ok1 = _arr_eq(P.dot(B0a), MF.dot(P))
    if not ok1:
        notes.append("P B0(a) != M_{F_a} P")
    for g, c in zip(D.gs, Ca):
        Mg = to_array(point_multiplication(basis_a, g))
        if not _arr_eq(P.dot(c), (-Mg).dot(P)):
            ok1 = False
            notes.append("P C(a) != -M_g P")
    Ga = to_array(residue_pairing(basis_a))
    ok2 = _arr_eq(P.T.dot(Ga).dot(P), S.g)
    if not ok2:
        notes.append("frame does not carry g to the residue pairing of F_a")
    # Birkhoff identity for F_a with its own reducer
    fa = _rational_terms(Fa)
    E = []
    for e in red_a.monomials:
        h = {tuple(x + y for x, y in zip(e2, e)): c for e2, c in fa.items()}
        E.append([p.get((), [Fraction(0)] * mu) for p in red_a.theta_expand({(): h})])
    depth = max(len(c) for c in E)

    def Emat(p):
        return to_array([[E[k][p][j] if p < len(E[k]) else Fraction(0) for k in range(mu)] for j in range(mu)])

    def Tm(p):
        return T[p] if 0 <= p < len(T) else fmat(mu, mu)

    ok3 = True
    for p in range(depth + len(T) + 1):
        lhs = fmat(mu, mu)
        for q in range(p + 1):
            if q < depth:
                lhs = lhs + Emat(q).dot(Tm(p - q))
        lhs = lhs + Tm(p - 1) * (p - 1)
        rhs = Tm(p).dot(B0a) + Tm(p - 1).dot(S.Binf)
        if not _arr_eq(lhs, rhs):
            ok3 = False
            notes.append(f"Birkhoff identity for F_a fails at theta^{p}")
            break
    return RestrictionCheck(ok1, ok2, ok3, notes)


def _arr_eq(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


# JSON ---------------------------------------------------------------------

def _poly_text(p: dict, r: int) -> str:
    return format_poly(LaurentPoly(r, p, "x")) if r else format_rational(Fraction(p.get((), 0)))


def _parse_poly_text(text: str, r: int) -> dict:
    if r == 0:
        return {(): Fraction(text)} if Fraction(text) else {}
    return dict(parse_param_poly(text, r).terms)


def structure_to_json(S: FrobTypeStructure) -> str:
    r = S.r
    doc = {
        "n": S.n,
        "mu": S.mu,
        "r": r,
        "basis": [list(e) for e in S.basis.monomials],
        "deformation": [format_poly(g) for g in S.deformation.gs] if S.deformation else [],
        "alpha": [format_rational(a) for a in S.alphas],
        "B0": [[_poly_text(p, r) for p in row] for row in S.B0.entries()],
        "C": [[[_poly_text(p, r) for p in row] for row in c.entries()] for c in S.C],
        "Binf": [[format_rational(v) for v in row] for row in S.Binf],
        "g": [[format_rational(v) for v in row] for row in S.g],
    }
    return json.dumps(doc, indent=2, sort_keys=False)


@dataclass
class StructureDocument:
    """Plain matrices read back from JSON."""

    n: int
    mu: int
    r: int
    basis: list[tuple[int, ...]]
    alpha: list[Fraction]
    B0: MatSeries
    C: list[MatSeries]
    g: np.ndarray

    def binf(self) -> np.ndarray:
        b = fmat(self.mu, self.mu)
        for k, a in enumerate(self.alpha):
            b[k, k] = a
        return b


def structure_from_json(text: str) -> StructureDocument:
    doc = json.loads(text)
    r = doc["r"]
    B0 = MatSeries.from_entries(r, [[_parse_poly_text(t, r) for t in row] for row in doc["B0"]])
    C = [MatSeries.from_entries(r, [[_parse_poly_text(t, r) for t in row] for row in c]) for c in doc["C"]]
    g = to_array([[Fraction(v) for v in row] for row in doc["g"]])
    return StructureDocument(doc["n"], doc["mu"], r, [tuple(e) for e in doc["basis"]],
                             [Fraction(a) for a in doc["alpha"]], B0, C, g)
