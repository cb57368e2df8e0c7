"""Jacobi algebra, Newton-graded monomial basis and the Brieskorn-lattice reducer.

The Newton degree is not a monomial order, so instead of a Groebner basis we
use filtered linear algebra.  Write ``V_b`` for the span of monomials of
Newton degree ``<= b`` and ``L_i = u_i d/du_i``.  For each level ``b`` the
graded piece of the Jacobi algebra is

    V_b / (sum_i L_i(f) V_{b-1} + V_{<b})

and its basis is chosen greedily among the level-``b`` monomials in
descending lexicographic order.  Every element ``h`` then splits as
``h = sum_i a_i L_i(F) + r`` with ``a_i`` of degree ``<= nu(h) - 1`` and
``r`` in the span of the basis.  In the lattice ``G_0`` one has
``a L_i(F) [du/u] = theta L_i(a) [du/u]``, so iterating the split expands any
class as a polynomial in ``theta`` with coefficients in the basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .laurent import Exponent, LaurentPoly, split_parameters
from .linalg import LinearSolver, Matrix, SingularSystem, identity, inverse, matmul, rank
from .newton import NewtonPolyhedron, NotConvenient, is_subdiagram, lattice_points_upto, newton_polyhedron, milnor_number

Sparse = dict  # Exponent -> Fraction
XExp = tuple  # exponent in the parameters x


class BasisMismatch(ArithmeticError):
    """The graded monomial basis does not have Kouchnirenko's size."""


class ReductionBudgetExceeded(RuntimeError):
    pass


def _desc_lex(e: Exponent):
    return tuple(-a for a in e)


def _sparse_mul(p: Sparse, q: Sparse) -> Sparse:
    out: Sparse = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = out.get(e, 0) + c1 * c2
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def _sparse_axpy(target: Sparse, c, p: Sparse, shift: Exponent | None = None) -> None:
    """target += c * u^shift * p, in place."""
    for e, v in p.items():
        if shift is not None:
            e = tuple(a + b for a, b in zip(e, shift))
        w = target.get(e, 0) + c * v
        if w:
            target[e] = w
        else:
            target.pop(e, None)


def _log_der(p: Sparse, i: int) -> Sparse:
    return {e: e[i] * c for e, c in p.items() if e[i]}


def _rational_terms(p: LaurentPoly) -> Sparse:
    for c in p.terms.values():
        if isinstance(c, LaurentPoly):
            raise TypeError("expected a polynomial with rational coefficients")
    return dict(p.terms)


class NewtonReducer:
    """Graded basis and division by ``(L_1 f, ..., L_n f)`` for a rational ``f``."""

    def __init__(self, f: LaurentPoly, polyhedron: NewtonPolyhedron | None = None, budget: int = 10**6,
                 basis: Sequence[Exponent] | None = None, search: bool = True, search_cap: int = 20000):
        self.f = f
        self.n = f.n
        self.P = polyhedron or newton_polyhedron(f)
        if not self.P.origin_interior:
            raise NotConvenient("polynomial is not convenient")
        self.budget = budget
        self._f = _rational_terms(f)
        self._lf = [_log_der(self._f, i) for i in range(self.n)]
        self._level_pts: dict[Fraction, list[Exponent]] = {}
        self._solvers: dict[Fraction, tuple] = {}
        self._nu_cache: dict[Exponent, Fraction] = {}
        self._build_basis()
        self.birkhoff_ok: bool | None = None
        if basis is not None:
            self.set_basis(basis)
        elif search:
            found = self._search_birkhoff(search_cap)
            self.birkhoff_ok = found is not None
            if found is not None:
                self.set_basis(found)

    # Newton degree with memo
    def nu(self, e: Exponent) -> Fraction:
        v = self._nu_cache.get(e)
        if v is None:
            v = self.P.degree(e)
            self._nu_cache[e] = v
        return v

    def points_at_level(self, beta: Fraction) -> list[Exponent]:
        pts = self._level_pts.get(beta)
        if pts is None:
            pts = [a for a in lattice_points_upto(self.P, beta) if self.nu(a) == beta]
            pts.sort(key=_desc_lex)
            self._level_pts[beta] = pts
        return pts

    def _generators(self, beta: Fraction) -> list[tuple[int, Exponent]]:
        if beta - 1 < 0:
            return []
        return [(i, c) for c in self.points_at_level(beta - 1) for i in range(self.n)]

    def _generator_poly(self, i: int, c: Exponent) -> Sparse:
        return {tuple(a + b for a, b in zip(e, c)): v for e, v in self._lf[i].items()}

    def _projected_generators(self, beta: Fraction, rows: dict[Exponent, int]):
        cols = []
        for i, c in self._generators(beta):
            col = [Fraction(0)] * len(rows)
            for e, v in self._generator_poly(i, c).items():
                k = rows.get(e)
                if k is not None:
                    col[k] = v
            cols.append(col)
        return cols

    def _level_span(self, beta: Fraction):
        pts = self.points_at_level(beta)
        rows = {e: k for k, e in enumerate(pts)}
        span = [list(col) for col in self._projected_generators(beta, rows)]
        return pts, rows, span

    def _build_basis(self) -> None:
        n = self.n
        levels = sorted({self.nu(a) for a in lattice_points_upto(self.P, n)})
        monos: list[Exponent] = []
        self._graded: list[tuple[Fraction, int]] = []
        for beta in levels:
            pts, rows, span = self._level_span(beta)
            r0 = r = rank(span) if span else 0
            for e in pts:
                unit = [Fraction(int(k == rows[e])) for k in range(len(pts))]
                if rank(span + [unit]) > r:
                    span.append(unit)
                    r += 1
                    monos.append(e)
            if r > r0:
                self._graded.append((beta, r - r0))
        self._install(monos)
        expected = milnor_number(self.P) if n <= 3 else None
        if expected is not None and expected != self.mu:
            raise BasisMismatch(
                f"graded basis has {self.mu} elements but n!*Vol = {expected}; is f nondegenerate?"
            )

    def _install(self, monos: Sequence[Exponent]) -> None:
        monos = sorted(monos, key=lambda e: (self.nu(e), _desc_lex(e)))
        self.monomials: tuple[Exponent, ...] = tuple(monos)
        self.alphas: tuple[Fraction, ...] = tuple(self.nu(e) for e in monos)
        self.mu = len(monos)
        self.index = {e: k for k, e in enumerate(monos)}
        self._solvers = {}

    def set_basis(self, monos: Sequence[Exponent]) -> None:
        """Replace the basis by other monomials spanning the same graded pieces."""
        monos = [tuple(e) for e in monos]
        for beta, dim in self._graded:
            chosen = [e for e in monos if self.nu(e) == beta]
            pts, rows, span = self._level_span(beta)
            r0 = rank(span) if span else 0
            units = [[Fraction(int(k == rows[e])) for k in range(len(pts))] for e in chosen if e in rows]
            if len(chosen) != dim or len(units) != dim or rank(span + units) != r0 + dim:
                raise BasisMismatch(f"monomials at level {beta} do not form a basis of the graded piece")
        if len(monos) != sum(d for _, d in self._graded):
            raise BasisMismatch("basis has the wrong size")
        self._install(monos)

    def _search_birkhoff(self, cap: int):
        """First monomial basis (descending-lex enumeration) solving the Birkhoff problem at f.

        The test is exact: with ``[b'] = b Q(theta)`` and ``[f b'] = b F(theta)`` the
        requirement is ``F = Q (A_0 + theta diag(alpha))``, since theta^2 d/dtheta
        acts on a monomial form as multiplication by ``f``.
        """
        mu = self.mu
        choices = []
        for beta, dim in self._graded:
            choices.append(list(itertools.combinations(self.points_at_level(beta), dim)))
        cache: dict[Exponent, tuple] = {}

        def expansions(e):
            got = cache.get(e)
            if got is None:
                fe = {tuple(a + b for a, b in zip(e2, e)): c for e2, c in self._f.items()}
                q = [p.get((), [Fraction(0)] * mu) for p in self.theta_expand({(): {e: Fraction(1)}})]
                fq = [p.get((), [Fraction(0)] * mu) for p in self.theta_expand({(): fe})]
                got = cache[e] = (q, fq)
            return got

        tried = 0
        for combo in itertools.product(*choices):
            tried += 1
            if tried > cap:
                return None
            monos = [e for block in combo for e in block]
            if self._birkhoff_identity(monos, expansions):
                return monos
        return None

    def _birkhoff_identity(self, monos, expansions) -> bool:
        mu = self.mu
        alphas = [self.nu(e) for e in monos]
        exps = [expansions(e) for e in monos]
        depth = max(max(len(q), len(fq)) for q, fq in exps) + 1

        def mat(p, which):
            cols = []
            for k in range(mu):
                seq = exps[k][which]
                cols.append(seq[p] if p < len(seq) else [Fraction(0)] * mu)
            return [[cols[j][i] for j in range(mu)] for i in range(mu)]

        q0 = mat(0, 0)
        try:
            q0inv = inverse(q0)
        except SingularSystem:
            return False
        a0 = matmul(q0inv, mat(0, 1))
        for p in range(1, depth + 1):
            lhs = mat(p, 1)
            qprev = mat(p - 1, 0)
            qp = mat(p, 0)
            right = matmul(qp, a0)
            for i in range(mu):
                for j in range(mu):
                    if lhs[i][j] != right[i][j] + qprev[i][j] * alphas[j]:
                        return False
        return True

    def _solver(self, beta: Fraction):
        s = self._solvers.get(beta)
        if s is None:
            pts = self.points_at_level(beta)
            rows = {e: k for k, e in enumerate(pts)}
            gens = self._generators(beta)
            cols = self._projected_generators(beta, rows)
            basis_here = [k for k, a in enumerate(self.alphas) if a == beta]
            for k in basis_here:
                col = [Fraction(0)] * len(pts)
                col[rows[self.monomials[k]]] = Fraction(1)
                cols.append(col)
            mat = [[col[r] for col in cols] for r in range(len(pts))]
            s = (rows, gens, basis_here, LinearSolver(mat) if mat and cols else None)
            self._solvers[beta] = s
        return s

    def divide(self, h: Sparse) -> tuple[list[Sparse], list[Fraction]]:
        """Split ``h = sum_i a_i L_i(f) + sum_k r_k b_k`` with ``nu(a_i) <= nu(h) - 1``."""
        work = dict(h)
        a: list[Sparse] = [dict() for _ in range(self.n)]
        r = [Fraction(0)] * self.mu
        steps = 0
        while work:
            steps += 1
            if steps > self.budget:
                raise ReductionBudgetExceeded("reduction step budget exceeded")
            beta = max(self.nu(e) for e in work)
            rows, gens, basis_here, solver = self._solver(beta)
            rhs = [Fraction(0)] * len(rows)
            for e, v in work.items():
                if self.nu(e) == beta:
                    rhs[rows[e]] = v
            if solver is None:
                raise SingularSystem(f"no relations available at level {beta}")
            z = solver.solve(rhs)
            for (i, c), zi in zip(gens, z):
                if zi:
                    a[i][c] = a[i].get(c, 0) + zi
                    if not a[i][c]:
                        del a[i][c]
                    _sparse_axpy(work, -zi, self._lf[i], c)
            for k, zk in zip(basis_here, z[len(gens):]):
                if zk:
                    r[k] += zk
                    e = self.monomials[k]
                    v = work.get(e, 0) - zk
                    if v:
                        work[e] = v
                    else:
                        work.pop(e, None)
            # the level-beta part is gone now
            assert all(self.nu(e) < beta for e in work), "level did not drop"
        return a, r

    # parametric version ----------------------------------------------------
    def divide_parametric(self, h: dict[XExp, Sparse], gs: Sequence[Sparse]):
        """Same split for ``F = f + sum_j x_j g_j`` with ``h`` polynomial in ``x``.

        Processes x-monomials by increasing degree; the correction
        ``-sum_i a_{i,m} L_i(g_j)`` is pushed to ``x^(m + e_j)``.  Each push
        lowers the Newton degree by ``1 - nu(g_j) > 0``, so this terminates.
        """
        r_count = len(gs)
        lg = [[_log_der(g, i) for i in range(self.n)] for g in gs]
        work = {m: dict(p) for m, p in h.items() if p}
        a_out: list[dict[XExp, Sparse]] = [dict() for _ in range(self.n)]
        r_out: dict[XExp, list[Fraction]] = {}
        steps = 0
        while work:
            m = min(work, key=lambda t: (sum(t), t))
            hm = work.pop(m)
            if not hm:
                continue
            steps += 1
            if steps > self.budget:
                raise ReductionBudgetExceeded("parametric reduction budget exceeded")
            a, r = self.divide(hm)
            if any(r):
                r_out[m] = r
            for i in range(self.n):
                if a[i]:
                    a_out[i][m] = a[i]
            for j in range(r_count):
                corr: Sparse = {}
                for i in range(self.n):
                    if a[i] and lg[j][i]:
                        _sparse_axpy(corr, Fraction(1), _sparse_mul(a[i], lg[j][i]))
                if corr:
                    mj = tuple(v + (1 if k == j else 0) for k, v in enumerate(m))
                    tgt = work.setdefault(mj, {})
                    _sparse_axpy(tgt, Fraction(-1), corr)
                    if not tgt:
                        del work[mj]
        return a_out, r_out

    def theta_expand(self, h: dict[XExp, Sparse], gs: Sequence[Sparse] = ()) -> list[dict[XExp, list[Fraction]]]:
        """Coordinates of ``[h du/u]`` in ``G_0`` as a list indexed by the power of theta."""
        out = []
        cur = {m: p for m, p in h.items() if p}
        while cur:
            a, r = self.divide_parametric(cur, gs)
            out.append(r)
            nxt: dict[XExp, Sparse] = {}
            for i in range(self.n):
                for m, p in a[i].items():
                    d = _log_der(p, i)
                    if d:
                        tgt = nxt.setdefault(m, {})
                        _sparse_axpy(tgt, Fraction(1), d)
                        if not tgt:
                            del nxt[m]
            cur = nxt
        return out


# public types ---------------------------------------------------------------

@dataclass(frozen=True)
class JacobiBasis:
    f: LaurentPoly
    mu: int
    monomials: tuple[Exponent, ...]
    alphas: tuple[Fraction, ...]
    reducer: NewtonReducer = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.f.n

    def element(self, k: int) -> LaurentPoly:
        return LaurentPoly.monomial(self.monomials[k])


@dataclass(frozen=True)
class SpectrumData:
    values: tuple[Fraction, ...]

    def multiplicities(self) -> dict[Fraction, int]:
        out: dict[Fraction, int] = {}
        for v in self.values:
            out[v] = out.get(v, 0) + 1
        return out


def monomial_basis(f: LaurentPoly, budget: int = 10**6, search: bool = True) -> JacobiBasis:
    red = NewtonReducer(f, budget=budget, search=search)
    return JacobiBasis(f, red.mu, red.monomials, red.alphas, red)


def spectrum(f: LaurentPoly) -> SpectrumData:
    """Graded dimensions of the Newton-filtered Jacobi algebra, as a multiset."""
    return SpectrumData(tuple(NewtonReducer(f, search=False).alphas))


# Jacobian ideal over Q[x] ----------------------------------------------------

class JacobianIdeal:
    """Generators ``u_i dF/du_i`` of ``F = f + sum x_j g_j`` with a reducer.

    ``F`` may carry parameter coefficients; it is split as ``f`` plus linear
    terms in ``x``.  Only deformations linear in ``x`` are supported.
    """

    def __init__(self, F: LaurentPoly, r: int = 0, budget: int = 10**6):
        self.F = F
        self.n = F.n
        self.r = r
        parts = split_parameters(F, r)
        zero = (0,) * r
        self.f = parts.get(zero, LaurentPoly(F.n))
        gs = []
        for j in range(r):
            ej = tuple(int(k == j) for k in range(r))
            gs.append(parts.get(ej, LaurentPoly(F.n)))
        for m in parts:
            if sum(m) > 1:
                raise ValueError("only deformations linear in the parameters are supported")
        self.gs = gs
        self.generators = [F.log_derivative(i) for i in range(1, F.n + 1)]
        self.basis = monomial_basis(self.f, budget=budget)
        self.reducer = self.basis.reducer
        self._gs = [_rational_terms(g) for g in gs]
        for g in gs:
            if not is_subdiagram(self.reducer.P, g):
                raise ValueError("deformation terms must be subdiagram monomials (Newton degree < 1)")
        self._groebner = None

    def expand(self, h: LaurentPoly) -> list[dict[XExp, list[Fraction]]]:
        """theta-expansion of ``[h du/u]``; entry p holds the theta^p coordinates."""
        return self.reducer.theta_expand(_param_split(h, self.r), self._gs)

    def normal_form_coords(self, h: LaurentPoly) -> dict[XExp, list[Fraction]]:
        exp = self.expand(h)
        return exp[0] if exp else {}

    def normal_form(self, h: LaurentPoly) -> LaurentPoly:
        coords = self.normal_form_coords(h)
        terms: dict[Exponent, object] = {}
        for k, e in enumerate(self.basis.monomials):
            px = {m: v[k] for m, v in coords.items() if v[k]}
            if not px:
                continue
            if self.r == 0:
                terms[e] = px[()]
            else:
                terms[e] = LaurentPoly(self.r, px, var="x")
        return LaurentPoly(self.n, terms)

    def groebner(self):
        """Reduced Groebner basis of the shifted, saturated polynomial ideal (sympy).

        Auxiliary data only: the reducer above does not use it.  Parameters
        are adjoined to the coefficient field.
        """
        if self._groebner is None:
            import sympy

            us = sympy.symbols(f"u1:{self.n + 1}")
            xs = sympy.symbols(f"x1:{self.r + 1}") if self.r else ()
            t = sympy.Symbol("t_sat")
            exprs = [_to_sympy_shifted(g, us, xs) for g in self.generators]
            prod = sympy.Mul(*us)
            exprs.append(t * prod - 1)
            domain = sympy.QQ.frac_field(*xs) if xs else sympy.QQ
            gb = sympy.groebner(exprs, t, *us, order="lex", domain=domain)
            self._groebner = [p for p in gb.exprs if not p.has(t)]
        return self._groebner


def _to_sympy_shifted(p: LaurentPoly, us, xs):
    import sympy

    shift = [min(e[i] for e in p.terms) for i in range(p.n)] if p.terms else [0] * p.n
    out = 0
    for e, c in p.terms.items():
        mono = sympy.Mul(*[u ** (a - s) for u, a, s in zip(us, e, shift)])
        out += _coeff_to_sympy(c, xs) * mono
    return sympy.expand(out)


def _coeff_to_sympy(c, xs):
    import sympy

    if isinstance(c, LaurentPoly):
        return sum(_coeff_to_sympy(v, xs) * sympy.Mul(*[x ** k for x, k in zip(xs, m)]) for m, v in c.terms.items())
    return sympy.Rational(c.numerator, c.denominator)


def _param_split(h: LaurentPoly, r: int) -> dict[XExp, Sparse]:
    return {m: dict(p.terms) for m, p in split_parameters(h, r).items() if p.terms}


def build_ideal(F: LaurentPoly, r: int = 0, budget: int = 10**6) -> JacobianIdeal:
    return JacobianIdeal(F, r, budget)


def normal_form(h: LaurentPoly, ideal: JacobianIdeal) -> LaurentPoly:
    return ideal.normal_form(h)


# matrices -------------------------------------------------------------------

PolyMatrix = list  # list of rows of dict[XExp, Fraction]


def coords_to_matrix_column(coords: dict[XExp, list[Fraction]], mu: int) -> list[dict[XExp, Fraction]]:
    return [{m: v[k] for m, v in coords.items() if v[k]} for k in range(mu)]


def multiplication_matrix(h: LaurentPoly, ideal: JacobianIdeal) -> PolyMatrix:
    """Matrix of multiplication by ``h`` on the Jacobi algebra of ``F`` over Q[x].

    Entries are dicts from x-exponents to rationals.  Column j holds the
    normal form of ``h * b_j``.
    """
    mu = ideal.basis.mu
    cols = []
    for e in ideal.basis.monomials:
        prod = h * LaurentPoly.monomial(e)
        cols.append(coords_to_matrix_column(ideal.normal_form_coords(prod), mu))
    for col in cols:
        for entry in col:
            for c in entry.values():
                if not isinstance(c, Fraction):
                    raise TypeError("matrix entry is not a polynomial over Q")
    return [[cols[j][i] for j in range(mu)] for i in range(mu)]


def constant_matrix(pm: PolyMatrix, r: int = 0) -> Matrix:
    z = (0,) * r
    return [[Fraction(e.get(z, 0)) for e in row] for row in pm]


def residue_pairing(basis: JacobiBasis) -> Matrix:
    """``g(b_i, b_j)`` = coefficient of the top basis element in ``b_i b_j``."""
    red = basis.reducer
    mu = basis.mu
    top = mu - 1
    if basis.alphas[top] != basis.n or (mu > 1 and basis.alphas[top - 1] == basis.n):
        raise SingularSystem("top spectral value is not simple and equal to n")
    g = [[Fraction(0)] * mu for _ in range(mu)]
    for i in range(mu):
        for j in range(i, mu):
            e = tuple(a + b for a, b in zip(basis.monomials[i], basis.monomials[j]))
            _, coords = red.divide({e: Fraction(1)})
            g[i][j] = g[j][i] = coords[top]
    if rank(g) != mu:
        raise SingularSystem("residue pairing is degenerate")
    return g


def point_birkhoff_defect(basis: JacobiBasis) -> list[str]:
    """Check ``theta^2 d/dtheta b_k = M_f b_k + theta alpha_k b_k`` in ``G_0``.

    Returns a list of human-readable failures (empty when the monomial basis
    solves the Birkhoff problem at the origin).
    """
    red = basis.reducer
    fails = []
    mf = None
    for k, e in enumerate(basis.monomials):
        h = {tuple(a + b for a, b in zip(e2, e)): c for e2, c in red._f.items()}
        exp = red.theta_expand({(): h})
        if len(exp) >= 2:
            theta1 = exp[1].get((), [Fraction(0)] * basis.mu)
        else:
            theta1 = [Fraction(0)] * basis.mu
        want = [basis.alphas[k] if j == k else Fraction(0) for j in range(basis.mu)]
        if theta1 != want:
            fails.append(f"theta^1 coefficient of f*b{k + 1} is {[str(v) for v in theta1]}")
        for p in range(2, len(exp)):
            v = exp[p].get((), None)
            if v and any(v):
                fails.append(f"f*b{k + 1} has a theta^{p} term")
    return fails
