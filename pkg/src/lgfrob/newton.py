"""Newton polyhedra of Laurent polynomials and the Newton filtration.

Everything is exact: facets come from brute-force enumeration of
supporting hyperplanes over the (small) support, and all support forms are
rational.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .laurent import Exponent, LaurentPoly
from .linalg import nullspace, rank


class NotConvenient(ValueError):
    """The origin is not an interior point of the Newton polyhedron."""


@dataclass(frozen=True)
class Facet:
    """A facet with support form normalized to 1 on the facet."""

    normal: tuple[Fraction, ...]
    points: frozenset[Exponent]

    def form(self, a) -> Fraction:
        return sum((w * x for w, x in zip(self.normal, a)), Fraction(0))


@dataclass(frozen=True)
class NewtonPolyhedron:
    n: int
    vertices: tuple[Exponent, ...]
    facets: tuple[Facet, ...]
    points: frozenset[Exponent]
    full_dimensional: bool
    origin_interior: bool

    def degree(self, a) -> Fraction:
        """Newton degree: the largest facet form evaluated at ``a``."""
        if not self.origin_interior:
            raise NotConvenient("Newton degree needs a convenient polyhedron")
        return max(fc.form(a) for fc in self.facets)

    def faces(self) -> list[frozenset[Exponent]]:
        """All proper faces (as sets of support points), largest first."""
        found: set[frozenset[Exponent]] = set()
        frontier = {fc.points for fc in self.facets}
        while frontier:
            found |= frontier
            nxt = set()
            for a, b in itertools.combinations(found, 2):
                c = a & b
                if c and c not in found:
                    nxt.add(c)
            frontier = nxt
        return sorted(found, key=lambda s: (-_affine_dim(s), sorted(s)))


def _affine_dim(points) -> int:
    pts = list(points)
    if len(pts) <= 1:
        return 0
    p0 = pts[0]
    return rank([[Fraction(a - b) for a, b in zip(p, p0)] for p in pts[1:]])


def _hull_facets(points: list[Exponent], n: int) -> list[Facet]:
    """Facets of conv(points) for a full-dimensional point set."""
    facets: dict[tuple, Facet] = {}
    if n == 1:
        lo, hi = min(p[0] for p in points), max(p[0] for p in points)
        out = []
        for v in (hi, lo):
            on = frozenset(p for p in points if p[0] == v)
            # an endpoint at 0 stays as a facet so the interior test sees it
            out.append(Facet((Fraction(1, v) if v else Fraction(1 if v == hi else -1),), on))
        return out
    for combo in itertools.combinations(points, n):
        p0 = combo[0]
        rows = [[Fraction(a - b) for a, b in zip(p, p0)] for p in combo[1:]]
        if rank(rows) != n - 1:
            continue
        ns = nullspace(rows, n)
        if len(ns) != 1:
            continue
        w = ns[0]
        c = sum((wi * pi for wi, pi in zip(w, p0)), Fraction(0))
        vals = [sum((wi * pi for wi, pi in zip(w, p)), Fraction(0)) for p in points]
        if all(v <= c for v in vals):
            pass
        elif all(v >= c for v in vals):
            w = [-wi for wi in w]
            c = -c
        else:
            continue
        on = frozenset(p for p, v in zip(points, vals) if v == (c if list(w) == list(ns[0]) else -c))
        if c == 0:
            facets[_canon_key(w, c)] = Facet(tuple(w), on)
            continue
        normal = tuple(wi / c for wi in w)
        facets[(normal, 1)] = Facet(normal, on)
    return list(facets.values())


def _canon_key(w, c):
    # scale so the first nonzero entry is +-1
    lead = next(x for x in w if x != 0)
    s = abs(lead)
    return (tuple(x / s for x in w), c / s)


def newton_polyhedron(f: LaurentPoly) -> NewtonPolyhedron:
    """Convex hull of ``supp(f)`` together with the origin."""
    if f.is_zero():
        raise ValueError("the zero polynomial has no Newton polyhedron")
    n = f.n
    pts = sorted(set(f.terms) | {(0,) * n})
    full = _affine_dim(pts) == n
    if not full:
        return NewtonPolyhedron(n, tuple(pts), (), frozenset(pts), False, False)
    facets = _hull_facets(pts, n)
    interior = bool(facets) and _origin_strictly_inside(pts, facets, n)
    verts = _vertices(pts, facets, n)
    return NewtonPolyhedron(n, tuple(sorted(verts)), tuple(sorted(facets, key=lambda f: f.normal)),
                            frozenset(pts), True, interior)


def _origin_strictly_inside(pts, facets, n) -> bool:
    # a facet through the origin would have been stored with offset 0 and its
    # points would include the origin
    origin = (0,) * n
    return all(origin not in fc.points for fc in facets)


def _vertices(pts, facets, n) -> set[Exponent]:
    verts = set()
    for p in pts:
        through = [fc for fc in facets if p in fc.points]
        if len(through) >= n:
            normals = [list(fc.normal) for fc in through]
            if rank(normals) == n:
                verts.add(p)
    return verts


def is_convenient(f: LaurentPoly) -> bool:
    """True iff the origin lies in the interior of the Newton polyhedron."""
    if f.is_zero():
        return False
    return newton_polyhedron(f).origin_interior


def _require_convenient(P: NewtonPolyhedron) -> None:
    if not P.origin_interior:
        raise NotConvenient("polynomial is not convenient (0 is not interior to its Newton polyhedron)")


def newton_degree(P: NewtonPolyhedron, a) -> Fraction:
    _require_convenient(P)
    return P.degree(a)


# volume ---------------------------------------------------------------------

def _cross2(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull2(points) -> list:
    """Counter-clockwise convex hull (Andrew's monotone chain), exact."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross2(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross2(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _area2(poly) -> Fraction:
    s = Fraction(0)
    for (x0, y0), (x1, y1) in zip(poly, poly[1:] + poly[:1]):
        s += Fraction(x0) * y1 - Fraction(x1) * y0
    return abs(s) / 2


def _det3(a, b, c) -> Fraction:
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def volume(P: NewtonPolyhedron) -> Fraction:
    """Exact Euclidean volume (n <= 3)."""
    _require_convenient(P)
    pts = list(P.points)
    if P.n == 1:
        xs = [p[0] for p in pts]
        return Fraction(max(xs) - min(xs))
    if P.n == 2:
        return _area2(_hull2(pts))
    if P.n == 3:
        total = Fraction(0)
        for fc in P.facets:
            poly = _facet_polygon(fc)
            p0 = poly[0]
            for p1, p2 in zip(poly[1:], poly[2:]):
                total += abs(Fraction(_det3(p0, p1, p2))) / 6
        return total
    raise NotImplementedError("volume is implemented for n <= 3")


def _facet_polygon(fc: Facet) -> list[Exponent]:
    pts = sorted(fc.points)
    p0 = pts[0]
    e1 = next(tuple(a - b for a, b in zip(p, p0)) for p in pts[1:])
    w = fc.normal
    e2 = (w[1] * e1[2] - w[2] * e1[1], w[2] * e1[0] - w[0] * e1[2], w[0] * e1[1] - w[1] * e1[0])
    coords = {}
    for p in pts:
        d = tuple(a - b for a, b in zip(p, p0))
        coords[(sum(Fraction(x) * y for x, y in zip(d, e1)), sum(Fraction(x) * y for x, y in zip(d, e2)))] = p
    hull = _hull2(list(coords))
    return [coords[c] for c in hull]


def milnor_number(P: NewtonPolyhedron) -> int:
    """Kouchnirenko's global Milnor number ``n! * Vol``."""
    v = volume(P) * math.factorial(P.n)
    if v.denominator != 1:
        raise ArithmeticError(f"non-integral normalized volume {v}")
    return int(v)


# lattice points -------------------------------------------------------------

def lattice_points_upto(P: NewtonPolyhedron, beta, strict: bool = False) -> list[Exponent]:
    """Lattice points with Newton degree ``<= beta`` (``< beta`` if strict)."""
    _require_convenient(P)
    beta = Fraction(beta)
    if beta < 0:
        return []
    ranges = []
    for i in range(P.n):
        lo = min(v[i] for v in P.vertices)
        hi = max(v[i] for v in P.vertices)
        ranges.append(range(math.floor(beta * lo), math.ceil(beta * hi) + 1))
    out = []
    for a in itertools.product(*ranges):
        d = P.degree(a)
        if d < beta or (d == beta and not strict):
            out.append(a)
    return sorted(out, key=lambda a: (P.degree(a), tuple(-x for x in a)))


def subdiagram_monomials(P: NewtonPolyhedron) -> list[Exponent]:
    """Lattice points of Newton degree < 1, ordered by degree then descending lex."""
    return lattice_points_upto(P, 1, strict=True)


def is_subdiagram(P: NewtonPolyhedron, g: LaurentPoly) -> bool:
    return all(P.degree(e) < 1 for e in g.terms)


# nondegeneracy --------------------------------------------------------------

@dataclass(frozen=True)
class NondegeneracyReport:
    verdict: str  # NondegenerateExact | NondegenerateProbabilistic | DegenerateWitness | Unknown
    face: tuple[Exponent, ...] | None = None
    point: tuple[Fraction, ...] | None = None
    witness: str | None = None
    trials: int = 0
    primes: tuple[int, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return self.verdict.startswith("Nondegenerate")


def face_polynomial(f: LaurentPoly, face) -> LaurentPoly:
    return LaurentPoly(f.n, {e: c for e, c in f.terms.items() if e in face}, f.var)


def _univariate_gcd(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    """gcd of dense coefficient lists (index = degree), monic."""

    def trim(a):
        a = list(a)
        while a and a[-1] == 0:
            a.pop()
        return a

    a, b = trim(p), trim(q)
    while b:
        r = list(a)
        while len(r) >= len(b) and r:
            fac = r[-1] / b[-1]
            shift = len(r) - len(b)
            for i, c in enumerate(b):
                r[i + shift] -= fac * c
            r = trim(r)
        a, b = b, r
    return [c / a[-1] for c in a] if a else a


def _rational_roots(p: list[Fraction]) -> list[Fraction]:
    lcm = 1
    for c in p:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in p]
    while ints and ints[0] == 0:
        ints = ints[1:]
    if len(ints) < 2:
        return []

    def divisors(k):
        k = abs(k)
        return [d for d in range(1, k + 1) if k % d == 0]

    roots = []
    for num in divisors(ints[0]):
        for den in divisors(ints[-1]):
            for s in (1, -1):
                x = Fraction(s * num, den)
                if sum(c * x ** i for i, c in enumerate(ints)) == 0 and x not in roots:
                    roots.append(x)
    return sorted(roots)


def collinear_face_critical_point(face_poly: LaurentPoly):
    """Torus critical point of a face polynomial with collinear support.

    Returns ``None`` if there is none, otherwise ``(point, witness)`` where
    ``point`` is a rational torus point (or ``None`` if the critical value is
    irrational) and ``witness`` the repeated factor as text.
    """
    sup = sorted(face_poly.terms)
    if len(sup) <= 1:
        return None
    n = face_poly.n
    p0 = sup[0]
    diffs = [tuple(a - b for a, b in zip(p, p0)) for p in sup[1:]]
    g = 0
    for x in diffs[-1]:
        g = math.gcd(g, x)
    v = tuple(x // g for x in diffs[-1])
    coeffs: dict[int, Fraction] = {}
    for p in sup:
        d = tuple(a - b for a, b in zip(p, p0))
        k = next(d[i] // v[i] for i in range(n) if v[i])
        if any(d[i] != k * v[i] for i in range(n)):
            raise ValueError("face support is not collinear")
        coeffs[k] = face_poly.terms[p]
    deg = max(coeffs)
    poly = [coeffs.get(k, Fraction(0)) for k in range(deg + 1)]
    dpoly = [k * c for k, c in enumerate(poly)][1:]
    h = _univariate_gcd(poly, dpoly)
    while len(h) > 1 and h[0] == 0:
        h = h[1:]
    if len(h) <= 1:
        return None
    roots = [s for s in _rational_roots(h) if s != 0]
    witness = " + ".join(f"({c})*s^{i}" for i, c in enumerate(h) if c)
    if not roots:
        return None, witness
    s0 = roots[0]
    # u with u^v = s0 through a Bezout combination of the entries of v
    coef = _bezout(v)
    point = tuple(s0 ** c for c in coef)
    return point, witness


def _bezout(v) -> list[int]:
    coef = [0] * len(v)
    g = 0
    for i, x in enumerate(v):
        if x == 0:
            continue
        if g == 0:
            g = x
            coef = [0] * len(v)
            coef[i] = 1
            continue
        d, s, t = _egcd(g, x)
        coef = [c * s for c in coef]
        coef[i] = t
        g = d
    if g < 0:
        coef = [-c for c in coef]
    return coef


def _egcd(a, b):
    if b == 0:
        return a, 1, 0
    d, s, t = _egcd(b, a % b)
    return d, t, s - (a // b) * t


def _torus_unit_ideal(polys: list[LaurentPoly], modulus: int | None = None) -> bool:
    """True iff the polys have no common zero on the torus (over the algebraic closure)."""
    import sympy

    n = polys[0].n
    us = sympy.symbols(f"u1:{n + 1}")
    t = sympy.Symbol("t_sat")
    exprs = []
    for p in polys:
        shift = [min(e[i] for e in p.terms) for i in range(n)] if p.terms else [0] * n
        e = 0
        for ex, c in p.terms.items():
            mono = sympy.Integer(1)
            for u, a, s in zip(us, ex, shift):
                mono *= u ** (a - s)
            e += sympy.Rational(c.numerator, c.denominator) * mono
        if e != 0:
            exprs.append(sympy.expand(e))
    prod = sympy.Integer(1)
    for u in us:
        prod *= u
    exprs.append(t * prod - 1)
    kw = {"modulus": modulus} if modulus else {}
    gb = sympy.groebner(exprs, *us, t, order="grevlex", **kw)
    return list(gb.exprs) == [1]


def is_nondegenerate(f: LaurentPoly, trials: int = 32, seed: int = 0, exact: bool = False) -> NondegeneracyReport:
    """Kouchnirenko nondegeneracy: no boundary face part has a torus critical point.

    Edges are decided exactly (gcd and rational roots).  Faces of dimension
    two or more use a Groebner basis over F_p for ``trials`` random primes,
    or over Q when ``exact`` is set.
    """
    P = newton_polyhedron(f)
    _require_convenient(P)
    rng = random.Random(seed)
    probabilistic = False
    primes: list[int] = []
    for face in P.faces():
        fp = face_polynomial(f, face)
        if len(fp) <= 1:
            continue
        dim = _affine_dim(fp.terms)
        if dim == 1:
            hit = collinear_face_critical_point(fp)
            if hit is not None:
                point, witness = hit
                return NondegeneracyReport("DegenerateWitness", tuple(sorted(face)), point, witness)
            continue
        gens = [fp.log_derivative(i) for i in range(1, f.n + 1)]
        if exact:
            if not _torus_unit_ideal(gens):
                return NondegeneracyReport("DegenerateWitness", tuple(sorted(face)), None,
                                           "torus critical locus is nonempty (Groebner basis != [1])")
        elif trials > 0:
            probabilistic = True
            for _ in range(trials):
                p = _random_prime(rng)
                primes.append(p)
                if not _torus_unit_ideal(gens, modulus=p):
                    return NondegeneracyReport("DegenerateWitness", tuple(sorted(face)), None,
                                               f"critical locus nonempty modulo {p}")
        else:
            return NondegeneracyReport("Unknown", tuple(sorted(face)))
    if probabilistic:
        return NondegeneracyReport("NondegenerateProbabilistic", trials=trials, primes=tuple(primes))
    return NondegeneracyReport("NondegenerateExact")


def _random_prime(rng: random.Random) -> int:
    while True:
        p = rng.randrange(10_007, 1_000_000)
        if all(p % d for d in range(2, int(p ** 0.5) + 1)):
            return p


@lru_cache(maxsize=None)
def _cached_polyhedron(key) -> NewtonPolyhedron:
    n, terms = key
    return newton_polyhedron(LaurentPoly(n, dict(terms)))


def polyhedron_of(f: LaurentPoly) -> NewtonPolyhedron:
    """Memoized :func:`newton_polyhedron` (parameter coefficients are ignored)."""
    support = tuple(sorted((e, Fraction(1)) for e in f.terms))
    return _cached_polyhedron((f.n, support))
