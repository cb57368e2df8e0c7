"""Brute-force oracles kept apart from the main pipeline.

Jacobi dimensions come from ranks of explicit relation matrices on monomial
boxes (sympy's ``DomainMatrix`` over QQ, no Groebner bases and none of the
filtered reduction used elsewhere).  The plane-curve counts come from the
classical associativity recursion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .laurent import LaurentPoly
from .newton import polyhedron_of


class OracleDidNotStabilize(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    value: int | Fraction
    method: str
    certificate: dict = field(default_factory=dict, compare=False)


def _box(n: int, b: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(-b, b + 1), repeat=n))


def _relations(f: LaurentPoly, B: int) -> tuple[list[dict], list[tuple[int, ...]]]:
    """Rows ``u^c * u_i df/du_i`` supported in ``[-B, B]^n``, and the box monomials."""
    n = f.n
    ders = []
    for i in range(n):
        d = {e: c * e[i] for e, c in f.terms.items() if e[i]}
        ders.append(d)
    s = max(max(abs(x) for x in e) for e in f.terms)
    rows = []
    for c in _box(n, B + s):
        for d in ders:
            row = {}
            ok = True
            for e, v in d.items():
                m = tuple(a + b for a, b in zip(c, e))
                if max(abs(x) for x in m) > B:
                    ok = False
                    break
                row[m] = v
            if ok and row:
                rows.append(row)
    return rows, _box(n, B)


def _rank(rows: list[dict], columns: list) -> int:
    if not rows or not columns:
        return 0
    idx = {m: j for j, m in enumerate(columns)}
    sparse = {}
    for i, row in enumerate(rows):
        entries = {idx[m]: QQ(v.numerator, v.denominator) for m, v in row.items() if m in idx}
        if entries:
            sparse[i] = entries
    if not sparse:
        return 0
    return DomainMatrix(sparse, (len(rows), len(columns)), QQ).rank()


def _image_dim(rows, monos, inner) -> int:
    """dim of span(inner) modulo span(rows), inside span(monos)."""
    inner = set(inner)
    outside = [m for m in monos if m not in inner]
    # dim(R cap span(inner)) = rank R - rank(R restricted to the other coordinates)
    return len(inner) - (_rank(rows, monos) - _rank(rows, outside))


def jacobi_dim_bruteforce(f: LaurentPoly, box: int | None = None, max_box: int = 8) -> OracleResult:
    """Dimension of the Jacobi algebra by box ranks.

    For inner box ``b`` and relation box ``B = 2b + s`` this is the dimension
    of the image of the monomials in ``[-b, b]^n`` modulo the relations found
    inside ``[-B, B]^n``.  Without ``box`` the inner box grows until two
    consecutive values agree.
    """
    s = max(max(abs(x) for x in e) for e in f.terms)
    sizes = [box] if box is not None else range(1, max_box + 1)
    prev = None
    history = []
    for b in sizes:
        B = 2 * b + s
        rows, monos = _relations(f, B)
        v = _image_dim(rows, monos, _box(f.n, b))
        history.append((b, v))
        if box is not None or v == prev:
            return OracleResult(v, "box-rank", {"boxes": history, "relations": len(rows)})
        prev = v
    raise OracleDidNotStabilize(f"no stabilization up to box {max_box}: {history}")


def graded_dim_bruteforce(f: LaurentPoly, alpha, box: int | None = None, max_extra: int = 6) -> OracleResult:
    """``dim N_alpha / (I cap N_alpha + N_<alpha)`` with ``I`` truncated to a box."""
    alpha = Fraction(alpha)
    P = polyhedron_of(f)
    n = f.n
    s = max(max(abs(x) for x in e) for e in f.terms)
    # N_alpha is finite; find a box containing it
    reach = 1
    while any(P.degree(m) <= alpha for m in _box(n, reach) if max(abs(x) for x in m) == reach):
        reach += 1
    sizes = [box] if box is not None else range(reach + s, reach + s + max_extra)
    prev = None
    history = []
    for B in sizes:
        rows, monos = _relations(f, B)
        deg = {m: P.degree(m) for m in monos}
        level = [m for m in monos if deg[m] == alpha]
        above_lt = [m for m in monos if deg[m] >= alpha]
        above_le = [m for m in monos if deg[m] > alpha]
        v = len(level) - (_rank(rows, above_lt) - _rank(rows, above_le))
        history.append((B, v))
        if box is not None or v == prev:
            return OracleResult(v, "filtered-box-rank", {"boxes": history})
        prev = v
    raise OracleDidNotStabilize(f"no stabilization: {history}")


def spectrum_bruteforce(f: LaurentPoly, mu: int | None = None) -> list[Fraction]:
    """Spectrum from graded dimensions at every Newton degree in ``[0, n]``."""
    P = polyhedron_of(f)
    n = f.n
    levels = set()
    b = 1
    while True:
        ring = [m for m in _box(n, b) if max(abs(x) for x in m) == b]
        new = {P.degree(m) for m in ring if P.degree(m) <= n}
        if not new:
            break
        levels |= new
        b += 1
    levels.add(Fraction(0))
    out = []
    for a in sorted(levels):
        out += [a] * graded_dim_bruteforce(f, a).value
    if mu is not None and len(out) != mu:
        raise OracleDidNotStabilize(f"graded dimensions sum to {len(out)}, expected {mu}")
    return out


@lru_cache(maxsize=None)
def kontsevich_Nd(d: int) -> int:
    """Number of rational plane curves of degree ``d`` through ``3d - 1`` general points."""
    if d < 1:
        raise ValueError("degree must be positive")
    if d == 1:
        return 1
    total = 0
    for d1 in range(1, d):
        d2 = d - d1
        total += kontsevich_Nd(d1) * kontsevich_Nd(d2) * (
            d1 * d1 * d2 * d2 * comb(3 * d - 4, 3 * d1 - 2) - d1 ** 3 * d2 * comb(3 * d - 4, 3 * d1 - 1))
    return total
