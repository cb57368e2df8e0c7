"""Exact dense linear algebra over Q on lists of :class:`Fraction` rows."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


class SingularSystem(ArithmeticError):
    """Raised when a linear system has no (unique) solution."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def zeros(m: int, n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(m)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(row) for row in a]
    pivots: list[int] = []
    rows = len(m)
    cols = len(m[0]) if m else 0
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                fac = m[i][c]
                m[i] = [x - fac * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def nullspace(a: Matrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{z : a z = 0}``."""
    ncols = ncols if ncols is not None else (len(a[0]) if a else 0)
    if not a:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    e, piv = rref(a)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for fc in free:
        z = [Fraction(0)] * ncols
        z[fc] = Fraction(1)
        for row, pc in zip(e, piv):
            z[pc] = -row[fc]
        basis.append(z)
    return basis


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    e, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise SingularSystem("matrix is singular")
    return [row[n:] for row in e]


def det(a: Matrix) -> Fraction:
    m = [list(row) for row in a]
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            out = -out
        out *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                fac = m[i][c] * inv
                m[i] = [x - fac * y for x, y in zip(m[i], m[c])]
    return out


class LinearSolver:
    """Factor ``a`` once, then solve ``a z = h`` for many right-hand sides.

    Free variables are set to zero, so the returned solution is a fixed
    linear function of ``h``.
    """

    def __init__(self, a: Matrix):
        self.rows = len(a)
        self.cols = len(a[0]) if a else 0
        aug = [list(row) + [Fraction(int(i == j)) for j in range(self.rows)] for i, row in enumerate(a)]
        e, piv = rref(aug)
        self.pivots = [p for p in piv if p < self.cols]
        k = len(self.pivots)
        self.rank = k
        # rows of the transform P with P a = E
        self._solve_rows = [row[self.cols:] for row in e[:k]]
        self._check_rows = [row[self.cols:] for row in e[k:]]
        self._check_rows = [r for r in self._check_rows if any(r)]

    def consistent(self, h: Sequence[Fraction]) -> bool:
        return all(sum((p * v for p, v in zip(row, h) if p), Fraction(0)) == 0 for row in self._check_rows)

    def solve(self, h: Sequence[Fraction]) -> list[Fraction]:
        if not self.consistent(h):
            raise SingularSystem("right-hand side not in the column space")
        z = [Fraction(0)] * self.cols
        for pc, row in zip(self.pivots, self._solve_rows):
            z[pc] = sum((p * v for p, v in zip(row, h) if p), Fraction(0))
        return z


def solve(a: Matrix, h: Sequence[Fraction]) -> list[Fraction]:
    return LinearSolver(a).solve(h)
