"""Sparse matrix-valued polynomials and truncated power series over Q.

A :class:`MatSeries` maps exponent tuples (in ``nvars`` variables) to
``rows x cols`` numpy object arrays of :class:`Fraction`.  Truncation is by
the total degree in a chosen subset of the variables, so one type serves
both "polynomial in x, series in y" and plain truncated germs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from gmpy2 import mpq

Exp = tuple

# Products run on gmpy2 rationals (about ten times faster than Fraction in
# object-array dot products); stored coefficients stay Fraction.
_to_fast = np.frompyfunc(mpq, 1, 1)
_to_frac = np.frompyfunc(lambda q: Fraction(int(q.numerator), int(q.denominator)), 1, 1)


def fmat(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out.fill(Fraction(0))
    return out


def to_array(m) -> np.ndarray:
    a = np.array([[Fraction(v) for v in row] for row in m], dtype=object)
    if a.ndim != 2:
        a = a.reshape(len(m), -1)
    return a


def is_zero_array(a: np.ndarray) -> bool:
    return not any(v != 0 for v in a.flat)


class Truncation:
    """Keep exponents whose degree in ``mask`` variables is at most ``order``."""

    def __init__(self, mask: Sequence[bool], order: int | None):
        self.mask = tuple(bool(b) for b in mask)
        self.order = order

    def degree(self, e: Exp) -> int:
        return sum(a for a, b in zip(e, self.mask) if b)

    def keeps(self, e: Exp) -> bool:
        return self.order is None or self.degree(e) <= self.order


NO_TRUNCATION = None


class MatSeries:
    __slots__ = ("nvars", "shape", "terms")

    def __init__(self, nvars: int, shape: tuple[int, int], terms: dict | None = None):
        self.nvars = nvars
        self.shape = shape
        self.terms: dict[Exp, np.ndarray] = {}
        for e, a in (terms or {}).items():
            if not is_zero_array(a):
                self.terms[tuple(e)] = a

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, shape) -> "MatSeries":
        return cls(nvars, tuple(shape))

    @classmethod
    def constant(cls, nvars: int, m) -> "MatSeries":
        a = m if isinstance(m, np.ndarray) else to_array(m)
        return cls(nvars, a.shape, {(0,) * nvars: a})

    @classmethod
    def identity(cls, nvars: int, size: int) -> "MatSeries":
        a = fmat(size, size)
        for i in range(size):
            a[i, i] = Fraction(1)
        return cls.constant(nvars, a)

    @classmethod
    def from_entries(cls, nvars: int, entries: Sequence[Sequence[dict]]) -> "MatSeries":
        """From a dense matrix whose entries are dicts ``exponent -> Fraction``."""
        rows, cols = len(entries), len(entries[0]) if entries else 0
        terms: dict[Exp, np.ndarray] = {}
        for i, row in enumerate(entries):
            for j, poly in enumerate(row):
                for e, c in poly.items():
                    if c:
                        a = terms.get(e)
                        if a is None:
                            a = terms[e] = fmat(rows, cols)
                        a[i, j] += Fraction(c)
        return cls(nvars, (rows, cols), terms)

    def entries(self) -> list[list[dict]]:
        rows, cols = self.shape
        out = [[{} for _ in range(cols)] for _ in range(rows)]
        for e, a in sorted(self.terms.items()):
            for i in range(rows):
                for j in range(cols):
                    if a[i, j] != 0:
                        out[i][j][e] = a[i, j]
        return out

    def entry(self, i: int, j: int) -> dict:
        return {e: a[i, j] for e, a in self.terms.items() if a[i, j] != 0}

    def copy(self) -> "MatSeries":
        return MatSeries(self.nvars, self.shape, {e: a.copy() for e, a in self.terms.items()})

    # algebra --------------------------------------------------------------
    def __add__(self, other: "MatSeries") -> "MatSeries":
        out = {e: a.copy() for e, a in self.terms.items()}
        for e, a in other.terms.items():
            if e in out:
                out[e] = out[e] + a
            else:
                out[e] = a.copy()
        return MatSeries(self.nvars, self.shape, out)

    def __neg__(self) -> "MatSeries":
        return MatSeries(self.nvars, self.shape, {e: -a for e, a in self.terms.items()})

    def __sub__(self, other: "MatSeries") -> "MatSeries":
        return self + (-other)

    def scale(self, c) -> "MatSeries":
        c = Fraction(c)
        return MatSeries(self.nvars, self.shape, {e: a * c for e, a in self.terms.items()})

    def matmul(self, other: "MatSeries", trunc: Truncation | None = None) -> "MatSeries":
        out: dict[Exp, np.ndarray] = {}
        fast_other = [(e2, _to_fast(b)) for e2, b in other.terms.items()]
        for e1, a in self.terms.items():
            fa = _to_fast(a)
            for e2, b in fast_other:
                e = tuple(x + y for x, y in zip(e1, e2))
                if trunc is not None and not trunc.keeps(e):
                    continue
                p = fa.dot(b)
                if e in out:
                    out[e] += p
                else:
                    out[e] = p
        return MatSeries(self.nvars, (self.shape[0], other.shape[1]), {e: _to_frac(a) for e, a in out.items()})

    __matmul__ = matmul

    def left_const(self, m: np.ndarray) -> "MatSeries":
        fm = _to_fast(m)
        return MatSeries(self.nvars, (m.shape[0], self.shape[1]),
                         {e: _to_frac(fm.dot(_to_fast(a))) for e, a in self.terms.items()})

    def right_const(self, m: np.ndarray) -> "MatSeries":
        fm = _to_fast(m)
        return MatSeries(self.nvars, (self.shape[0], m.shape[1]),
                         {e: _to_frac(_to_fast(a).dot(fm)) for e, a in self.terms.items()})

    def transpose(self) -> "MatSeries":
        return MatSeries(self.nvars, (self.shape[1], self.shape[0]), {e: a.T.copy() for e, a in self.terms.items()})

    def truncate(self, trunc: Truncation) -> "MatSeries":
        return MatSeries(self.nvars, self.shape, {e: a for e, a in self.terms.items() if trunc.keeps(e)})

    def part(self, pred: Callable[[Exp], bool]) -> "MatSeries":
        return MatSeries(self.nvars, self.shape, {e: a for e, a in self.terms.items() if pred(e)})

    def homogeneous(self, d: int, mask: Sequence[bool] | None = None) -> "MatSeries":
        mask = mask or (True,) * self.nvars
        return self.part(lambda e: sum(a for a, b in zip(e, mask) if b) == d)

    def derivative(self, i: int) -> "MatSeries":
        out = {}
        for e, a in self.terms.items():
            if e[i]:
                e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[e2] = a * e[i]
        return MatSeries(self.nvars, self.shape, out)

    def multiply_variable(self, i: int) -> "MatSeries":
        out = {}
        for e, a in self.terms.items():
            out[e[:i] + (e[i] + 1,) + e[i + 1:]] = a
        return MatSeries(self.nvars, self.shape, out)

    def scale_by_degree(self, fn: Callable[[Exp], Fraction]) -> "MatSeries":
        out = {}
        for e, a in self.terms.items():
            c = fn(e)
            if c:
                out[e] = a * Fraction(c)
        return MatSeries(self.nvars, self.shape, out)

    def constant_term(self) -> np.ndarray:
        z = (0,) * self.nvars
        return self.terms[z].copy() if z in self.terms else fmat(*self.shape)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatSeries):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("MatSeries is not hashable")

    def max_degree(self, mask: Sequence[bool] | None = None) -> int:
        mask = mask or (True,) * self.nvars
        return max((sum(a for a, b in zip(e, mask) if b) for e in self.terms), default=-1)

    # variable manipulation -----------------------------------------------
    def extend_vars(self, extra: int) -> "MatSeries":
        return MatSeries(self.nvars + extra, self.shape, {e + (0,) * extra: a for e, a in self.terms.items()})

    def restrict_vars(self, keep: int) -> "MatSeries":
        """Set every variable past index ``keep`` to zero."""
        out = {}
        for e, a in self.terms.items():
            if any(e[keep:]):
                continue
            out[e[:keep]] = a
        return MatSeries(keep, self.shape, out)

    def evaluate(self, point: Sequence) -> np.ndarray:
        out = fmat(*self.shape)
        for e, a in self.terms.items():
            c = Fraction(1)
            for v, k in zip(point, e):
                c *= Fraction(v) ** k
            if c:
                out = out + a * c
        return out

    def substitute_linear(self, images: Sequence[dict], trunc: Truncation | None = None,
                          nvars: int | None = None) -> "MatSeries":
        """Replace variable ``k`` by the polynomial ``images[k]`` (dict exponent -> Fraction)."""
        nv = nvars if nvars is not None else self.nvars
        powers: dict[tuple[int, int], dict] = {}

        def pmul(p, q):
            out = {}
            for e1, c1 in p.items():
                for e2, c2 in q.items():
                    e = tuple(x + y for x, y in zip(e1, e2))
                    if trunc is not None and not trunc.keeps(e):
                        continue
                    out[e] = out.get(e, 0) + c1 * c2
            return {e: c for e, c in out.items() if c}

        def power(k, j):
            key = (k, j)
            if key not in powers:
                powers[key] = {(0,) * nv: Fraction(1)} if j == 0 else pmul(power(k, j - 1), images[k])
            return powers[key]

        out: dict[Exp, np.ndarray] = {}
        for e, a in self.terms.items():
            poly = {(0,) * nv: Fraction(1)}
            for k, j in enumerate(e):
                if j:
                    poly = pmul(poly, power(k, j))
            for e2, c in poly.items():
                if e2 in out:
                    out[e2] = out[e2] + a * c
                else:
                    out[e2] = a * c
        return MatSeries(nv, self.shape, out)

    def translate(self, shift: Sequence) -> "MatSeries":
        """``M(x) -> M(x + shift)`` (exact for polynomials)."""
        nv = self.nvars
        images = []
        for k in range(nv):
            img = {tuple(int(i == k) for i in range(nv)): Fraction(1)}
            if shift[k]:
                img[(0,) * nv] = Fraction(shift[k])
            images.append(img)
        return self.substitute_linear(images)

    def __repr__(self) -> str:
        return f"MatSeries(nvars={self.nvars}, shape={self.shape}, terms={len(self.terms)})"


def commutator(a: MatSeries, b: MatSeries, trunc: Truncation | None = None) -> MatSeries:
    return a.matmul(b, trunc) - b.matmul(a, trunc)


def inverse_series(a: MatSeries, trunc: Truncation) -> MatSeries:
    """Inverse of ``a`` (invertible constant term) truncated by ``trunc``."""
    from .linalg import inverse

    a0 = a.constant_term()
    a0inv = to_array(inverse([list(r) for r in a0]))
    rest = a - MatSeries.constant(a.nvars, a0)
    # a^-1 = (I + a0^-1 rest)^-1 a0^-1 via Neumann series
    n = a.shape[0]
    step = rest.left_const(a0inv)
    out = MatSeries.identity(a.nvars, n)
    term = MatSeries.identity(a.nvars, n)
    while True:
        term = (-term).matmul(step, trunc)
        if term.is_zero():
            break
        out = out + term
    return out.right_const(a0inv)


def poly_mul(p: dict, q: dict, trunc: Truncation | None = None) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            if trunc is not None and not trunc.keeps(e):
                continue
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def poly_add(p: dict, q: dict, c=1) -> dict:
    out = dict(p)
    for e, v in q.items():
        w = out.get(e, 0) + c * v
        if w:
            out[e] = w
        else:
            out.pop(e, None)
    return out
