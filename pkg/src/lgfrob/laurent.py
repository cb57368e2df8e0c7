"""Exact sparse Laurent polynomials over Q (or over a parameter ring Q[x]).

A :class:`LaurentPoly` maps integer exponent vectors to coefficients.  The
coefficients are :class:`fractions.Fraction` or, for deformations
``F = f + sum x_i g_i``, themselves :class:`LaurentPoly` objects in the
parameter variables ``x1..xr`` (with non-negative exponents).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Exponent = tuple[int, ...]
Coeff = Union[Fraction, "LaurentPoly"]


class ParseError(ValueError):
    """Malformed polynomial text; ``offset`` is the 0-based position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


def _is_zero(c) -> bool:
    return c == 0


def _order_key(e: Exponent):
    # graded-lex, largest first
    return (-sum(e), tuple(-a for a in e))


class LaurentPoly:
    """Immutable sparse Laurent polynomial in ``n`` variables."""

    __slots__ = ("n", "terms", "var", "_hash")

    def __init__(self, n: int, terms: Mapping[Exponent, Coeff] | None = None, var: str = "u"):
        if n < 0:
            raise ValueError("variable count must be non-negative")
        self.n = n
        self.var = var
        clean: dict[Exponent, Coeff] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(a) for a in e)
            if len(e) != n:
                raise ValueError(f"exponent {e} has length {len(e)}, expected {n}")
            if not isinstance(c, LaurentPoly):
                c = Fraction(c)
            if not _is_zero(c):
                clean[e] = c
        self.terms = clean
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, n: int, c=1, var: str = "u") -> "LaurentPoly":
        return cls(n, {(0,) * n: c}, var)

    @classmethod
    def monomial(cls, exp: Iterable[int], c=1, var: str = "u") -> "LaurentPoly":
        exp = tuple(exp)
        return cls(len(exp), {exp: c}, var)

    @classmethod
    def variable(cls, n: int, i: int, var: str = "u") -> "LaurentPoly":
        """The variable ``var{i}`` (1-based)."""
        if not 1 <= i <= n:
            raise IndexError(f"variable index {i} out of range 1..{n}")
        e = [0] * n
        e[i - 1] = 1
        return cls(n, {tuple(e): 1}, var)

    # basic protocol -------------------------------------------------------
    def __iter__(self) -> Iterator[tuple[Exponent, Coeff]]:
        return iter(sorted(self.terms.items(), key=lambda t: _order_key(t[0])))

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list[Exponent]:
        return sorted(self.terms, key=_order_key)

    def coeff(self, e: Exponent):
        return self.terms.get(tuple(e), Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.n, Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.terms
            return self.terms == {(0,) * self.n: Fraction(other)}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly) and other.var != self.var:
            return LaurentPoly.constant(self.n, other, self.var)
        if isinstance(other, LaurentPoly):
            if other.n != self.n:
                raise ValueError(f"variable-count mismatch: {self.n} vs {other.n}")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.constant(self.n, other, self.var)
        raise TypeError(f"cannot combine LaurentPoly with {type(other).__name__}")

    def __add__(self, other) -> "LaurentPoly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            out[e] = c if s is None else s + c
        return LaurentPoly(self.n, out, self.var)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.n, {e: -c for e, c in self.terms.items()}, self.var)

    def __sub__(self, other) -> "LaurentPoly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return LaurentPoly(self.n, {}, self.var)
            return LaurentPoly(self.n, {e: c * other for e, c in self.terms.items()}, self.var)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if other.var != self.var:
            # a parameter polynomial acting as a scalar coefficient
            return LaurentPoly(self.n, {e: c * other for e, c in self.terms.items()}, self.var)
        if other.n != self.n:
            raise ValueError(f"variable-count mismatch: {self.n} vs {other.n}")
        out: dict[Exponent, Coeff] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                s = out.get(e)
                out[e] = p if s is None else s + p
        return LaurentPoly(self.n, out, self.var)

    def __rmul__(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly) and other.var != self.var:
            return LaurentPoly(self.n, {e: other * c for e, c in self.terms.items()}, self.var)
        return self.__mul__(other)

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials can be inverted")
            (e, c), = self.terms.items()
            return LaurentPoly(self.n, {tuple(-a * -k for a in e): Fraction(1) / c ** -k}, self.var)
        out = LaurentPoly.constant(self.n, 1, self.var)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale_monomial(self, exp: Exponent) -> "LaurentPoly":
        """Multiply by ``var^exp``."""
        return LaurentPoly(
            self.n, {tuple(a + b for a, b in zip(e, exp)): c for e, c in self.terms.items()}, self.var
        )

    # calculus -------------------------------------------------------------
    def log_derivative(self, i: int) -> "LaurentPoly":
        """``u_i * d/du_i``: scales the term ``u^a`` by ``a_i``."""
        if not 1 <= i <= self.n:
            raise IndexError(f"variable index {i} out of range 1..{self.n}")
        return LaurentPoly(self.n, {e: c * e[i - 1] for e, c in self.terms.items()}, self.var)

    def derivative(self, i: int) -> "LaurentPoly":
        """Ordinary partial derivative in variable ``i`` (1-based)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"variable index {i} out of range 1..{self.n}")
        out = {}
        for e, c in self.terms.items():
            if e[i - 1]:
                f = list(e)
                f[i - 1] -= 1
                out[tuple(f)] = c * e[i - 1]
        return LaurentPoly(self.n, out, self.var)

    def integrate(self, i: int) -> "LaurentPoly":
        """Antiderivative in variable ``i`` vanishing on ``var_i = 0``."""
        out = {}
        for e, c in self.terms.items():
            if e[i - 1] == -1:
                raise ValueError("cannot integrate var^-1")
            f = list(e)
            f[i - 1] += 1
            out[tuple(f)] = c / f[i - 1]
        return LaurentPoly(self.n, out, self.var)

    def evaluate(self, point) -> Coeff:
        """Substitute rational values for all variables."""
        point = [Fraction(p) for p in point]
        if len(point) != self.n:
            raise ValueError("point has wrong length")
        total = Fraction(0)
        for e, c in self.terms.items():
            v = Fraction(1)
            for p, a in zip(point, e):
                v *= p ** a
            total = c * v + total
        return total

    def substitute(self, images: list["LaurentPoly"]) -> "LaurentPoly":
        """Substitute polynomials (all in a common ring) for the variables."""
        if len(images) != self.n:
            raise ValueError("need one image per variable")
        ring_n = images[0].n if images else 0
        var = images[0].var if images else self.var
        out = LaurentPoly(ring_n, {}, var)
        for e, c in self.terms.items():
            term = LaurentPoly.constant(ring_n, 1, var)
            for img, a in zip(images, e):
                if a:
                    term = term * img ** a
            out = out + term * c
        return out

    def map_coefficients(self, fn) -> "LaurentPoly":
        return LaurentPoly(self.n, {e: fn(c) for e, c in self.terms.items()}, self.var)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    # printing -------------------------------------------------------------
    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.n}, {str(self)!r})"


def _monomial_str(e: Exponent, var: str) -> str:
    parts = []
    for i, a in enumerate(e, start=1):
        if a == 0:
            continue
        parts.append(f"{var}{i}" if a == 1 else f"{var}{i}^{a}")
    return "*".join(parts)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_poly(p: LaurentPoly) -> str:
    """Canonical text form; parametric coefficients are expanded into products."""
    flat = _flatten_params(p)
    if not flat:
        return "0"
    out = []
    for (e, pe), c in flat:
        mono = "*".join(s for s in (_monomial_str(pe, "x"), _monomial_str(e, p.var)) if s)
        mag = abs(c)
        if not mono:
            body = format_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_rational(mag)}*{mono}"
        sign = "-" if c < 0 else "+"
        if not out:
            out.append(body if c > 0 else "-" + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def _flatten_params(p: LaurentPoly):
    rows = []
    for e, c in p.terms.items():
        if isinstance(c, LaurentPoly):
            for pe, pc in c.terms.items():
                rows.append(((e, pe), pc))
        else:
            rows.append(((e, ()), c))
    rows.sort(key=lambda t: (_order_key(t[0][0]), _order_key(t[0][1])))
    return rows


# parsing --------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, n: int, r: int, var: str, params: str):
        self.text = text
        self.n = n
        self.r = r
        self.var = var
        self.params = params
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _int(self) -> int:
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError("expected integer", self.pos)
        return int(self.text[start:self.pos])

    def _signed_int(self) -> int:
        sign = 1
        while self._peek() in "+-" and self._peek():
            if self.text[self.pos] == "-":
                sign = -sign
            self.pos += 1
        if self._peek() == "(":
            self.pos += 1
            v = self._signed_int()
            if self._peek() != ")":
                raise ParseError("expected ')'", self.pos)
            self.pos += 1
            return sign * v
        return sign * self._int()

    def parse(self) -> LaurentPoly:
        self._skip()
        if self.pos >= len(self.text):
            raise ParseError("empty input", self.pos)
        terms: dict = {}
        sign = 1
        if self._peek() in "+-":
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        while True:
            coeff, uexp, xexp = self._term()
            key = (uexp, xexp)
            terms[key] = terms.get(key, Fraction(0)) + sign * coeff
            ch = self._peek()
            if not ch:
                break
            if ch not in "+-":
                raise ParseError(f"unexpected character {ch!r}", self.pos)
            sign = -1 if ch == "-" else 1
            self.pos += 1
        return _assemble(terms, self.n, self.r, self.var)

    def _term(self):
        coeff = Fraction(1)
        uexp = [0] * self.n
        xexp = [0] * self.r
        seen = False
        if self._peek().isdigit():
            num = self._int()
            if self._peek() == "/":
                self.pos += 1
                den = self._int()
                if den == 0:
                    raise ParseError("zero denominator", self.pos)
                coeff = Fraction(num, den)
            else:
                coeff = Fraction(num)
            seen = True
            if self._peek() == "*":
                self.pos += 1
                if not self._peek().isalpha():
                    raise ParseError("expected monomial", self.pos)
        while self._peek().isalpha():
            start = self.pos
            name = self.text[self.pos]
            self.pos += 1
            if name not in (self.var, self.params):
                raise ParseError(f"unknown variable {name!r}", start)
            if not (self.pos < len(self.text) and self.text[self.pos].isdigit()):
                raise ParseError("expected variable index", self.pos)
            idx = self._int()
            bound = self.n if name == self.var else self.r
            if not 1 <= idx <= bound:
                raise ParseError(f"variable index {name}{idx} out of range 1..{bound}", start)
            power = 1
            if self._peek() == "^":
                self.pos += 1
                if not self._peek():
                    raise ParseError("expected exponent", self.pos)
                power = self._signed_int()
            if name == self.var:
                uexp[idx - 1] += power
            else:
                if power < 0:
                    raise ParseError("negative parameter exponent", start)
                xexp[idx - 1] += power
            seen = True
            if self._peek() == "*":
                self.pos += 1
                if not self._peek().isalpha():
                    if self._peek().isdigit():
                        raise ParseError("coefficient must lead the term", self.pos)
                    raise ParseError("expected monomial", self.pos)
        if not seen:
            raise ParseError("expected term", self.pos)
        return coeff, tuple(uexp), tuple(xexp)


def _assemble(terms: dict, n: int, r: int, var: str) -> LaurentPoly:
    if r == 0:
        return LaurentPoly(n, {u: c for (u, _), c in terms.items()}, var)
    grouped: dict[Exponent, dict] = {}
    for (u, x), c in terms.items():
        grouped.setdefault(u, {})
        grouped[u][x] = grouped[u].get(x, Fraction(0)) + c
    return LaurentPoly(n, {u: LaurentPoly(r, xs, "x") for u, xs in grouped.items()}, var)


def parse_laurent(text: str, n: int, r: int = 0, var: str = "u", params: str = "x") -> LaurentPoly:
    """Parse ``text`` into a Laurent polynomial in ``var1..var{n}``.

    With ``r > 0`` the parameters ``x1..xr`` may appear with non-negative
    exponents and the result has coefficients in Q[x].
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    return _Parser(text, n, r, var, params).parse()


def parse_param_poly(text: str, r: int) -> LaurentPoly:
    """Parse a polynomial in ``x1..xr`` (as written by :func:`format_poly`)."""
    return parse_laurent(text, r, 0, var="x", params="\0")


def add(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    return f + g


def mul(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    return f * g


def log_derivative(f: LaurentPoly, i: int) -> LaurentPoly:
    return f.log_derivative(i)


def deformation(f: LaurentPoly, gs: list[LaurentPoly]) -> LaurentPoly:
    """``F(u, x) = f(u) + sum_i x_i g_i(u)`` with coefficients in Q[x1..xr]."""
    r = len(gs)
    terms: dict[Exponent, LaurentPoly] = {}

    def bump(e, pe, c):
        cur = terms.get(e, LaurentPoly(r, {}, "x"))
        terms[e] = cur + LaurentPoly(r, {pe: c}, "x")

    for e, c in f.terms.items():
        bump(e, (0,) * r, c)
    for i, g in enumerate(gs):
        if g.n != f.n:
            raise ValueError("variable-count mismatch")
        pe = tuple(1 if j == i else 0 for j in range(r))
        for e, c in g.terms.items():
            bump(e, pe, c)
    return LaurentPoly(f.n, terms)


def specialize(F: LaurentPoly, a) -> LaurentPoly:
    """Evaluate the parameter coefficients of ``F`` at the point ``a``."""
    a = [Fraction(v) for v in a]
    return LaurentPoly(
        F.n,
        {e: (c.evaluate(a) if isinstance(c, LaurentPoly) else c) for e, c in F.terms.items()},
        F.var,
    )


def split_parameters(F: LaurentPoly, r: int) -> dict[Exponent, LaurentPoly]:
    """Write ``F = sum_m x^m F_m`` and return ``{m: F_m}`` with rational ``F_m``."""
    out: dict[Exponent, dict] = {}
    for e, c in F.terms.items():
        if isinstance(c, LaurentPoly):
            if c.n != r:
                raise ValueError("parameter count mismatch")
            for pe, pc in c.terms.items():
                out.setdefault(pe, {})[e] = pc
        else:
            out.setdefault((0,) * r, {})[e] = c
    return {m: LaurentPoly(F.n, t, F.var) for m, t in out.items()}
