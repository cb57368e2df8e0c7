"""Shipped example Laurent polynomials (n = 1, 2) with a few deformations each."""

from __future__ import annotations

from dataclasses import dataclass, field

from .laurent import LaurentPoly, parse_laurent


@dataclass(frozen=True)
class Example:
    name: str
    text: str
    n: int
    mu: int
    # injective deformations that are not good-maximal, as polynomial strings
    other_deformations: tuple[tuple[str, ...], ...] = field(default=())

    def f(self) -> LaurentPoly:
        return parse_laurent(self.text, self.n)

    def deformation_polys(self, gs: tuple[str, ...]) -> list[LaurentPoly]:
        return [parse_laurent(g, self.n) for g in gs]


CORPUS: tuple[Example, ...] = (
    Example("P1 mirror", "u1+u1^-1", 1, 2, (("2",),)),
    Example("P(1,2) mirror", "u1+u1^-2", 1, 3, (("2",), ("u1^-1",))),
    Example("u^2+u^-2", "u1^2+u1^-2", 1, 4, (("1", "u1+u1^-1", "u1-u1^-1"), ("u1",))),
    Example("u^3+u^-3", "u1^3+u1^-3", 1, 6, (("2",), ("u1^-1",))),
    Example("P2 mirror", "u1+u2+u1^-1*u2^-1", 2, 3, (("3",),)),
    Example("P1xP1 mirror", "u1+u2+u1^-1+u2^-1", 2, 4, (("2",),)),
    Example("P(1,1,2) mirror", "u1+u2+u1^-2*u2^-1", 2, 4, (("2",),)),
    Example("dP1-type", "u1+u2+u1^-1*u2^-1+u1^-1", 2, 4, (("2",),)),
    Example("quadratic P2 cover", "u1^2+u2^2+u1^-1*u2^-1", 2, 8, (("2",), ("u1", "u2"))),
)


def by_name(name: str) -> Example:
    for ex in CORPUS:
        if ex.name == name:
            return ex
    raise KeyError(name)
