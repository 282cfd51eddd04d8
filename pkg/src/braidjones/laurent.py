"""Exact Laurent polynomials in A with integer coefficients.

Bracket and Temperley-Lieb computations stay in this ring so that the
oracles never round. Evaluation at a root of unity happens only at the end.
"""
from __future__ import annotations

import cmath
import math
from typing import Iterable, Mapping, Union

__all__ = ["LaurentPoly", "d_poly", "unit_A", "lp_add", "lp_mul", "lp_scale", "lp_eval"]

Scalar = Union[int, "LaurentPoly"]


class LaurentPoly:
    """Immutable mapping exponent -> nonzero integer coefficient."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, int] = {}
        for e, c in items:
            if not isinstance(c, int) or isinstance(c, bool):
                raise TypeError(f"coefficient must be int, got {type(c).__name__}")
            e = int(e)
            acc[e] = acc.get(e, 0) + c
        self._terms = {e: c for e, c in sorted(acc.items()) if c != 0}
        self._hash = None

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1) -> "LaurentPoly":
        return cls({exponent: coefficient})

    @classmethod
    def constant(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree_range(self) -> tuple[int, int] | None:
        if not self._terms:
            return None
        es = list(self._terms)
        return es[0], es[-1]

    def coeff(self, exponent: int) -> int:
        return self._terms.get(exponent, 0)

    # ring operations -------------------------------------------------

    def __add__(self, other: Scalar) -> "LaurentPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, 0) + c
        return LaurentPoly(acc)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: Scalar) -> "LaurentPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other: Scalar) -> "LaurentPoly":
        if isinstance(other, int) and not isinstance(other, bool):
            return LaurentPoly({e: c * other for e, c in self._terms.items()})
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "LaurentPoly":
        if power < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self._terms.items()
            if c not in (1, -1):
                raise ValueError("monomial inverse needs a unit coefficient")
            return LaurentPoly({-e * -power: c ** -power})
        result = LaurentPoly.constant(1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by A**k."""
        return LaurentPoly({e + k: c for e, c in self._terms.items()})

    # comparison ------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    # evaluation and rendering ----------------------------------------

    def __call__(self, a_root: complex) -> complex:
        return lp_eval(self, a_root)

    def to_json(self) -> dict[str, int]:
        return {str(e): c for e, c in sorted(self._terms.items(), reverse=True)}

    @classmethod
    def from_json(cls, data: Mapping[str, int]) -> "LaurentPoly":
        return cls({int(e): int(c) for e, c in data.items()})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items(), reverse=True):
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {abs(c)}*A^{e}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"LaurentPoly({self._terms!r})"


def _coerce(x: object) -> "LaurentPoly":
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return LaurentPoly.constant(x)
    return NotImplemented


def lp_add(p: LaurentPoly, q: Scalar) -> LaurentPoly:
    return p + q


def lp_mul(p: LaurentPoly, q: Scalar) -> LaurentPoly:
    return p * q


def lp_scale(p: LaurentPoly, c: int) -> LaurentPoly:
    return p * c


_D = LaurentPoly({2: -1, -2: -1})


def d_poly() -> LaurentPoly:
    """The loop value d = -A^2 - A^-2."""
    return _D


def unit_A(k: int) -> complex:
    """A = i * exp(-i pi / 2k), so that A^-4 = exp(2 pi i / k) and d = 2 cos(pi/k)."""
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")
    return 1j * cmath.exp(-1j * math.pi / (2 * k))


def lp_eval(p: LaurentPoly, a_root: complex) -> complex:
    """Horner evaluation over the sorted exponent range; A must be nonzero."""
    if a_root == 0:
        raise ZeroDivisionError("cannot evaluate a Laurent polynomial at A = 0")
    terms = p._terms
    if not terms:
        return 0j
    exps = list(terms)
    lo = exps[0]
    acc = 0j
    # descend exponents; gaps become repeated multiplication by A
    prev = exps[-1]
    for e in reversed(exps):
        acc *= a_root ** (prev - e)
        acc += terms[e]
        prev = e
    return acc * (a_root ** lo)
