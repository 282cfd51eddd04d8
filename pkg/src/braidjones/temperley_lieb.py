"""Temperley-Lieb algebra on planar Kauffman diagrams.

Boundary points are numbered circularly: top row left to right is
``1..n``, bottom row right to left is ``n+1..2n``. Under this numbering a
matching is planar exactly when it is a balanced parenthesization.
Products stack the left factor on top of the right one.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence, Union

from .braid import BraidWord
from .laurent import LaurentPoly, d_poly, lp_eval

__all__ = [
    "DEFAULT_MAX_STRANDS",
    "KauffmanDiagram",
    "TLElement",
    "Tangle",
    "identity_diagram",
    "generator_E",
    "diagram_mul",
    "closure_loops",
    "all_diagrams",
    "tl_mul",
    "rho_A",
    "markov_trace",
    "markov_trace_value",
    "jones_via_trace",
]

DEFAULT_MAX_STRANDS = 10

Coefficient = Union[LaurentPoly, complex]


@dataclass(frozen=True, order=True)
class KauffmanDiagram:
    n: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        pairs = tuple(sorted(tuple(sorted(p)) for p in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        points = [x for p in pairs for x in p]
        if sorted(points) != list(range(1, 2 * self.n + 1)):
            raise ValueError(f"not a perfect matching on 1..{2 * self.n}: {pairs}")
        if not _is_planar(pairs):
            raise ValueError(f"matching has crossing arcs: {pairs}")

    @property
    def partner(self) -> dict[int, int]:
        out = {}
        for a, b in self.pairs:
            out[a], out[b] = b, a
        return out

    def __str__(self) -> str:
        return " ".join(f"({a},{b})" for a, b in self.pairs)


def _is_planar(pairs: Sequence[tuple[int, int]]) -> bool:
    opener = {a: b for a, b in pairs}
    stack: list[int] = []
    for x in range(1, 2 * len(pairs) + 1):
        if x in opener:
            stack.append(opener[x])
        elif not stack or stack.pop() != x:
            return False
    return True


def _bottom(n: int, j: int) -> int:
    return 2 * n + 1 - j


def identity_diagram(n: int) -> KauffmanDiagram:
    return KauffmanDiagram(n, tuple((j, _bottom(n, j)) for j in range(1, n + 1)))


def generator_E(i: int, n: int) -> KauffmanDiagram:
    if not 1 <= i <= n - 1:
        raise ValueError(f"E_{i} is undefined for n={n}")
    pairs = [(i, i + 1), (_bottom(n, i + 1), _bottom(n, i))]
    pairs += [(j, _bottom(n, j)) for j in range(1, n + 1) if j not in (i, i + 1)]
    return KauffmanDiagram(n, tuple(pairs))


@lru_cache(maxsize=1 << 16)
def diagram_mul(k1: KauffmanDiagram, k2: KauffmanDiagram) -> tuple[KauffmanDiagram, int]:
    """Stack ``k1`` on ``k2``; returns the fused diagram and the closed loops removed."""
    if k1.n != k2.n:
        raise ValueError(f"cannot multiply diagrams on {k1.n} and {k2.n} points")
    n = k1.n
    p1, p2 = k1.partner, k2.partner
    seen_middle = [False] * (n + 1)
    pairs = []

    def walk_from_middle(j: int, into_lower: bool) -> int:
        # follow arcs until the walk exits on an outer boundary point
        while True:
            seen_middle[j] = True
            if into_lower:
                q = p2[j]
                if q > n:
                    return q
                j, into_lower = q, False
            else:
                q = p1[_bottom(n, j)]
                if q <= n:
                    return q
                j, into_lower = _bottom(n, q), True

    done: set[int] = set()
    for a in range(1, n + 1):
        if a in done:
            continue
        q = p1[a]
        end = q if q <= n else walk_from_middle(_bottom(n, q), True)
        pairs.append((a, end))
        done.update((a, end))
    for b in range(n + 1, 2 * n + 1):
        if b in done:
            continue
        q = p2[b]
        end = q if q > n else walk_from_middle(q, False)
        pairs.append((b, end))
        done.update((b, end))
    loops = 0
    for j in range(1, n + 1):
        if seen_middle[j]:
            continue
        loops += 1
        cur, into_lower = j, True
        while not seen_middle[cur]:
            seen_middle[cur] = True
            if into_lower:
                cur = p2[cur]
            else:
                cur = _bottom(n, p1[_bottom(n, cur)])
            into_lower = not into_lower
    return KauffmanDiagram(n, tuple(pairs)), loops


def closure_loops(k: KauffmanDiagram) -> int:
    """Loops formed by joining top point j to bottom point j around the side."""
    n, partner = k.n, k.partner
    seen = set()
    loops = 0
    for start in range(1, 2 * n + 1):
        if start in seen:
            continue
        loops += 1
        x = start
        while x not in seen:
            seen.add(x)
            y = partner[x]
            seen.add(y)
            x = _bottom(n, y)  # closure arc: label j <-> 2n+1-j
    return loops


def all_diagrams(n: int) -> Iterator[KauffmanDiagram]:
    """Every planar matching on 2n points, Catalan(n) of them."""

    def rec(points: tuple[int, ...]) -> Iterator[tuple[tuple[int, int], ...]]:
        if not points:
            yield ()
            return
        first = points[0]
        for idx in range(1, len(points), 2):
            inside, outside = points[1:idx], points[idx + 1:]
            for a in rec(inside):
                for b in rec(outside):
                    yield ((first, points[idx]),) + a + b

    for pairs in rec(tuple(range(1, 2 * n + 1))):
        yield KauffmanDiagram(n, pairs)


class TLElement:
    """Finite linear combination of Kauffman diagrams.

    Coefficients are exact ``LaurentPoly`` values unless ``loop_value`` is a
    number, in which case every coefficient is a complex number.
    """

    __slots__ = ("n", "terms", "loop_value")

    def __init__(self, n: int, terms=None, loop_value: Coefficient | None = None):
        self.n = n
        self.loop_value = d_poly() if loop_value is None else loop_value
        zero = self._zero()
        clean = {}
        for diag, c in (terms or {}).items():
            if diag.n != n:
                raise ValueError("all diagrams in a TLElement must share n")
            if c != zero:
                clean[diag] = c
        self.terms: dict[KauffmanDiagram, Coefficient] = clean

    @property
    def exact(self) -> bool:
        return isinstance(self.loop_value, LaurentPoly)

    def _zero(self) -> Coefficient:
        return LaurentPoly() if isinstance(self.loop_value, LaurentPoly) else 0j

    def _one(self) -> Coefficient:
        return LaurentPoly.constant(1) if isinstance(self.loop_value, LaurentPoly) else 1 + 0j

    @classmethod
    def identity(cls, n: int, loop_value: Coefficient | None = None) -> "TLElement":
        el = cls(n, loop_value=loop_value)
        return cls(n, {identity_diagram(n): el._one()}, loop_value)

    @classmethod
    def basis(cls, diagram: KauffmanDiagram, coefficient: Coefficient | None = None,
              loop_value: Coefficient | None = None) -> "TLElement":
        el = cls(diagram.n, loop_value=loop_value)
        c = el._one() if coefficient is None else coefficient
        return cls(diagram.n, {diagram: c}, loop_value)

    def __add__(self, other: "TLElement") -> "TLElement":
        terms = dict(self.terms)
        for diag, c in other.terms.items():
            terms[diag] = terms[diag] + c if diag in terms else c
        return TLElement(self.n, terms, self.loop_value)

    def scale(self, c: Coefficient) -> "TLElement":
        return TLElement(self.n, {k: v * c for k, v in self.terms.items()}, self.loop_value)

    def __mul__(self, other: "TLElement") -> "TLElement":
        return tl_mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TLElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __repr__(self) -> str:
        body = ", ".join(f"[{k}]: {v}" for k, v in sorted(self.terms.items()))
        return f"TLElement(n={self.n}, {{{body}}})"


def tl_mul(x: TLElement, y: TLElement) -> TLElement:
    if x.n != y.n:
        raise ValueError(f"cannot multiply TL_{x.n} by TL_{y.n}")
    d = x.loop_value
    powers = [x._one()]
    acc: dict[KauffmanDiagram, Coefficient] = {}
    for k1, c1 in x.terms.items():
        for k2, c2 in y.terms.items():
            k3, loops = diagram_mul(k1, k2)
            while len(powers) <= loops:
                powers.append(powers[-1] * d)
            term = c1 * c2 * powers[loops]
            acc[k3] = acc[k3] + term if k3 in acc else term
    return TLElement(x.n, acc, d)


@dataclass(frozen=True)
class Tangle:
    """Braid word in which some letters are capcups.

    Letters are ``("X", i, sign)`` for a crossing and ``("C", i)`` for E_i.
    """

    n: int
    letters: tuple[tuple, ...]

    def __post_init__(self) -> None:
        for letter in self.letters:
            if letter[0] not in ("X", "C") or not 1 <= letter[1] <= self.n - 1:
                raise ValueError(f"bad tangle letter {letter!r} for n={self.n}")

    @classmethod
    def from_braid(cls, braid: BraidWord) -> "Tangle":
        return cls(braid.strands, tuple(("X", abs(g), 1 if g > 0 else -1) for g in braid.word))

    @property
    def writhe_of_crossings(self) -> int:
        return sum(letter[2] for letter in self.letters if letter[0] == "X")


def _letter_element(n: int, letter: tuple, a_root: Coefficient | None) -> TLElement:
    cap_op = generator_E(letter[1], n)
    one = identity_diagram(n)
    if a_root is None:
        loop, a, a_inv = None, LaurentPoly.monomial(1), LaurentPoly.monomial(-1)
    else:
        loop, a, a_inv = -(a_root ** 2) - a_root ** -2, complex(a_root), 1 / complex(a_root)
    if letter[0] == "C":
        return TLElement.basis(cap_op, loop_value=loop)
    if letter[2] > 0:
        return TLElement(n, {cap_op: a, one: a_inv}, loop)
    return TLElement(n, {cap_op: a_inv, one: a}, loop)


def rho_A(source: BraidWord | Tangle, a_root: complex | None = None) -> TLElement:
    """Image of a braid or tangle in TL_n; exact unless a numeric ``A`` is given."""
    tangle = Tangle.from_braid(source) if isinstance(source, BraidWord) else source
    loop = None if a_root is None else -(a_root ** 2) - a_root ** -2
    out = TLElement.identity(tangle.n, loop)
    for letter in tangle.letters:
        out = out * _letter_element(tangle.n, letter, a_root)
    return out


def markov_trace(x: TLElement) -> Coefficient:
    """d^(n-1) * tr(x): each diagram with a closure loops contributes d^(a-1)."""
    d = x.loop_value
    total = x._zero()
    for diag, c in x.terms.items():
        total = total + c * d ** (closure_loops(diag) - 1)
    return total


def markov_trace_value(x: TLElement, a_root: complex) -> complex:
    """The unscaled Markov trace tr(x) evaluated at a numeric A."""
    scaled = markov_trace(x)
    d = -(a_root ** 2) - a_root ** -2
    value = lp_eval(scaled, a_root) if isinstance(scaled, LaurentPoly) else complex(scaled)
    return value / d ** (x.n - 1)


def jones_via_trace(
    source: BraidWord | Tangle,
    writhe: int | None = None,
    max_strands: int = DEFAULT_MAX_STRANDS,
) -> LaurentPoly:
    """(-A)^(3w) d^(n-1) tr(rho_A(source)); ``writhe`` defaults to the exponent sum."""
    tangle = Tangle.from_braid(source) if isinstance(source, BraidWord) else source
    if tangle.n > max_strands:
        raise ValueError(f"n={tangle.n} exceeds the diagram budget of {max_strands} strands")
    w = tangle.writhe_of_crossings if writhe is None else writhe
    sign = -1 if w % 2 else 1
    return markov_trace(rho_A(tangle)).shift(3 * w) * sign
