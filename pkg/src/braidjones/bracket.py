"""Brute-force Kauffman bracket over all 2^m crossing resolutions.

This is the reference oracle; it favours obviousness over speed.
"""
from __future__ import annotations

from collections import Counter

from .braid import BraidWord, ClosureKind, LinkDiagram, close, orient_and_writhe
from .laurent import LaurentPoly, d_poly, lp_eval, unit_A

__all__ = [
    "DEFAULT_MAX_CROSSINGS",
    "OracleCapError",
    "UnionFind",
    "resolution_edges",
    "loops",
    "bracket",
    "partial_bracket",
    "jones_exact",
    "jones_value",
]

DEFAULT_MAX_CROSSINGS = 24


class OracleCapError(ValueError):
    """The instance is larger than the configured brute-force budget."""


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def count_roots(self) -> int:
        return sum(1 for i in range(len(self.parent)) if self.find(i) == i)


def resolution_edges(diagram: LinkDiagram, c: int, capcup: bool) -> tuple[tuple[int, int], tuple[int, int]]:
    crossing = diagram.crossings[c]
    t, i = crossing.level, crossing.generator
    node = diagram.node
    if capcup:
        return (node(t - 1, i), node(t - 1, i + 1)), (node(t, i), node(t, i + 1))
    return (node(t - 1, i), node(t, i)), (node(t - 1, i + 1), node(t, i + 1))


def _base_forest(diagram: LinkDiagram) -> list[int]:
    uf = UnionFind(diagram.num_nodes)
    for e in diagram.fixed_edges:
        u, v, _ = diagram.edges[e]
        uf.union(u, v)
    return uf.parent


def loops(diagram: LinkDiagram, state: int, _base: list[int] | None = None) -> int:
    """Closed loops after resolving crossing c as capcup iff bit c of ``state`` is set."""
    uf = UnionFind(0)
    uf.parent = list(_base if _base is not None else _base_forest(diagram))
    for c in range(len(diagram.crossings)):
        for u, v in resolution_edges(diagram, c, bool(state >> c & 1)):
            uf.union(u, v)
    return uf.count_roots()


def _state_exponent(diagram: LinkDiagram, state: int) -> int:
    # capcup carries A for sigma_i and A^-1 for its inverse
    return sum(
        cr.sign * (1 if state >> c & 1 else -1) for c, cr in enumerate(diagram.crossings)
    )


def partial_bracket(diagram: LinkDiagram, start: int, stop: int) -> LaurentPoly:
    """Sum of state contributions for states in ``range(start, stop)``."""
    base = _base_forest(diagram)
    tally: Counter[tuple[int, int]] = Counter()
    for state in range(start, stop):
        tally[_state_exponent(diagram, state), loops(diagram, state, base)] += 1
    d = d_poly()
    total = LaurentPoly()
    for (e, a), count in tally.items():
        total = total + (d ** (a - 1)).shift(e) * count
    return total


def bracket(diagram: LinkDiagram, max_crossings: int = DEFAULT_MAX_CROSSINGS) -> LaurentPoly:
    m = len(diagram.crossings)
    if m > max_crossings:
        raise OracleCapError(f"{m} crossings exceeds the state-sum cap of {max_crossings}")
    return partial_bracket(diagram, 0, 1 << m)


def jones_exact(diagram: LinkDiagram, max_crossings: int = DEFAULT_MAX_CROSSINGS) -> LaurentPoly:
    """(-A)^(3w) <L>, returned as a Laurent polynomial in A (t = A^-4)."""
    _, w = orient_and_writhe(diagram)
    sign = -1 if (3 * w) % 2 else 1
    return bracket(diagram, max_crossings).shift(3 * w) * sign


def jones_value(
    braid: BraidWord,
    kind: ClosureKind,
    k: int,
    max_crossings: int = DEFAULT_MAX_CROSSINGS,
) -> complex:
    """V(exp(2 pi i / k)) of the chosen closure."""
    return lp_eval(jones_exact(close(braid, kind), max_crossings), unit_A(k))
