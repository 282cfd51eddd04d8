"""Braid words, their trace and plat closures, orientation and writhe.

Conventions
-----------
* A positive letter ``i`` is sigma_i; strand i passes OVER strand i+1.
* Words are read top to bottom: the first letter sits at the top.
* Diagram nodes are the points ``(level, position)`` with level 0 at the top
  bar and level ``m`` at the bottom bar; letter ``t`` (1-based) connects
  level ``t-1`` to level ``t``.
* Each component is oriented so that its topmost-leftmost node is left
  along a downward strand.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Literal

__all__ = [
    "BraidError",
    "BraidWord",
    "Crossing",
    "LinkDiagram",
    "OrientedLinkDiagram",
    "parse_braid",
    "exponent_sum",
    "close",
    "orient_and_writhe",
    "component_count",
    "random_braid",
    "stabilize",
    "conjugate",
]

ClosureKind = Literal["trace", "plat"]


class BraidError(ValueError):
    """Malformed braid input or an impossible closure."""


@dataclass(frozen=True)
class BraidWord:
    strands: int
    word: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "word", tuple(int(g) for g in self.word))
        if self.strands < 1:
            raise BraidError(f"strand count must be >= 1, got {self.strands}")
        for g in self.word:
            if g == 0:
                raise BraidError("generator 0 is not allowed")
            if abs(g) > self.strands - 1:
                raise BraidError(
                    f"generator index {abs(g)} exceeds n-1={self.strands - 1}"
                )

    @property
    def crossings(self) -> int:
        return len(self.word)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-g for g in reversed(self.word)))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if other.strands != self.strands:
            raise BraidError("cannot multiply braids on different strand counts")
        return BraidWord(self.strands, self.word + other.word)

    def to_text(self) -> str:
        return f"{self.strands}: " + " ".join(str(g) for g in self.word)

    def to_json(self) -> dict:
        return {"strands": self.strands, "word": list(self.word)}


_TEXT_RE = re.compile(r"^\s*(-?\d+)\s*:(.*)$", re.S)


def parse_braid(text: str) -> BraidWord:
    """Parse ``"n: g1 g2 ..."`` or ``{"strands": n, "word": [...]}``."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
            return BraidWord(int(data["strands"]), tuple(int(g) for g in data["word"]))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise BraidError(f"bad braid JSON: {exc}") from exc
    match = _TEXT_RE.match(stripped)
    if not match:
        raise BraidError(f"expected 'n: g1 g2 ...', got {text!r}")
    try:
        word = tuple(int(tok) for tok in match.group(2).split())
    except ValueError as exc:
        raise BraidError(f"non-integer letter in {text!r}") from exc
    return BraidWord(int(match.group(1)), word)


def exponent_sum(braid: BraidWord) -> int:
    return sum(1 if g > 0 else -1 for g in braid.word)


@dataclass(frozen=True)
class Crossing:
    level: int          # 1-based letter index
    generator: int      # i, acting on positions i and i+1
    sign: int           # +1 for sigma_i, -1 for its inverse
    over_edge: int
    under_edge: int


@dataclass(frozen=True)
class LinkDiagram:
    """A braid closure as a 2-regular multigraph on the braid's level points.

    ``edges[e] = (u, v, kind)``; strand edges are stored with ``u`` on the
    upper level. Closure arcs have kind ``"closure"``.
    """

    braid: BraidWord
    kind: ClosureKind
    edges: tuple[tuple[int, int, str], ...]
    crossings: tuple[Crossing, ...]
    # edges that are not crossing strands; resolutions add their own
    fixed_edges: tuple[int, ...] = field(repr=False)

    @property
    def num_nodes(self) -> int:
        return (self.braid.crossings + 1) * self.braid.strands

    def node(self, level: int, position: int) -> int:
        return level * self.braid.strands + (position - 1)

    def coords(self, node: int) -> tuple[int, int]:
        level, pos = divmod(node, self.braid.strands)
        return level, pos + 1

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for e, (u, v, _) in enumerate(self.edges):
            adj[u].append(e)
            adj[v].append(e)
        return adj


def close(braid: BraidWord, kind: ClosureKind) -> LinkDiagram:
    n, m = braid.strands, braid.crossings
    if kind not in ("trace", "plat"):
        raise BraidError(f"unknown closure kind {kind!r}")
    if kind == "plat" and n % 2:
        raise BraidError(f"plat closure needs an even strand count, got {n}")

    def node(level: int, pos: int) -> int:
        return level * n + pos - 1

    edges: list[tuple[int, int, str]] = []
    fixed: list[int] = []
    crossings: list[Crossing] = []
    for t, g in enumerate(braid.word, start=1):
        i = abs(g)
        for j in range(1, n + 1):
            if j not in (i, i + 1):
                fixed.append(len(edges))
                edges.append((node(t - 1, j), node(t, j), "strand"))
        down_right = len(edges)
        edges.append((node(t - 1, i), node(t, i + 1), "strand"))
        down_left = len(edges)
        edges.append((node(t - 1, i + 1), node(t, i), "strand"))
        if g > 0:
            crossings.append(Crossing(t, i, +1, down_right, down_left))
        else:
            crossings.append(Crossing(t, i, -1, down_left, down_right))
    if kind == "trace":
        for j in range(1, n + 1):
            fixed.append(len(edges))
            edges.append((node(0, j), node(m, j), "closure"))
    else:
        for j in range(1, n, 2):
            for level in (0, m):
                fixed.append(len(edges))
                edges.append((node(level, j), node(level, j + 1), "closure"))
    return LinkDiagram(braid, kind, tuple(edges), tuple(crossings), tuple(fixed))


@dataclass(frozen=True)
class OrientedLinkDiagram:
    diagram: LinkDiagram
    # +1 if edge e is traversed from edges[e][0] to edges[e][1]
    edge_direction: tuple[int, ...]
    edge_component: tuple[int, ...]
    crossing_signs: tuple[int, ...]

    @property
    def components(self) -> int:
        return max(self.edge_component, default=-1) + 1

    @property
    def writhe(self) -> int:
        return sum(self.crossing_signs)


def _trace_components(diagram: LinkDiagram) -> tuple[list[int], list[int], int]:
    """Walk every closed curve once. Returns (edge_direction, edge_component, count)."""
    adj = diagram.adjacency()
    n_edges = len(diagram.edges)
    direction = [0] * n_edges
    component = [-1] * n_edges
    count = 0
    # topmost-leftmost first: node ids are already ordered by (level, position)
    for start in range(diagram.num_nodes):
        if all(component[e] >= 0 for e in adj[start]):
            continue
        first = None
        for e in adj[start]:
            u, _, kind = diagram.edges[e]
            if kind == "strand" and u == start:
                first = e
                break
        if first is None:
            first = adj[start][0]
        cur, e = start, first
        while component[e] < 0:
            u, v, _ = diagram.edges[e]
            component[e] = count
            if u == cur:
                direction[e] = 1
                cur = v
            else:
                direction[e] = -1
                cur = u
            a, b = adj[cur]
            e = b if a == e else a
        count += 1
    return direction, component, count


def _strand_vector(diagram: LinkDiagram, edge: int, direction: int) -> tuple[int, int]:
    u, v, _ = diagram.edges[edge]
    (_, a), (_, b) = diagram.coords(u), diagram.coords(v)
    # screen coordinates: x to the right, y downward
    return (b - a, 1) if direction > 0 else (a - b, -1)


def orient_and_writhe(diagram: LinkDiagram) -> tuple[OrientedLinkDiagram, int]:
    direction, component, _ = _trace_components(diagram)
    signs = []
    for c in diagram.crossings:
        ox, oy = _strand_vector(diagram, c.over_edge, direction[c.over_edge])
        ux, uy = _strand_vector(diagram, c.under_edge, direction[c.under_edge])
        # over (1,1) with under (-1,1) is the positive crossing
        signs.append(1 if ox * uy - oy * ux > 0 else -1)
    oriented = OrientedLinkDiagram(diagram, tuple(direction), tuple(component), tuple(signs))
    return oriented, oriented.writhe


def component_count(diagram: LinkDiagram) -> int:
    return _trace_components(diagram)[2]


def random_braid(rng, strands: int, length: int) -> BraidWord:
    """Uniform random word; ``rng`` is a ``numpy.random.Generator``."""
    if strands < 2:
        return BraidWord(strands, ())
    gens = rng.integers(1, strands, size=length)
    signs = rng.choice((-1, 1), size=length)
    return BraidWord(strands, tuple(int(g * s) for g, s in zip(gens, signs)))


def stabilize(braid: BraidWord, sign: int = 1) -> BraidWord:
    """Markov stabilization: append sigma_n^{+-1} on one more strand."""
    n = braid.strands
    return BraidWord(n + 1, braid.word + (sign * n,))


def conjugate(braid: BraidWord, g: int) -> BraidWord:
    return BraidWord(braid.strands, (g,) + braid.word + (-g,))
