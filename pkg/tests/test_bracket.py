from __future__ import annotations

import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from braidjones.braid import BraidWord, close
from braidjones.bracket import (
    OracleCapError,
    UnionFind,
    bracket,
    jones_exact,
    jones_value,
    loops,
    partial_bracket,
)
from braidjones.laurent import LaurentPoly, d_poly

from strategies import braids


def test_union_find():
    uf = UnionFind(5)
    uf.union(0, 1)
    uf.union(3, 4)
    uf.union(1, 0)
    assert uf.count_roots() == 3
    assert uf.find(0) == uf.find(1)
    assert uf.find(2) != uf.find(3)


def test_single_crossing_state_loops():
    d = close(BraidWord(2, (1,)), "trace")
    assert loops(d, 1) == 1
    assert loops(d, 0) == 2


def test_empty_state_loops():
    assert loops(close(BraidWord(3, ()), "trace"), 0) == 3


def test_bracket_pins():
    assert bracket(close(BraidWord(1, ()), "trace")) == LaurentPoly({0: 1})
    assert bracket(close(BraidWord(2, (1,)), "trace")) == LaurentPoly({-3: -1})
    assert bracket(close(BraidWord(2, (1, 1, 1)), "trace")) == LaurentPoly({7: 1, 3: -1, -5: -1})


def test_unlink_bracket():
    assert bracket(close(BraidWord(3, ()), "trace")) == d_poly() ** 2


def test_jones_pins():
    assert jones_exact(close(BraidWord(1, ()), "trace")) == 1
    assert jones_exact(close(BraidWord(2, (1,)), "trace")) == 1
    trefoil = LaurentPoly({16: -1, 12: 1, 4: 1})
    assert jones_exact(close(BraidWord(2, (1, 1, 1)), "trace")) == trefoil
    assert jones_exact(close(BraidWord(2, (1, 1)), "trace")) == LaurentPoly({10: -1, 2: -1})


def test_trefoil_in_t_variable():
    # with t = A^-4 the right-handed trefoil is -t^-4 + t^-3 + t^-1
    k = 5
    t = cmath.exp(2j * math.pi / k)
    expected = -(t ** -4) + t ** -3 + t ** -1
    assert jones_value(BraidWord(2, (1, 1, 1)), "trace", k) == pytest.approx(expected, abs=1e-12)


def test_mirror_image():
    b = BraidWord(2, (1, 1, 1))
    mirror = jones_exact(close(b.inverse(), "trace"))
    original = jones_exact(close(b, "trace"))
    assert mirror == LaurentPoly({-e: c for e, c in original.terms.items()})


def test_plat_unknot_with_one_crossing():
    assert jones_exact(close(BraidWord(4, (2,)), "plat")) == 1
    assert jones_exact(close(BraidWord(2, ()), "plat")) == 1


def test_figure_eight_is_amphichiral():
    poly = jones_exact(close(BraidWord(3, (1, -2, 1, -2)), "trace"))
    assert poly == LaurentPoly({-e: c for e, c in poly.terms.items()})
    assert poly == LaurentPoly({8: 1, 4: -1, 0: 1, -4: -1, -8: 1})


def test_cap_on_crossings():
    with pytest.raises(OracleCapError):
        bracket(close(BraidWord(2, (1,) * 6), "trace"), max_crossings=5)


def test_unknot_at_any_root():
    for k in (3, 4, 5, 7, 10):
        assert jones_value(BraidWord(1, ()), "trace", k) == pytest.approx(1.0)


@given(braids(max_strands=4, max_len=7))
def test_partial_sums_cover_the_state_space(b):
    d = close(b, "trace")
    m = len(d.crossings)
    half = (1 << m) // 2
    assert partial_bracket(d, 0, half) + partial_bracket(d, half, 1 << m) == bracket(d)


@settings(max_examples=50)
@given(braids(max_strands=4, max_len=6), st.sampled_from((-1, 1)))
def test_reidemeister_one(b, sign):
    # a kink added through stabilisation leaves V unchanged
    bigger = BraidWord(b.strands + 1, b.word + (sign * b.strands,))
    assert jones_exact(close(bigger, "trace")) == jones_exact(close(b, "trace"))


@settings(max_examples=50)
@given(braids(max_strands=4, max_len=6))
def test_reidemeister_two(b):
    g = 1
    padded = BraidWord(b.strands, b.word + (g, -g))
    assert jones_exact(close(padded, "trace")) == jones_exact(close(b, "trace"))
