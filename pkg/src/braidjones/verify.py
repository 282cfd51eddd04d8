"""Invariant suite behind ``braidjones verify``.

Every check returns ``(passed, detail)``; ``run_checks`` collects them.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .braid import BraidWord, close, conjugate, random_braid, stabilize
from .bracket import jones_exact, jones_value
from .circuit import circuit_to_matrix, counter_returns_clean, synthesize_braid
from .estimators import exact_reference
from .laurent import LaurentPoly
from .path_model import (
    BlockOperator,
    capcup_product,
    coefficient_table,
    enumerate_paths,
    phi_braid,
    phi_E,
    phi_sigma,
    weighted_trace_Tr_n,
)
from .temperley_lieb import jones_via_trace, rho_A

__all__ = ["CheckResult", "LEVELS", "run_checks"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


LEVELS = {
    "quick": {"n_max": 4, "k_values": (3, 4, 5), "braids": 20, "max_len": 6},
    "full": {"n_max": 6, "k_values": (3, 4, 5, 6, 7, 8), "braids": 100, "max_len": 8},
}


def _tl_relations(n_max: int, k_values) -> tuple[bool, str]:
    worst = 0.0
    for k in k_values:
        d = coefficient_table(k).d
        for n in range(2, n_max + 1):
            cap_op = [None] + [phi_E(i, n, k) for i in range(1, n)]
            for i in range(1, n):
                worst = max(worst, (cap_op[i] @ cap_op[i] - cap_op[i] * d).norm())
                worst = max(worst, (cap_op[i] - cap_op[i].dagger()).max_abs())
                for j in range(1, n):
                    if abs(i - j) >= 2:
                        worst = max(worst, (cap_op[i] @ cap_op[j] - cap_op[j] @ cap_op[i]).norm())
                    if abs(i - j) == 1:
                        worst = max(worst, (cap_op[i] @ cap_op[j] @ cap_op[i] - cap_op[i]).norm())
    return worst <= 1e-10, f"max residual {worst:.3e}"


def _unitarity(n_max: int, k_values) -> tuple[bool, str]:
    worst = 0.0
    for k in k_values:
        for n in range(2, n_max + 1):
            ident = BlockOperator.identity(enumerate_paths(n, k))
            for i in range(1, n):
                unitary = phi_sigma(i, 1, n, k)
                worst = max(worst, (unitary @ unitary.dagger() - ident).max_abs())
    return worst <= 1e-12, f"max |UU^+ - I| {worst:.3e}"


def _coefficients(k_max: int = 64) -> tuple[bool, str]:
    worst = 0.0
    for k in range(3, k_max + 1):
        t = coefficient_table(k)
        lam = t.lam
        for ell in range(1, k):
            worst = max(worst, abs(lam[ell - 1] + lam[ell + 1] - t.d * lam[ell]))
            worst = max(worst, abs(t.b[ell] * t.d_coef[ell] + t.a[ell] * t.c[ell] - t.d))
            if ell + 1 <= k - 1:
                worst = max(worst, abs(t.b[ell + 1] * t.c[ell] - 1))
            if ell - 1 >= 1:
                worst = max(worst, abs(t.a[ell - 1] * t.d_coef[ell] - 1))
    return worst <= 1e-12, f"max residual {worst:.3e}"


def _markov(n_max: int, k_values, rng) -> tuple[bool, str]:
    worst = 0.0
    for k in k_values:
        d = coefficient_table(k).d
        for n in range(3, n_max + 1):
            basis = enumerate_paths(n, k)
            for _ in range(5):
                op = BlockOperator.identity(basis)
                for _ in range(rng.integers(0, 5)):
                    op = op @ phi_E(int(rng.integers(1, n - 1)), n, k)
                lhs = weighted_trace_Tr_n(op @ phi_E(n - 1, n, k))
                worst = max(worst, abs(lhs - weighted_trace_Tr_n(op) / d))
    return worst <= 1e-10, f"max residual {worst:.3e}"


def _capcup(n_max: int, k_values) -> tuple[bool, str]:
    worst = 0.0
    for k in k_values:
        d = coefficient_table(k).d
        for n in range(2, n_max + 1, 2):
            basis = enumerate_paths(n, k)
            projector = capcup_product(n, k, range(1, n, 2)) / d ** (n // 2)
            target = np.zeros((len(basis), len(basis)))
            a = basis.index["10" * (n // 2)]
            target[a, a] = 1
            worst = max(worst, float(np.max(np.abs(projector.to_dense() - target))))
    return worst <= 1e-10, f"max entry error {worst:.3e}"


def _oracles(n_max: int, k_values, count: int, max_len: int, rng) -> tuple[bool, str]:
    worst, mismatches = 0.0, 0
    for _ in range(count):
        n = int(rng.integers(2, min(n_max, 4) + 1))
        braid = random_braid(rng, n, int(rng.integers(0, max_len + 1)))
        poly = jones_exact(close(braid, "trace"))
        if poly != jones_via_trace(braid):
            mismatches += 1
        k = int(rng.choice(k_values))
        worst = max(worst, abs(exact_reference(braid, k) - jones_value(braid, "trace", k)))
    ok = mismatches == 0 and worst <= 1e-9
    return ok, f"{mismatches} polynomial mismatches, max numeric gap {worst:.3e}"


def _markov_moves(count: int, rng) -> tuple[bool, str]:
    bad = 0
    for _ in range(count):
        n = int(rng.integers(2, 5))
        braid = random_braid(rng, n, int(rng.integers(0, 7)))
        base = jones_exact(close(braid, "trace"))
        g = int(rng.integers(1, n)) * int(rng.choice((-1, 1)))
        if jones_exact(close(conjugate(braid, g), "trace")) != base:
            bad += 1
        if jones_exact(close(stabilize(braid, int(rng.choice((-1, 1)))), "trace")) != base:
            bad += 1
    return bad == 0, f"{bad} failures"


def _braid_relations() -> tuple[bool, str]:
    bad = 0
    for n in range(3, 6):
        for i in range(1, n - 1):
            lhs = rho_A(BraidWord(n, (i, i + 1, i)))
            rhs = rho_A(BraidWord(n, (i + 1, i, i + 1)))
            bad += lhs != rhs
            bad += rho_A(BraidWord(n, (i, -i))) != rho_A(BraidWord(n, ()))
        for i in range(1, n):
            for j in range(i + 2, n):
                bad += rho_A(BraidWord(n, (i, j))) != rho_A(BraidWord(n, (j, i)))
    return bad == 0, f"{bad} failures"


def _circuits(k_values, count: int, rng) -> tuple[bool, str]:
    worst, dirty = 0.0, 0
    for _ in range(count):
        n = int(rng.integers(2, 5))
        k = int(rng.choice([k for k in k_values if k <= 5] or [3]))
        braid = random_braid(rng, n, int(rng.integers(0, 5)))
        circ = synthesize_braid(braid, k)
        worst = max(worst, (circuit_to_matrix(circ) - phi_braid(braid, k)).max_abs())
        dirty += not counter_returns_clean(circ)
    return worst <= 1e-10 and dirty == 0, f"max entry error {worst:.3e}, {dirty} dirty counters"


def _known_values() -> tuple[bool, str]:
    pins = [
        (BraidWord(1, ()), LaurentPoly({0: 1})),
        (BraidWord(2, (1,)), LaurentPoly({0: 1})),
        (BraidWord(2, (1, 1, 1)), LaurentPoly({16: -1, 12: 1, 4: 1})),
        (BraidWord(2, (1, 1)), LaurentPoly({10: -1, 2: -1})),
    ]
    bad = [braid.to_text() for braid, want in pins if jones_exact(close(braid, "trace")) != want]
    return not bad, "all pins match" if not bad else f"mismatch on {bad}"


def run_checks(level: str = "quick", seed: int = 2024) -> list[CheckResult]:
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    cfg = LEVELS[level]
    rng = np.random.default_rng(seed)
    checks: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
        ("known-values", _known_values),
        ("tl-relations-and-hermiticity", lambda: _tl_relations(cfg["n_max"], cfg["k_values"])),
        ("braid-unitarity", lambda: _unitarity(cfg["n_max"], cfg["k_values"])),
        ("coefficient-identities", _coefficients),
        ("markov-property", lambda: _markov(cfg["n_max"], cfg["k_values"], rng)),
        ("capcup-projector", lambda: _capcup(cfg["n_max"], cfg["k_values"])),
        ("braid-relations-in-tl", _braid_relations),
        ("oracle-agreement", lambda: _oracles(cfg["n_max"], (3, 4, 5, 7, 10), cfg["braids"], cfg["max_len"], rng)),
        ("markov-moves", lambda: _markov_moves(cfg["braids"], rng)),
        ("circuit-equivalence", lambda: _circuits(cfg["k_values"], max(5, cfg["braids"] // 5), rng)),
    ]
    results = []
    for name, fn in checks:
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - start))
    return results
