"""Path-model representation of TL_n(d) and the unitary braid action on it.

A path is an n-bit string; bit 1 steps right, bit 0 steps left, starting at
vertex 1 of the line graph with vertices 1..k-1. Only paths that stay on
the graph are basis states. Operators never change a path's endpoint, so
they are stored as one dense block per endpoint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from .braid import BraidWord
from .laurent import unit_A

__all__ = [
    "PathBasis",
    "CoefficientTable",
    "BlockOperator",
    "enumerate_paths",
    "path_counts",
    "coefficient_table",
    "phi_E",
    "phi_sigma",
    "phi_braid",
    "apply_braid",
    "normalization_N",
    "weighted_trace_Tr_n",
    "alternating_path",
    "capcup_product",
]


def _check_k(k: int) -> None:
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")


@lru_cache(maxsize=None)
def path_counts(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """S[i][j] = number of admissible i-step paths ending at vertex j (j = 0..k, padded)."""
    _check_k(k)
    rows = [tuple(1 if j == 1 else 0 for j in range(k + 1))]
    for _ in range(n):
        prev = rows[-1]
        rows.append(tuple(
            prev[j - 1] + prev[j + 1] if 1 <= j <= k - 1 else 0 for j in range(k + 1)
        ))
    return tuple(rows)


@dataclass(frozen=True)
class PathBasis:
    n: int
    k: int
    paths: tuple[str, ...]
    endpoints: tuple[int, ...]
    index: dict[str, int] = field(repr=False, compare=False)
    blocks: dict[int, tuple[int, ...]] = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.paths)

    def prefix_position(self, p: str, i: int) -> int:
        """z_i: vertex reached after the first i-1 steps of ``p``."""
        return 1 + sum(1 if b == "1" else -1 for b in p[: i - 1])

    def block_position(self, path_index: int) -> tuple[int, int]:
        ell = self.endpoints[path_index]
        return ell, self.blocks[ell].index(path_index)


@lru_cache(maxsize=None)
def enumerate_paths(n: int, k: int) -> PathBasis:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_k(k)
    paths: list[str] = []
    ends: list[int] = []

    def rec(prefix: str, pos: int) -> None:
        if len(prefix) == n:
            paths.append(prefix)
            ends.append(pos)
            return
        if pos - 1 >= 1:
            rec(prefix + "0", pos - 1)
        if pos + 1 <= k - 1:
            rec(prefix + "1", pos + 1)

    rec("", 1)
    blocks: dict[int, list[int]] = {}
    for idx, ell in enumerate(ends):
        blocks.setdefault(ell, []).append(idx)
    return PathBasis(
        n, k, tuple(paths), tuple(ends),
        {p: i for i, p in enumerate(paths)},
        {ell: tuple(v) for ell, v in sorted(blocks.items())},
    )


@dataclass(frozen=True)
class CoefficientTable:
    """lambda_l = sin(pi l / k) and the cap/cup coefficients built from it.

    ``a[l]`` and ``c[l]`` belong to an arc bulging right from region l,
    ``b[l]`` and ``d[l]`` to one bulging left; arrays are padded to 0..k.
    """

    k: int
    lam: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d_coef: np.ndarray
    d: float

    def lam_at(self, j: int) -> float:
        return float(self.lam[j]) if 0 <= j <= self.k else 0.0


@lru_cache(maxsize=None)
def coefficient_table(k: int) -> CoefficientTable:
    _check_k(k)
    lam = np.zeros(k + 1)
    lam[1:k] = np.sin(np.pi * np.arange(1, k) / k)
    a = np.zeros(k + 1)
    b = np.zeros(k + 1)
    for ell in range(1, k):
        a[ell] = math.sqrt(lam[ell + 1] / lam[ell])
        b[ell] = math.sqrt(lam[ell - 1] / lam[ell])
    for arr in (lam, a, b):
        arr.setflags(write=False)
    return CoefficientTable(k, lam, a, b, a.conj(), b.conj(), 2 * math.cos(math.pi / k))


class BlockOperator:
    """Operator on H_{n,k} stored as one square matrix per endpoint block."""

    __slots__ = ("basis", "blocks")

    def __init__(self, basis: PathBasis, blocks: dict[int, np.ndarray]):
        for ell, idx in basis.blocks.items():
            if blocks[ell].shape != (len(idx), len(idx)):
                raise ValueError(f"block {ell} has shape {blocks[ell].shape}, expected {len(idx)}")
        self.basis = basis
        self.blocks = blocks

    @classmethod
    def identity(cls, basis: PathBasis) -> "BlockOperator":
        return cls(basis, {ell: np.eye(len(idx), dtype=complex) for ell, idx in basis.blocks.items()})

    @classmethod
    def from_dense(cls, basis: PathBasis, matrix: np.ndarray, atol: float = 0.0) -> "BlockOperator":
        """Split a full matrix into blocks; raises if it mixes endpoints beyond ``atol``."""
        out = {}
        for ell, idx in basis.blocks.items():
            out[ell] = np.array(matrix[np.ix_(idx, idx)], dtype=complex)
        rebuilt = cls(basis, out).to_dense()
        if np.max(np.abs(rebuilt - matrix), initial=0.0) > atol:
            raise ValueError("matrix has entries between different endpoint blocks")
        return cls(basis, out)

    def to_dense(self) -> np.ndarray:
        full = np.zeros((len(self.basis), len(self.basis)), dtype=complex)
        for ell, idx in self.basis.blocks.items():
            full[np.ix_(idx, idx)] = self.blocks[ell]
        return full

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        return BlockOperator(self.basis, {ell: m @ other.blocks[ell] for ell, m in self.blocks.items()})

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        return BlockOperator(self.basis, {ell: m + other.blocks[ell] for ell, m in self.blocks.items()})

    def __sub__(self, other: "BlockOperator") -> "BlockOperator":
        return BlockOperator(self.basis, {ell: m - other.blocks[ell] for ell, m in self.blocks.items()})

    def __mul__(self, scalar: complex) -> "BlockOperator":
        return BlockOperator(self.basis, {ell: m * scalar for ell, m in self.blocks.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "BlockOperator":
        return self * (1 / scalar)

    def dagger(self) -> "BlockOperator":
        return BlockOperator(self.basis, {ell: m.conj().T for ell, m in self.blocks.items()})

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(m), initial=0.0)) for m in self.blocks.values()), default=0.0)

    def norm(self) -> float:
        """Operator 2-norm (largest singular value over blocks)."""
        return max((float(np.linalg.norm(m, 2)) if m.size else 0.0 for m in self.blocks.values()),
                   default=0.0)


@dataclass(frozen=True)
class _LetterTables:
    """Index arrays for one generator: where 01/10 partners sit and their z_i."""

    pair_01: np.ndarray   # index of the path with bits (i, i+1) = 01
    pair_10: np.ndarray   # index of its 10 partner, or -1 if not admissible
    z_pair: np.ndarray
    lone_10: np.ndarray   # 10 paths whose 01 partner is not admissible
    z_lone: np.ndarray
    flat: np.ndarray      # paths with bits 00 or 11


@lru_cache(maxsize=None)
def _letter_tables(i: int, n: int, k: int) -> _LetterTables:
    if not 1 <= i <= n - 1:
        raise ValueError(f"generator {i} out of range for n={n}")
    basis = enumerate_paths(n, k)
    p01, p10, zp, lone, zl, flat = [], [], [], [], [], []
    for idx, p in enumerate(basis.paths):
        pair = p[i - 1: i + 1]
        z = basis.prefix_position(p, i)
        if pair == "01":
            partner = p[: i - 1] + "10" + p[i + 1:]
            p01.append(idx)
            p10.append(basis.index.get(partner, -1))
            zp.append(z)
        elif pair == "10":
            partner = p[: i - 1] + "01" + p[i + 1:]
            if partner not in basis.index:
                lone.append(idx)
                zl.append(z)
        else:
            flat.append(idx)
    as_int = lambda xs: np.asarray(xs, dtype=np.int64)  # noqa: E731
    return _LetterTables(as_int(p01), as_int(p10), as_int(zp), as_int(lone), as_int(zl), as_int(flat))


def _phi_E_dense(i: int, n: int, k: int) -> np.ndarray:
    basis = enumerate_paths(n, k)
    tab = coefficient_table(k)
    lam = tab.lam_at
    t = _letter_tables(i, n, k)
    mixer = np.zeros((len(basis), len(basis)))
    for a, b, z in zip(t.pair_01, t.pair_10, t.z_pair):
        mixer[a, a] = lam(z - 1) / lam(z)
        if b >= 0:
            mixer[b, b] = lam(z + 1) / lam(z)
            off = math.sqrt(lam(z + 1) * lam(z - 1)) / lam(z)
            mixer[a, b] = mixer[b, a] = off
    for b, z in zip(t.lone_10, t.z_lone):
        mixer[b, b] = lam(z + 1) / lam(z)
    return mixer


def phi_E(i: int, n: int, k: int) -> BlockOperator:
    """Image of E_i: acts on bits (i, i+1) with weights set by z_i."""
    basis = enumerate_paths(n, k)
    return BlockOperator.from_dense(basis, _phi_E_dense(i, n, k).astype(complex))


def phi_sigma(i: int, sign: int, n: int, k: int) -> BlockOperator:
    a_root = unit_A(k)
    cap_op = phi_E(i, n, k)
    ident = BlockOperator.identity(cap_op.basis)
    if sign > 0:
        return cap_op * a_root + ident * (1 / a_root)
    return cap_op * (1 / a_root) + ident * a_root


def phi_braid(braid: BraidWord, k: int) -> BlockOperator:
    """phi(B) = phi(g_1) phi(g_2) ... phi(g_m)."""
    basis = enumerate_paths(braid.strands, k)
    out = BlockOperator.identity(basis)
    cache: dict[int, BlockOperator] = {}
    for g in braid.word:
        if g not in cache:
            cache[g] = phi_sigma(abs(g), 1 if g > 0 else -1, braid.strands, k)
        out = out @ cache[g]
    return out


def _apply_letter(g: int, v: np.ndarray, n: int, k: int) -> np.ndarray:
    a_root = unit_A(k)
    lam = coefficient_table(k).lam
    t = _letter_tables(abs(g), n, k)
    a, a_inv = (a_root, 1 / a_root) if g > 0 else (1 / a_root, a_root)
    out = np.empty_like(v)
    out[t.flat] = a_inv * v[t.flat]
    z = t.z_pair
    ok = t.pair_10 >= 0
    diag01 = lam[z - 1] / lam[z]
    # 01 paths whose partner is inadmissible have z+1 = k, so lam[z+1] = 0
    out[t.pair_01] = (a * diag01 + a_inv) * v[t.pair_01]
    if ok.any():
        i01, i10, zz = t.pair_01[ok], t.pair_10[ok], z[ok]
        off = np.sqrt(lam[zz + 1] * lam[zz - 1]) / lam[zz]
        diag10 = lam[zz + 1] / lam[zz]
        out[i01] = (a * lam[zz - 1] / lam[zz] + a_inv) * v[i01] + a * off * v[i10]
        out[i10] = (a * diag10 + a_inv) * v[i10] + a * off * v[i01]
    if len(t.lone_10):
        zl = t.z_lone
        out[t.lone_10] = (a * lam[zl + 1] / lam[zl] + a_inv) * v[t.lone_10]
    return out


def apply_braid(braid: BraidWord, v: np.ndarray, k: int) -> np.ndarray:
    """phi(B) v on a vector indexed by ``enumerate_paths(n, k)``; the last letter acts first."""
    basis = enumerate_paths(braid.strands, k)
    v = np.asarray(v, dtype=complex)
    if v.shape[0] != len(basis):
        raise ValueError(f"vector has length {v.shape[0]}, basis has {len(basis)} paths")
    for g in reversed(braid.word):
        v = _apply_letter(g, v, braid.strands, k)
    return v


def normalization_N(n: int, k: int) -> float:
    lam = coefficient_table(k).lam
    counts = path_counts(n, k)[n]
    return float(sum(lam[ell] * counts[ell] for ell in range(1, k)))


def weighted_trace_Tr_n(op: BlockOperator) -> complex:
    basis = op.basis
    lam = coefficient_table(basis.k).lam
    total = complex(sum(lam[ell] * np.trace(op.blocks[ell]) for ell in basis.blocks))
    norm = normalization_N(basis.n, basis.k)
    # divide parts separately: complex division by a real loses the last bit
    return complex(total.real / norm, total.imag / norm)


def alternating_path(n: int) -> str:
    """|1010...10>, the state the plat closure algorithm starts from."""
    if n % 2:
        raise ValueError("the alternating path needs even n")
    return "10" * (n // 2)


def capcup_product(n: int, k: int, indices: Iterable[int]) -> BlockOperator:
    basis = enumerate_paths(n, k)
    out = BlockOperator.identity(basis)
    for i in indices:
        out = out @ phi_E(i, n, k)
    return out
