"""Classical simulation of the randomized trace- and plat-closure estimators.

Each repetition draws a weighted path (trace closure only) and a +-1
Hadamard-test outcome for the real and for the imaginary part. Randomness
comes from Philox streams laid out per fixed-size chunk of repetitions, so
the result for a given seed does not depend on how chunks are scheduled.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal

import numpy as np

from .braid import BraidWord, close, exponent_sum, orient_and_writhe
from .laurent import unit_A
from .path_model import (
    BlockOperator,
    alternating_path,
    capcup_product,
    coefficient_table,
    enumerate_paths,
    normalization_N,
    path_counts,
    phi_braid,
    apply_braid,
    weighted_trace_Tr_n,
)

__all__ = [
    "RNG_ALGORITHM",
    "CHUNK_SIZE",
    "EstimatorConfig",
    "ApproxResult",
    "plan_samples",
    "branch_probability",
    "block_probabilities",
    "path_probabilities",
    "sample_weighted_path",
    "hadamard_test",
    "approx_jones_trace",
    "approx_jones_plat",
    "exact_reference",
]

RNG_ALGORITHM = "Philox4x64-10 (numpy), key=seed, counter word 1 = chunk index"
CHUNK_SIZE = 1024

Mode = Literal["exact", "sampled"]
Part = Literal["re", "im"]


@dataclass(frozen=True)
class EstimatorConfig:
    epsilon: float = 0.1
    delta: float = 0.01
    seed: int | None = None
    mode: Mode = "sampled"
    workers: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.seed is not None and not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def resolved_seed(self) -> int:
        if self.seed is not None:
            return self.seed
        return int(np.random.SeedSequence().entropy) % (2 ** 64)


@dataclass
class ApproxResult:
    closure: str
    n: int
    k: int
    mode: str
    estimate: complex
    samples: int
    mean_re: float
    mean_im: float
    rescale: complex
    error_bound: float
    seed: int | None = None
    reference: complex | None = None
    extras: dict = field(default_factory=dict)

    @property
    def r(self) -> complex:
        return complex(self.mean_re, self.mean_im)

    def to_dict(self) -> dict:
        return asdict(self)


def plan_samples(cfg: EstimatorConfig) -> int:
    """Hoeffding count per part: each +-1 mean is within epsilon w.p. >= 1 - delta/2."""
    return math.ceil((2.0 / cfg.epsilon ** 2) * math.log(4.0 / cfg.delta))


# --- weighted path sampling -------------------------------------------------

def branch_probability(n: int, k: int, j: int, ell: int) -> Fraction:
    """P(p(j-1) = ell-1 | p(j) = ell) for a uniform path in P_{j,k,ell}."""
    counts = path_counts(n, k)
    left, right = counts[j - 1][ell - 1], counts[j - 1][ell + 1]
    return Fraction(left, left + right)


def block_probabilities(n: int, k: int) -> dict[int, float]:
    lam = coefficient_table(k).lam
    counts = path_counts(n, k)[n]
    norm = normalization_N(n, k)
    return {ell: lam[ell] * counts[ell] / norm for ell in range(1, k) if counts[ell]}


def path_probabilities(n: int, k: int) -> np.ndarray:
    """Pr(p) = lambda_{l(p)} / N for every path of ``enumerate_paths(n, k)``."""
    basis = enumerate_paths(n, k)
    lam = coefficient_table(k).lam
    return np.array([lam[ell] for ell in basis.endpoints]) / normalization_N(n, k)


class _PathSampler:
    """Vectorised reverse-DP sampler fed by explicit uniforms."""

    def __init__(self, n: int, k: int):
        self.n, self.k = n, k
        self.basis = enumerate_paths(n, k)
        counts = np.array(path_counts(n, k), dtype=float)
        blocks = block_probabilities(n, k)
        self.ells = np.array(sorted(blocks), dtype=np.int64)
        self.cum = np.cumsum([blocks[e] for e in self.ells])
        self.cum[-1] = 1.0
        # left[j, ell] = P(step j went right, i.e. p(j-1) = ell-1)
        left = np.zeros((n + 1, k + 1))
        for j in range(1, n + 1):
            for ell in range(1, k):
                a, b = counts[j - 1][ell - 1], counts[j - 1][ell + 1]
                if a + b:
                    left[j, ell] = a / (a + b)
        self.left = left
        self.codes = np.array([int(p, 2) for p in self.basis.paths], dtype=np.int64)

    def draw(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms of shape (reps, n+1) to basis indices."""
        reps = u.shape[0]
        pos = self.ells[np.searchsorted(self.cum, u[:, 0], side="right").clip(max=len(self.ells) - 1)]
        code = np.zeros(reps, dtype=np.int64)
        for j in range(self.n, 0, -1):
            step_right = u[:, j] < self.left[j, pos]
            code |= step_right.astype(np.int64) << (self.n - j)
            pos = np.where(step_right, pos - 1, pos + 1)
        return np.searchsorted(self.codes, code)


@lru_cache(maxsize=64)
def _sampler(n: int, k: int) -> _PathSampler:
    return _PathSampler(n, k)


def sample_weighted_path(n: int, k: int, rng: np.random.Generator) -> str:
    """One path with Pr(p) proportional to lambda of its endpoint."""
    sampler = _sampler(n, k)
    return sampler.basis.paths[int(sampler.draw(rng.random((1, n + 1)))[0])]


# --- Hadamard test ------------------------------------------------------------

def _check_probability(value: float) -> float:
    p = (1.0 + value) / 2.0
    if p < -1e-9 or p > 1 + 1e-9:
        raise ArithmeticError(f"Hadamard-test probability {p} outside [0, 1]; phi(B) is not unitary")
    return min(max(p, 0.0), 1.0)


def hadamard_test(
    braid: BraidWord,
    path: str,
    k: int,
    part: Part = "re",
    mode: Mode = "exact",
    rng: np.random.Generator | None = None,
) -> float:
    """Exact Re/Im of <p|phi(B)|p>, or one +-1 sample with that mean."""
    basis = enumerate_paths(braid.strands, k)
    if path not in basis.index:
        raise ValueError(f"{path!r} is not an admissible path for n={braid.strands}, k={k}")
    e = np.zeros(len(basis), dtype=complex)
    e[basis.index[path]] = 1.0
    amp = apply_braid(braid, e, k)[basis.index[path]]
    value = float(amp.real if part == "re" else amp.imag)
    prob = _check_probability(value)
    if mode == "exact":
        return value
    rng = rng if rng is not None else np.random.default_rng()
    return 1.0 if rng.random() < prob else -1.0


# --- chunked sampling ---------------------------------------------------------

def _chunk_uniforms(seed: int, chunk: int, width: int) -> np.ndarray:
    bitgen = np.random.Philox(key=seed, counter=[0, chunk, 0, 0])
    return np.random.Generator(bitgen).random((CHUNK_SIZE, width))


def _run_chunks(samples: int, seed: int, width: int, job, workers: int) -> tuple[float, float]:
    chunks = range(math.ceil(samples / CHUNK_SIZE))

    def one(c: int) -> tuple[float, float]:
        u = _chunk_uniforms(seed, c, width)[: min(CHUNK_SIZE, samples - c * CHUNK_SIZE)]
        x, y = job(u)
        return float(x.sum()), float(y.sum())

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(one, chunks))
    else:
        sums = [one(c) for c in chunks]
    # summation order fixed by chunk index
    sx = math.fsum(s[0] for s in sums)
    sy = math.fsum(s[1] for s in sums)
    return sx / samples, sy / samples


def _pm1(u: np.ndarray, values: np.ndarray) -> np.ndarray:
    """+-1 outcomes with P(+1) = (1 + value) / 2."""
    raw = (1.0 + np.asarray(values, dtype=float)) / 2.0
    if raw.size and (raw.min() < -1e-9 or raw.max() > 1 + 1e-9):
        raise ArithmeticError("Hadamard-test probability outside [0, 1]; phi(B) is not unitary")
    return np.where(u < np.clip(raw, 0.0, 1.0), 1.0, -1.0)


def _diagonal(op: BlockOperator) -> np.ndarray:
    diag = np.zeros(len(op.basis), dtype=complex)
    for ell, idx in op.basis.blocks.items():
        diag[list(idx)] = np.diag(op.blocks[ell])
    return diag


def _trace_rescale(braid: BraidWord, k: int) -> tuple[complex, float]:
    a_root = unit_A(k)
    d = coefficient_table(k).d
    w = exponent_sum(braid)
    return (-a_root) ** (3 * w) * d ** (braid.strands - 1), d ** (braid.strands - 1)


def _plat_rescale(braid: BraidWord, k: int) -> tuple[complex, float, int]:
    n = braid.strands
    a_root = unit_A(k)
    tab = coefficient_table(k)
    _, w = orient_and_writhe(close(braid, "plat"))
    scale = tab.d ** (3 * n / 2 - 1) * tab.lam[1] / normalization_N(n, k)
    return (-a_root) ** (3 * w) * scale, scale, w


def approx_jones_trace(
    braid: BraidWord, k: int, cfg: EstimatorConfig, with_reference: bool = False
) -> ApproxResult:
    """Estimate V of the trace closure at t = exp(2 pi i / k).

    With probability >= 1 - delta each part of r is within epsilon of
    Tr_n(phi(B)), which bounds the error of the estimate by epsilon * d^(n-1)
    per part.
    """
    n = braid.strands
    rescale, scale = _trace_rescale(braid, k)
    op = phi_braid(braid, k)
    if cfg.mode == "exact":
        r = weighted_trace_Tr_n(op)
        samples, seed = 0, cfg.seed
    else:
        seed = cfg.resolved_seed()
        samples = plan_samples(cfg)
        diag = _diagonal(op)
        sampler = _sampler(n, k)
        width = 2 * (n + 2)

        def job(u: np.ndarray):
            re_paths = sampler.draw(u[:, : n + 1])
            im_paths = sampler.draw(u[:, n + 2: 2 * n + 3])
            return _pm1(u[:, n + 1], diag[re_paths].real), _pm1(u[:, 2 * n + 3], diag[im_paths].imag)

        mx, my = _run_chunks(samples, seed, width, job, cfg.workers)
        r = complex(mx, my)
    ref = exact_reference(braid, k, "trace") if with_reference else None
    return ApproxResult(
        "trace", n, k, cfg.mode, rescale * r, samples, r.real, r.imag, rescale,
        cfg.epsilon * scale, seed, ref, {"writhe": exponent_sum(braid)},
    )


def approx_jones_plat(
    braid: BraidWord, k: int, cfg: EstimatorConfig, with_reference: bool = False
) -> ApproxResult:
    """Estimate V of the plat closure from <1010...|phi(B)|1010...>."""
    n = braid.strands
    if n % 2:
        raise ValueError(f"plat closure needs an even strand count, got {n}")
    rescale, scale, w = _plat_rescale(braid, k)
    basis = enumerate_paths(n, k)
    alpha = basis.index[alternating_path(n)]
    e = np.zeros(len(basis), dtype=complex)
    e[alpha] = 1.0
    amp = apply_braid(braid, e, k)[alpha]
    if cfg.mode == "exact":
        r = complex(amp)
        samples, seed = 0, cfg.seed
    else:
        seed = cfg.resolved_seed()
        samples = plan_samples(cfg)
        re_val, im_val = np.array([amp.real]), np.array([amp.imag])

        def job(u: np.ndarray):
            return _pm1(u[:, 0], re_val), _pm1(u[:, 1], im_val)

        mx, my = _run_chunks(samples, seed, 2, job, cfg.workers)
        r = complex(mx, my)
    ref = exact_reference(braid, k, "plat") if with_reference else None
    return ApproxResult(
        "plat", n, k, cfg.mode, rescale * r, samples, r.real, r.imag, rescale,
        cfg.epsilon * scale, seed, ref, {"writhe": w, "normalization_N": normalization_N(n, k)},
    )


def exact_reference(braid: BraidWord, k: int, closure: str = "trace") -> complex:
    """Deterministic V(exp(2 pi i/k)) from the weighted trace of the path model.

    The plat value goes through Tr_n(phi(B) Phi_1 Phi_3 ... Phi_{n-1}), the
    trace closure of the braid stacked on n/2 capcups.
    """
    n = braid.strands
    a_root = unit_A(k)
    d = coefficient_table(k).d
    op = phi_braid(braid, k)
    if closure == "trace":
        w = exponent_sum(braid)
        return (-a_root) ** (3 * w) * d ** (n - 1) * weighted_trace_Tr_n(op)
    if closure != "plat":
        raise ValueError(f"unknown closure {closure!r}")
    if n % 2:
        raise ValueError(f"plat closure needs an even strand count, got {n}")
    _, w = orient_and_writhe(close(braid, "plat"))
    capped = op @ capcup_product(n, k, range(1, n, 2))
    return (-a_root) ** (3 * w) * d ** (n - 1) * weighted_trace_Tr_n(capped)
