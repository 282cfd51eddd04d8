"""Gate-level circuits for phi(B) built with a position counter register.

Register layout (global qubit indices):

* ``0 .. n-1``        path qubits p0..p{n-1} (p0 is the first step)
* ``n .. n+c-1``      counter c0..c{c-1}, c0 most significant, c = ceil(log2 2k)
* ``n+c``             Hadamard-test ancilla a0, when present

Each crossing on strands (i, i+1) is a block: walk the counter over the
first i-1 path qubits, apply one macro-gate on counter + (p_{i-1}, p_i),
walk back. Blocks run in time order, so the last braid letter goes first
and the circuit unitary equals phi(g_1) ... phi(g_m).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .braid import BraidWord
from .laurent import unit_A
from .path_model import BlockOperator, coefficient_table, enumerate_paths

__all__ = [
    "GATE_KINDS",
    "MAX_SIM_QUBITS",
    "Gate",
    "Circuit",
    "CircuitError",
    "counter_qubits",
    "counter_walk",
    "counter_update_matrix",
    "local_crossing_gate",
    "synthesize_braid",
    "synthesize_hadamard_test",
    "simulate",
    "hadamard_expectation",
    "circuit_to_matrix",
    "counter_returns_clean",
    "emit_text",
    "parse_text",
]

GATE_KINDS = ("counter-update", "local-crossing", "hadamard", "phase-prep", "measure")
MAX_SIM_QUBITS = 22
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S_DAG = np.array([[1, 0], [0, -1j]], dtype=complex)


class CircuitError(ValueError):
    pass


def counter_qubits(k: int) -> int:
    return math.ceil(math.log2(2 * k))


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    source: int | None = None     # counter-update: the path qubit read
    step: int = 0                 # counter-update: +1 adds (2b-1), -1 subtracts it
    matrix: int | None = None     # index into Circuit.matrices

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")

    @property
    def width(self) -> int:
        return len(self.targets) + len(self.controls) + (self.source is not None)


@dataclass
class Circuit:
    n: int
    k: int
    ancilla: bool = False
    gates: list[Gate] = field(default_factory=list)
    matrices: list[np.ndarray] = field(default_factory=list)
    input_path: str | None = None
    part: str | None = None

    @property
    def counter(self) -> int:
        return counter_qubits(self.k)

    @property
    def modulus(self) -> int:
        return 2 * self.k

    @property
    def num_qubits(self) -> int:
        return self.n + self.counter + int(self.ancilla)

    @property
    def counter_register(self) -> tuple[int, ...]:
        return tuple(range(self.n, self.n + self.counter))

    @property
    def ancilla_qubit(self) -> int | None:
        return self.n + self.counter if self.ancilla else None

    def add_matrix(self, m: np.ndarray) -> int:
        for idx, existing in enumerate(self.matrices):
            if existing.shape == m.shape and np.array_equal(existing, m):
                return idx
        self.matrices.append(np.array(m, dtype=complex))
        return len(self.matrices) - 1

    def macro_gate_count(self) -> int:
        return sum(g.kind in ("counter-update", "local-crossing") for g in self.gates)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            (self.n, self.k, self.ancilla, self.input_path, self.part, self.gates)
            == (other.n, other.k, other.ancilla, other.input_path, other.part, other.gates)
            and len(self.matrices) == len(other.matrices)
            and all(np.array_equal(a, b) for a, b in zip(self.matrices, other.matrices))
        )


# --- building blocks ----------------------------------------------------------

def counter_walk(
    i: int, n: int, k: int, direction: str = "compute", controls: tuple[int, ...] = ()
) -> list[Gate]:
    """Counter updates reading path qubits 1..i-1; leaves z_i in the counter."""
    if not 1 <= i <= n - 1:
        raise CircuitError(f"crossing index {i} out of range for n={n}")
    if direction not in ("compute", "uncompute"):
        raise CircuitError(f"unknown direction {direction!r}")
    counter = tuple(range(n, n + counter_qubits(k)))
    order = range(i - 1) if direction == "compute" else reversed(range(i - 1))
    step = 1 if direction == "compute" else -1
    return [Gate("counter-update", counter, controls, source=j, step=step) for j in order]


@lru_cache(maxsize=None)
def counter_update_matrix(k: int, step: int) -> np.ndarray:
    """Permutation on (source bit, counter): l -> l + step*(2b-1) mod 2k; l >= 2k fixed."""
    c = counter_qubits(k)
    dim = 2 ** (c + 1)
    unitary = np.zeros((dim, dim), dtype=complex)
    for b in (0, 1):
        for ell in range(2 ** c):
            new = (ell + step * (2 * b - 1)) % (2 * k) if ell < 2 * k else ell
            unitary[b * 2 ** c + new, b * 2 ** c + ell] = 1.0
    unitary.setflags(write=False)
    return unitary


@lru_cache(maxsize=None)
def local_crossing_gate(k: int, sign: int) -> np.ndarray:
    """Unitary on counter + two path bits, index = 4*l + 2*b_i + b_{i+1}."""
    c = counter_qubits(k)
    a_root = unit_A(k)
    a, a_inv = (a_root, 1 / a_root) if sign > 0 else (1 / a_root, a_root)
    lam = coefficient_table(k).lam
    unitary = np.eye(4 * 2 ** c, dtype=complex)
    for ell in range(1, k):
        base = 4 * ell
        off = math.sqrt(lam[ell + 1] * lam[ell - 1]) / lam[ell]
        mixer = np.array([[lam[ell - 1] / lam[ell], off], [off, lam[ell + 1] / lam[ell]]])
        unitary[base, base] = a_inv                                  # 00
        unitary[base + 3, base + 3] = a_inv                          # 11
        unitary[base + 1: base + 3, base + 1: base + 3] = a * mixer + a_inv * np.eye(2)
    unitary.setflags(write=False)
    return unitary


def _append_braid(circ: Circuit, braid: BraidWord, controls: tuple[int, ...]) -> None:
    n, k = braid.strands, circ.k
    counter = circ.counter_register
    for g in reversed(braid.word):
        i = abs(g)
        circ.gates.extend(counter_walk(i, n, k, "compute", controls))
        idx = circ.add_matrix(local_crossing_gate(k, 1 if g > 0 else -1))
        circ.gates.append(Gate("local-crossing", counter + (i - 1, i), controls, matrix=idx))
        circ.gates.extend(counter_walk(i, n, k, "uncompute", controls))


def synthesize_braid(braid: BraidWord, k: int) -> Circuit:
    circ = Circuit(braid.strands, k)
    _append_braid(circ, braid, ())
    return circ


def synthesize_hadamard_test(braid: BraidWord, k: int, path: str, part: str = "re") -> Circuit:
    """Ancilla prep, ancilla-controlled phi(B), Hadamard, measurement."""
    if part not in ("re", "im"):
        raise CircuitError(f"part must be 're' or 'im', got {part!r}")
    basis = enumerate_paths(braid.strands, k)
    if path not in basis.index:
        raise CircuitError(f"{path!r} is not an admissible path")
    circ = Circuit(braid.strands, k, ancilla=True, input_path=path, part=part)
    anc = circ.ancilla_qubit
    circ.gates.append(Gate("hadamard", (anc,)))
    if part == "im":
        circ.gates.append(Gate("phase-prep", (anc,), matrix=circ.add_matrix(_S_DAG)))
    _append_braid(circ, braid, (anc,))
    circ.gates.append(Gate("hadamard", (anc,)))
    circ.gates.append(Gate("measure", (anc,)))
    return circ


# --- statevector simulation ---------------------------------------------------

def _apply(psi: np.ndarray, unitary: np.ndarray, targets: Sequence[int], controls: Sequence[int]) -> None:
    """In-place U on ``targets`` of psi (shape (2,)*Q + (batch,)), controlled on all-ones."""
    num_q = psi.ndim - 1
    index: list = [slice(None)] * psi.ndim
    for c in controls:
        index[c] = 1
    sub = psi[tuple(index)]
    remaining = [q for q in range(num_q + 1) if q not in controls]
    axes = [remaining.index(t) for t in targets]
    moved = np.moveaxis(sub, axes, range(len(targets)))
    shape = moved.shape
    out = (unitary @ moved.reshape(2 ** len(targets), -1)).reshape(shape)
    psi[tuple(index)] = np.moveaxis(out, range(len(targets)), axes)


def _gate_unitary(circ: Circuit, gate: Gate) -> tuple[np.ndarray, tuple[int, ...]]:
    if gate.kind == "counter-update":
        return counter_update_matrix(circ.k, gate.step), (gate.source,) + gate.targets
    if gate.kind == "hadamard":
        return _H, gate.targets
    return circ.matrices[gate.matrix], gate.targets


def _basis_states(circ: Circuit, paths: Sequence[str]) -> np.ndarray:
    num_q = circ.num_qubits
    psi = np.zeros((2,) * num_q + (len(paths),), dtype=complex)
    counter_bits = format(1, f"0{circ.counter}b")
    for col, p in enumerate(paths):
        bits = [int(b) for b in p] + [int(b) for b in counter_bits] + [0] * int(circ.ancilla)
        psi[tuple(bits) + (col,)] = 1.0
    return psi


def simulate(circ: Circuit, paths: Sequence[str] | None = None, stop: int | None = None) -> np.ndarray:
    """Run the gates (up to ``stop``) on |p>|counter=1>|0> for each input path.

    Returns an array of shape (2,)*Q + (len(paths),). ``measure`` gates are
    declarations only and leave the state unchanged.
    """
    if circ.num_qubits > MAX_SIM_QUBITS:
        raise CircuitError(f"{circ.num_qubits} qubits exceeds the simulation cap of {MAX_SIM_QUBITS}")
    if paths is None:
        if circ.input_path is None:
            raise CircuitError("no input path given")
        paths = [circ.input_path]
    psi = _basis_states(circ, paths)
    for gate in circ.gates[:stop]:
        if gate.kind == "measure":
            continue
        unitary, targets = _gate_unitary(circ, gate)
        _apply(psi, unitary, targets, gate.controls)
    return psi


def hadamard_expectation(circ: Circuit) -> float:
    """P(ancilla = 0) - P(ancilla = 1) after the circuit."""
    if not circ.ancilla:
        raise CircuitError("circuit has no test ancilla")
    psi = simulate(circ)[..., 0]
    probs = np.abs(psi) ** 2
    anc = circ.ancilla_qubit
    p0 = float(np.take(probs, 0, axis=anc).sum())
    p1 = float(np.take(probs, 1, axis=anc).sum())
    return p0 - p1


def _restrict(circ: Circuit, psi: np.ndarray, paths: Sequence[str]) -> np.ndarray:
    """Amplitudes <p'|<counter=1| of each column, as a len(paths) x batch matrix."""
    counter_bits = tuple(int(b) for b in format(1, f"0{circ.counter}b"))
    rows = []
    for p in paths:
        rows.append(psi[tuple(int(b) for b in p) + counter_bits + (0,) * int(circ.ancilla)])
    return np.array(rows)


def circuit_to_matrix(circ: Circuit) -> BlockOperator:
    """The circuit restricted to span{|p>|counter=1>} over admissible paths."""
    basis = enumerate_paths(circ.n, circ.k)
    psi = simulate(circ, basis.paths)
    return BlockOperator.from_dense(basis, _restrict(circ, psi, basis.paths), atol=1e-12)


def counter_returns_clean(circ: Circuit) -> bool:
    """After every crossing block, all amplitude sits on counter = 1 (exact zeros elsewhere)."""
    basis = enumerate_paths(circ.n, circ.k)
    ends = [idx + 1 for idx, g in enumerate(circ.gates) if g.kind == "local-crossing"]
    # a block ends after its uncompute walk: just before the next walk or local gate
    boundaries = []
    for pos in ends:
        j = pos
        while j < len(circ.gates) and circ.gates[j].kind == "counter-update" and circ.gates[j].step < 0:
            j += 1
        boundaries.append(j)
    for stop in boundaries or [len(circ.gates)]:
        psi = simulate(circ, basis.paths, stop=stop)
        counter_axes = tuple(circ.counter_register)
        kept = psi.copy()
        index: list = [slice(None)] * psi.ndim
        for q, b in zip(counter_axes, format(1, f"0{circ.counter}b")):
            index[q] = int(b)
        kept[tuple(index)] = 0
        if np.any(kept != 0):
            return False
    return True


# --- text IR ------------------------------------------------------------------

def _qname(circ: Circuit, q: int) -> str:
    if q < circ.n:
        return f"p{q}"
    if q < circ.n + circ.counter:
        return f"c{q - circ.n}"
    return "a0"


def _qindex(circ: Circuit, name: str) -> int:
    kind, num = name[0], int(name[1:])
    if kind == "p" and num < circ.n:
        return num
    if kind == "c" and num < circ.counter:
        return circ.n + num
    if name == "a0" and circ.ancilla:
        return circ.n + circ.counter
    raise CircuitError(f"unknown qubit {name!r}")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def emit_text(circ: Circuit) -> str:
    """Line-oriented IR; see docs/circuit_ir.md for the grammar."""
    lines = [
        "JONESQIR 1",
        f"REGISTERS path={circ.n} counter={circ.counter} ancilla={int(circ.ancilla)}",
        f"K {circ.k}",
        f"MODULUS {circ.modulus}",
    ]
    if circ.input_path is not None:
        lines.append(f"INIT path={circ.input_path} counter=1")
    if circ.part is not None:
        lines.append(f"PART {circ.part}")
    for g in circ.gates:
        fields = [f"GATE {g.kind}", "targets=" + ",".join(_qname(circ, q) for q in g.targets)]
        if g.controls:
            fields.append("controls=" + ",".join(_qname(circ, q) for q in g.controls))
        if g.kind == "counter-update":
            fields += [f"source={_qname(circ, g.source)}", f"step={g.step:+d}", f"modulus={circ.modulus}"]
        if g.matrix is not None:
            fields.append(f"matrix={g.matrix}")
        lines.append(" ".join(fields))
    for idx, m in enumerate(circ.matrices):
        lines.append(f"MATRIX {idx} dim={m.shape[0]}")
        for row in m:
            lines.append(" ".join(f"{_fmt(z.real)},{_fmt(z.imag)}" for z in row))
    lines.append("END")
    return "\n".join(lines) + "\n"


def parse_text(text: str) -> Circuit:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0].strip() != "JONESQIR 1":
        raise CircuitError("missing 'JONESQIR 1' header")
    header: dict[str, str] = {}
    pos = 1
    while pos < len(lines) and not lines[pos].startswith(("GATE", "MATRIX", "END")):
        key, _, rest = lines[pos].partition(" ")
        header[key] = rest
        pos += 1
    regs = dict(item.split("=") for item in header["REGISTERS"].split())
    k = int(header["K"])
    circ = Circuit(int(regs["path"]), k, ancilla=bool(int(regs["ancilla"])))
    if int(regs["counter"]) != circ.counter or int(header["MODULUS"]) != circ.modulus:
        raise CircuitError("register sizes do not match k")
    if "INIT" in header:
        init = dict(item.split("=") for item in header["INIT"].split())
        circ.input_path = init["path"]
    if "PART" in header:
        circ.part = header["PART"].strip()
    while pos < len(lines) and lines[pos].startswith("GATE"):
        tokens = lines[pos].split()
        kind = tokens[1]
        attrs = dict(tok.split("=", 1) for tok in tokens[2:])
        names = lambda key: tuple(_qindex(circ, q) for q in attrs[key].split(",")) if key in attrs else ()  # noqa: E731
        if kind == "counter-update" and int(attrs["modulus"]) != circ.modulus:
            raise CircuitError("counter-update modulus disagrees with header")
        circ.gates.append(Gate(
            kind,
            names("targets"),
            names("controls"),
            source=_qindex(circ, attrs["source"]) if "source" in attrs else None,
            step=int(attrs.get("step", 0)),
            matrix=int(attrs["matrix"]) if "matrix" in attrs else None,
        ))
        pos += 1
    while pos < len(lines) and lines[pos].startswith("MATRIX"):
        _, idx, dim = lines[pos].split()
        dim_n = int(dim.split("=")[1])
        if int(idx) != len(circ.matrices):
            raise CircuitError("matrices must be numbered consecutively")
        rows = []
        for r in lines[pos + 1: pos + 1 + dim_n]:
            rows.append([complex(float(a), float(b)) for a, b in (z.split(",") for z in r.split())])
        circ.matrices.append(np.array(rows, dtype=complex))
        pos += 1 + dim_n
    if pos >= len(lines) or lines[pos].strip() != "END":
        raise CircuitError("missing END")
    return circ
