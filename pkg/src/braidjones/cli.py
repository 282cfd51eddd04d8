"""Command-line front end.

Exit codes: 0 success, 1 computation error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .braid import BraidError, BraidWord, close, orient_and_writhe, parse_braid
from .bracket import DEFAULT_MAX_CROSSINGS, bracket, jones_exact
from .circuit import emit_text, synthesize_braid, synthesize_hadamard_test
from .estimators import (
    RNG_ALGORITHM,
    EstimatorConfig,
    approx_jones_plat,
    approx_jones_trace,
    block_probabilities,
)
from .laurent import LaurentPoly, lp_eval, unit_A
from .path_model import enumerate_paths, normalization_N, path_counts
from .temperley_lieb import DEFAULT_MAX_STRANDS, Tangle, jones_via_trace
from .verify import run_checks

CONVENTIONS = {
    "chirality": "positive letter i is sigma_i: strand i crosses over strand i+1",
    "smoothing": "capcup resolution of sigma_i carries A, identity resolution A^-1",
    "A": "i*exp(-i*pi/(2k)), so t = A^-4 = exp(2*pi*i/k) and d = -A^2-A^-2 = 2cos(pi/k)",
    "orientation": "each component leaves its topmost-leftmost point along a downward strand",
    "word_order": "first letter at the top; phi(B) = phi(g1)...phi(gm)",
    "rng": RNG_ALGORITHM,
}


class _Float17:
    __slots__ = ("value",)

    def __init__(self, value: float):
        self.value = value


def _prepare(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        return _Float17(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _Float17(obj.real), "im": _Float17(obj.imag)}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _prepare(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(doc: dict) -> str:
    """JSON with fixed key order and every float printed with 17 significant digits."""
    floats: list[float] = []

    def default(o: Any) -> Any:
        if isinstance(o, _Float17):
            floats.append(o.value)
            return f"\x00F{len(floats) - 1}\x00"
        raise TypeError

    text = json.dumps(_prepare(doc), default=default, indent=2)
    for idx, value in enumerate(floats):
        text = text.replace(f'"\\u0000F{idx}\\u0000"', format(value, ".17g"), 1)
    return text


def _poly_doc(p: LaurentPoly, k: int | None) -> dict:
    doc: dict[str, Any] = {"terms": p.to_json(), "text": str(p)}
    if k is not None:
        doc["value"] = lp_eval(p, unit_A(k))
    return doc


def _read_braid(args: argparse.Namespace) -> BraidWord:
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            return parse_braid(fh.read())
    if args.braid is None:
        raise BraidError("give a braid inline or with --file")
    return parse_braid(args.braid)


def _envelope(command: str, k: int | None, body: dict) -> dict:
    conventions = dict(CONVENTIONS)
    if k is not None:
        conventions["A_value"] = unit_A(k)
        conventions["k"] = k
    return {"command": command, "version": __version__, "conventions": conventions, **body}


def _cmd_bracket(args) -> dict:
    braid = _read_braid(args)
    diagram = close(braid, args.closure)
    return {"braid": braid.to_json(), "closure": args.closure,
            "bracket": _poly_doc(bracket(diagram, args.max_crossings), args.k)}


def _cmd_jones_exact(args) -> dict:
    braid = _read_braid(args)
    diagram = close(braid, args.closure)
    _, w = orient_and_writhe(diagram)
    return {"braid": braid.to_json(), "closure": args.closure, "writhe": w,
            "jones": _poly_doc(jones_exact(diagram, args.max_crossings), args.k)}


def _cmd_jones_tl(args) -> dict:
    braid = _read_braid(args)
    tangle = Tangle.from_braid(braid)
    if args.closure == "plat":
        _, w = orient_and_writhe(close(braid, "plat"))
        tangle = Tangle(braid.strands, tangle.letters + tuple(("C", i) for i in range(1, braid.strands, 2)))
    else:
        _, w = orient_and_writhe(close(braid, "trace"))
    poly = jones_via_trace(tangle, w, max_strands=args.max_strands)
    return {"braid": braid.to_json(), "closure": args.closure, "writhe": w, "jones": _poly_doc(poly, args.k)}


def _cmd_jones_approx(args) -> dict:
    braid = _read_braid(args)
    cfg = EstimatorConfig(args.epsilon, args.delta, args.seed, args.mode, args.workers)
    if cfg.mode == "sampled" and cfg.seed is None:
        cfg = EstimatorConfig(cfg.epsilon, cfg.delta, cfg.resolved_seed(), cfg.mode, cfg.workers)
        print(f"seed: {cfg.seed}", file=sys.stderr)
    fn = approx_jones_trace if args.closure == "trace" else approx_jones_plat
    res = fn(braid, args.k, cfg, with_reference=args.reference)
    return {"braid": braid.to_json(), "result": res.to_dict()}


def _cmd_sample_path(args) -> dict:
    from .estimators import sample_weighted_path

    rng = np.random.Generator(np.random.Philox(key=args.seed))
    basis = enumerate_paths(args.n, args.k)
    counts = path_counts(args.n, args.k)[args.n]
    return {
        "n": args.n,
        "seed": args.seed,
        "paths": [sample_weighted_path(args.n, args.k, rng) for _ in range(args.count)],
        "diagnostics": {
            "basis_size": len(basis),
            "block_dimensions": {str(ell): counts[ell] for ell in range(1, args.k) if counts[ell]},
            "block_probabilities": {str(e): p for e, p in block_probabilities(args.n, args.k).items()},
            "normalization_N": normalization_N(args.n, args.k),
        },
    }


def _cmd_emit_circuit(args) -> dict | str:
    braid = _read_braid(args)
    if args.hadamard_test:
        circ = synthesize_hadamard_test(braid, args.k, args.hadamard_test, args.part)
    else:
        circ = synthesize_braid(braid, args.k)
    text = emit_text(circ)
    if args.format == "json":
        return {"braid": braid.to_json(), "qubits": circ.num_qubits,
                "macro_gates": circ.macro_gate_count(), "ir": text}
    return text


def _cmd_verify(args) -> dict:
    results = run_checks(args.level, args.seed if args.seed is not None else 2024)
    return {"level": args.level,
            "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail,
                        "seconds": round(r.seconds, 3)} for r in results],
            "all_passed": all(r.passed for r in results)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="braidjones", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def braid_args(p, closure=True):
        p.add_argument("braid", nargs="?", help='braid as "n: g1 g2 ..." or JSON')
        p.add_argument("--file", help="read the braid from a file")
        if closure:
            p.add_argument("--closure", choices=("trace", "plat"), default="trace")
        p.add_argument("--format", choices=("json", "csv", "text"), default="json")

    p = sub.add_parser("bracket", help="Kauffman bracket by state sum")
    braid_args(p)
    p.add_argument("--k", type=int, default=None, help="also evaluate at A for this k")
    p.add_argument("--max-crossings", type=int, default=DEFAULT_MAX_CROSSINGS)
    p.set_defaults(func=_cmd_bracket)

    p = sub.add_parser("jones-exact", help="Jones polynomial by state sum")
    braid_args(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--max-crossings", type=int, default=DEFAULT_MAX_CROSSINGS)
    p.set_defaults(func=_cmd_jones_exact)

    p = sub.add_parser("jones-tl", help="Jones polynomial by Temperley-Lieb Markov trace")
    braid_args(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--max-strands", type=int, default=DEFAULT_MAX_STRANDS)
    p.set_defaults(func=_cmd_jones_tl)

    p = sub.add_parser("jones-approx", help="simulated randomized estimator")
    braid_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mode", choices=("exact", "sampled"), default="sampled")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--reference", action="store_true", help="also compute the exact value")
    p.set_defaults(func=_cmd_jones_approx)

    p = sub.add_parser("sample-path", help="draw weighted paths and show block diagnostics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.set_defaults(func=_cmd_sample_path)

    p = sub.add_parser("emit-circuit", help="compile phi(B) to the text circuit IR")
    braid_args(p, closure=False)
    p.set_defaults(format="text")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--hadamard-test", metavar="PATH", help="wrap in a Hadamard test on this input path")
    p.add_argument("--part", choices=("re", "im"), default="re")
    p.set_defaults(func=_cmd_emit_circuit)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--level", choices=tuple(("quick", "full")), default="quick")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.set_defaults(func=_cmd_verify)
    return parser


def _flatten(doc: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(doc, dict):
        rows = []
        for key, value in doc.items():
            rows += _flatten(value, f"{prefix}.{key}" if prefix else str(key))
        return rows
    if isinstance(doc, list):
        rows = []
        for idx, value in enumerate(doc):
            rows += _flatten(value, f"{prefix}[{idx}]")
        return rows
    if isinstance(doc, _Float17):
        return [(prefix, format(doc.value, ".17g"))]
    if isinstance(doc, bool):
        return [(prefix, "true" if doc else "false")]
    return [(prefix, doc)]


def _render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(doc)
    rows = _flatten(_prepare(doc))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("key", "value"))
        writer.writerows(rows)
        return buf.getvalue().rstrip("\n")
    return "\n".join(f"{key}: {value}" for key, value in rows)


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        body = args.func(args)
    except BraidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if isinstance(body, str):
        out.write(body)
        return 0
    doc = _envelope(args.command, getattr(args, "k", None), body)
    out.write(_render(doc, args.format) + "\n")
    if args.command == "verify" and not body["all_passed"]:
        return 1
    return 0


def main() -> None:
    sys.exit(run())
