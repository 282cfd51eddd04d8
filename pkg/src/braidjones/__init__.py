"""Jones polynomial evaluation for braid closures.

Exact oracles (state sum and Temperley-Lieb trace), the unitary path-model
representation at roots of unity, simulated randomized estimators and a
qubit circuit compiler share one set of conventions, listed in the README.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .braid import BraidError, BraidWord, close, orient_and_writhe, parse_braid
from .bracket import OracleCapError, bracket, jones_exact, jones_value
from .circuit import Circuit, circuit_to_matrix, emit_text, parse_text, synthesize_braid
from .estimators import (
    ApproxResult,
    EstimatorConfig,
    approx_jones_plat,
    approx_jones_trace,
    exact_reference,
)
from .laurent import LaurentPoly, unit_A
from .path_model import BlockOperator, enumerate_paths, phi_braid
from .temperley_lieb import TLElement, jones_via_trace, rho_A

__all__ = [
    "__version__",
    "BraidError",
    "BraidWord",
    "close",
    "orient_and_writhe",
    "parse_braid",
    "OracleCapError",
    "bracket",
    "jones_exact",
    "jones_value",
    "Circuit",
    "circuit_to_matrix",
    "emit_text",
    "parse_text",
    "synthesize_braid",
    "ApproxResult",
    "EstimatorConfig",
    "approx_jones_plat",
    "approx_jones_trace",
    "exact_reference",
    "LaurentPoly",
    "unit_A",
    "BlockOperator",
    "enumerate_paths",
    "phi_braid",
    "TLElement",
    "jones_via_trace",
    "rho_A",
]
