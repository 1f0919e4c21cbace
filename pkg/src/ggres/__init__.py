"""Resonances of the adjacency operator on geometrically finite regular graphs of groups."""

from pathlib import Path

from .algebra import LambdaPoly, LaurentPoly, SqrtQScalar, divides, laurent_det, poly_roots, to_lambda
from .core import (GeomFiniteGraph, StabilizerGraph, degree, load, load_file, operator_matrix, save,
                   validate)
from .engine import (apply_resolvent, build_H, check_bounds, classify_l2, extend_outgoing,
                     find_resonances, resonance_polynomial, resonant_states, verify_eigen_equation)

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> Path:
    return FIXTURES / name


__all__ = [
    "LambdaPoly", "LaurentPoly", "SqrtQScalar", "divides", "laurent_det", "poly_roots", "to_lambda",
    "GeomFiniteGraph", "StabilizerGraph", "degree", "load", "load_file", "operator_matrix", "save",
    "validate", "apply_resolvent", "build_H", "check_bounds", "classify_l2", "extend_outgoing",
    "find_resonances", "resonance_polynomial", "resonant_states", "verify_eigen_equation",
    "FIXTURES", "fixture",
]
