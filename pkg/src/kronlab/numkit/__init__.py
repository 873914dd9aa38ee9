"""Numeric substrate: exact symbolic reals, high-precision reals, LLL, relations."""

from .lattice import (DEFAULT_DELTA, DependentBasisError, NearestPlane, gram_determinant,
                      gram_schmidt, lll_reduce)
from .numeric import (DEFAULT_PRECISION, NumericReal, UnassignedSymbolError, chord,
                      evaluate_expression, evaluate_to_float, power_chord, sym_eval,
                      to_fraction)
from .relations import (InsufficientPrecisionError, IntegerRelation, find_integer_relation,
                        relation_residual)
from .symbolic import ONE, Monomial, SymbolicReal, as_fraction, format_fraction, fresh_symbols

__all__ = [
    "DEFAULT_DELTA", "DEFAULT_PRECISION", "DependentBasisError", "InsufficientPrecisionError",
    "IntegerRelation", "Monomial", "NearestPlane", "NumericReal", "ONE", "SymbolicReal",
    "UnassignedSymbolError", "as_fraction", "chord", "evaluate_expression", "evaluate_to_float",
    "find_integer_relation", "format_fraction", "fresh_symbols", "gram_determinant",
    "gram_schmidt", "lll_reduce", "power_chord", "relation_residual", "sym_eval", "to_fraction",
]
