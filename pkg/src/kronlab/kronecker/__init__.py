"""Kronecker sets and the approximation of unimodular targets by characters."""

from .approx import (DEFAULT_GRID_BUDGET, DEFAULT_LATTICE_BUDGET, DEFAULT_T_MIN, GRID, LATTICE,
                     dist_bound, grid_best, grid_search, lattice_search, residuals,
                     rigidity_witness, solve_kronecker_approx)
from .construct import (SYMBOLIC_CERT, ConstructionError, build_kronecker_points,
                        korner_independent, korner_points, numeric_certificate,
                        verify_construction)
from .types import (FOUND, NOT_FOUND, ApproxWitness, KroneckerSetSpec, UnimodularTarget,
                    WeakTarget)
from .verify import (CANNOT, CONVERGES, NOT_YET, KroneckerReport, WeakReport,
                     atomic_obstruction, obstruction_bound, pairing, verify_kronecker_property,
                     weak_convergence_check)

__all__ = [
    "ApproxWitness", "CANNOT", "CONVERGES", "ConstructionError", "DEFAULT_GRID_BUDGET",
    "DEFAULT_LATTICE_BUDGET", "DEFAULT_T_MIN", "FOUND", "GRID", "KroneckerReport",
    "KroneckerSetSpec", "LATTICE", "NOT_FOUND", "NOT_YET", "SYMBOLIC_CERT", "UnimodularTarget",
    "WeakReport", "WeakTarget", "atomic_obstruction", "build_kronecker_points", "dist_bound",
    "grid_best", "grid_search", "korner_independent", "korner_points", "lattice_search",
    "numeric_certificate", "obstruction_bound", "pairing", "residuals", "rigidity_witness",
    "solve_kronecker_approx", "verify_construction", "verify_kronecker_property",
    "weak_convergence_check",
]
