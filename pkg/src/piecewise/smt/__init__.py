"""Bit-vector satisfiability: lowering, external solver sessions, enumeration."""

from .lower import LoweredQuery, literal, lower, lower_query
from .sexp import parse_model
from .solver import (
    BOTH_FEASIBLE,
    ENUM_LIMIT_BITS,
    IMPLIES_FALSE,
    IMPLIES_TRUE,
    EnumerationSolver,
    ExternalSolver,
    Sat,
    Solver,
    SolverStats,
    Unknown,
    Unsat,
    Verdict,
    make_solver,
)

__all__ = [
    "BOTH_FEASIBLE",
    "ENUM_LIMIT_BITS",
    "EnumerationSolver",
    "ExternalSolver",
    "IMPLIES_FALSE",
    "IMPLIES_TRUE",
    "LoweredQuery",
    "Sat",
    "Solver",
    "SolverStats",
    "Unknown",
    "Unsat",
    "Verdict",
    "literal",
    "lower",
    "lower_query",
    "make_solver",
    "parse_model",
]
