"""Concrete reference semantics used to validate the symbolic engine."""

from .check import BruteForceResult, ReplayResult, brute_force, replay, violated
from .sim import Evaluator, Simulator, Trace, simulate

__all__ = [
    "BruteForceResult",
    "Evaluator",
    "ReplayResult",
    "Simulator",
    "Trace",
    "brute_force",
    "replay",
    "simulate",
    "violated",
]
