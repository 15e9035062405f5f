"""Fragment exploration, composition and the multi-cycle driver."""

from .engine import Explorer, ExploreOptions, Leaf, baseline_explore, run
from .fragments import ComposedPath, Counters, PathFragment, compose, explore_block, feasible_arms, traverse
from .report import CounterExample, Report

__all__ = [
    "ComposedPath",
    "CounterExample",
    "Counters",
    "ExploreOptions",
    "Explorer",
    "Leaf",
    "PathFragment",
    "Report",
    "baseline_explore",
    "compose",
    "explore_block",
    "feasible_arms",
    "run",
    "traverse",
]
