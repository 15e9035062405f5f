"""Shared helpers for the test suites."""

from __future__ import annotations

import shutil
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from piecewise import samples as S
from piecewise.explorer import Explorer, ExploreOptions
from piecewise.frontend import ElaboratedDesign, elaborate, parse_assertions, parse_design
from piecewise.randgen import random_design
from piecewise.smt import Solver, make_solver

HAS_Z3 = shutil.which("z3") is not None


def load(src: str, top: str) -> ElaboratedDesign:
    return elaborate(parse_design(src), top)


def solver() -> Solver:
    return make_solver(None if HAS_Z3 else "fallback")


@dataclass
class Case:
    name: str
    source: str
    top: str
    assertions: str
    cycles: int
    brute_force_ok: bool = True  # assertion cone small enough for exhaustive simulation

    def design(self) -> ElaboratedDesign:
        return load(self.source, self.top)

    def specs(self):
        return parse_assertions(self.assertions)


FIXED = [
    Case("toy", S.TOY, "toy", S.ASSERT_TOY, 1),
    Case("toy_tied", S.TOY_TIED, "toy", "assert property (@(posedge clk) !(x == 2'd1 && y == 2'd0));\n", 1),
    Case("two_queue", S.TWO_QUEUE, "top", S.ASSERT_TWO_QUEUE + "a2: assert property (@(posedge clk) top.q2.in_use != 2'd1);\n", 2, False),
    Case("case1", S.CASE1, "case1", "assert property (@(posedge clk) read_data != 4'd9);\n", 1),
    Case("case2", S.CASE2, "case2", "assert property (@(posedge clk) en |-> (read_data != 4'd3));\na: assert property (@(posedge clk) content != 4'd6);\n", 2),
    Case("case2a", S.CASE2A, "case2a", "assert property (@(posedge clk) read_data != 4'd4);\n", 2),
    Case("case_stmt", S.CASE_STMT, "casedemo", "assert property (@(posedge clk) r != 4'd10);\n", 1),
    Case("chain", S.CHAIN, "chain", "assert property (@(posedge clk) o != 4'd3);\n", 3),
]

#: seeds of the randomized part of the corpus
RANDOM_SEEDS = list(range(24))


@lru_cache(maxsize=None)
def random_cases() -> tuple[Case, ...]:
    out = []
    for s in RANDOM_SEEDS:
        rc = random_design(s)
        out.append(Case(f"rnd{s}", rc.source, rc.top, rc.assertions, rc.cycles))
    return tuple(out)


def corpus() -> list[Case]:
    return FIXED + list(random_cases())


def path_set(explorer: Explorer, cycles: int) -> set:
    return {tuple(tuple(sorted(pc.items())) for pc in leaf.history) for leaf in explorer.leaves(cycles)}


def explorer(case: Case, mode: str, sol: Optional[Solver] = None, **opts) -> Explorer:
    options = ExploreOptions(mode=mode, max_cycles=case.cycles, **opts)
    return Explorer(case.design(), case.specs(), options, sol or solver())


def verdicts(report) -> dict[str, int]:
    return {v.assertion: v.cycle for v in report.violations}
