"""Fragment exploration of single always blocks and their composition."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from ..frontend import ast as A
from ..preprocess.partition import AlwaysPartition
from ..preprocess.pathcode import BlockLayout
from ..smt.solver import BOTH_FEASIBLE, IMPLIES_FALSE, IMPLIES_TRUE, Solver, Unknown, Unsat
from ..symcore.execute import ExecState, Fork, SymContext, apply_arm, push_stmts, run_until_fork
from ..symcore.expr import FALSE, SExpr
from ..symcore.state import PathCondition, SymbolicStore


@dataclass
class Counters:
    statements: int = 0
    branch_points: int = 0
    fragments: int = 0
    composed_paths: int = 0
    paths_completed: int = 0
    unconfirmed: int = 0
    by_instance: dict[str, int] = field(default_factory=dict)
    block_instance: dict[str, str] = field(default_factory=dict)

    def visit(self, block_id: str, stmt: A.Stmt) -> None:
        self.statements += 1
        inst = self.block_instance.get(block_id, block_id.rsplit("#", 1)[0])
        self.by_instance[inst] = self.by_instance.get(inst, 0) + 1


@dataclass
class PathFragment:
    block_id: str
    pathcode: str
    conds: list[SExpr]
    delta: dict[str, SExpr]
    statements: int = 0
    branch_points: int = 0
    unconfirmed: bool = False


@dataclass
class ComposedPath:
    fragments: tuple[PathFragment, ...]
    pi: list[SExpr]
    pending: dict[str, SExpr]
    unconfirmed: bool = False

    @property
    def pathcodes(self) -> dict[str, str]:
        return {f.block_id: f.pathcode for f in self.fragments}


def feasible_arms(fork: Fork, pi: list[SExpr], solver: Solver, phase: str = "feasibility"):
    """Arms of ``fork`` that can be taken under ``pi`` plus an "unknown" flag."""
    arms = fork.arms
    if len(arms) == 2:
        verdict = solver.check_implied(pi, arms[0].cond, phase)
        if verdict == IMPLIES_TRUE:
            return [arms[0]], False
        if verdict == IMPLIES_FALSE:
            return [arms[1]], False
        return list(arms), False
    out = []
    unknown = False
    for arm in arms:
        if arm.cond is FALSE:
            continue
        v = solver.check_sat(list(pi) + [arm.cond], phase)
        if isinstance(v, Unsat):
            continue
        unknown = unknown or isinstance(v, Unknown)
        out.append(arm)
    return out, unknown


def traverse(
    start: ExecState,
    base_pi: list[SExpr],
    ctx: SymContext,
    solver: Solver,
    counters: Counters,
) -> Iterator[tuple[ExecState, int, int, bool]]:
    """Depth-first forking traversal from ``start``.

    Yields each completed state with the statement and branch-point visits on
    its root-to-leaf path.  ``start.pi`` holds only the conditions added here.
    """
    stack = [(start, 0, 0, False)]
    while stack:
        st, stmts, branches, unk = stack.pop()
        seen = counters.statements
        fork = run_until_fork(st, ctx, counters.visit)
        stmts += counters.statements - seen
        if fork is None:
            yield st, stmts, branches, unk
            continue
        arms, arm_unknown = feasible_arms(fork, base_pi + st.pi, solver)
        counters.branch_points += len(arms)
        children = []
        for k, arm in enumerate(arms):
            child = st if k == len(arms) - 1 else st.copy()
            children.append((apply_arm(child, fork, arm), stmts, branches + 1, unk or arm_unknown))
        stack.extend(reversed(children))


def explore_block(
    block: AlwaysPartition,
    base_store: SymbolicStore,
    base_pi: list[SExpr],
    layout: BlockLayout,
    ctx: SymContext,
    solver: Solver,
    counters: Counters,
) -> list[PathFragment]:
    """All feasible fragments of one always block from a committed state."""
    store = base_store.copy()
    store.pending_nba.clear()
    store.nba_owner.clear()
    store.dirty.clear()
    start = ExecState(store, PathCondition(), {}, push_stmts(None, block.block_id, (block.body,)))
    out = []
    for st, stmts, branches, unk in traverse(start, list(base_pi), ctx, solver, counters):
        code = layout.encode(st.outcomes.get(block.block_id, {}))
        out.append(PathFragment(block.block_id, code, list(st.pi), dict(st.store.pending_nba), stmts, branches, unk))
    counters.fragments += len(out)
    return out


def compose(
    fragment_sets: list[list[PathFragment]],
    base_pi: list[SExpr],
    solver: Solver,
    counters: Optional[Counters] = None,
) -> Iterator[ComposedPath]:
    """Feasible members of the cross product, lazily, in lexicographic order.

    A tuple in which at most one fragment contributes conditions is feasible
    already (each fragment was checked against ``base_pi``), so only tuples
    combining two or more constrained fragments reach the solver.
    """
    for combo in itertools.product(*fragment_sets):
        conds = [f.conds for f in combo if f.conds]
        pi = list(base_pi)
        for c in conds:
            pi.extend(c)
        unknown = any(f.unconfirmed for f in combo)
        if len(conds) > 1:
            v = solver.check_sat(pi, "composition")
            if isinstance(v, Unsat):
                continue
            unknown = unknown or isinstance(v, Unknown)
        pending: dict[str, SExpr] = {}
        for f in combo:
            pending.update(f.delta)
        if counters is not None:
            counters.composed_paths += 1
        yield ComposedPath(tuple(combo), pi, pending, unknown)
