"""Multi-cycle exploration in piecewise and baseline modes."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Optional

from ..errors import BudgetExceeded, CacheMiss
from ..frontend.assertions import AssertionSpec
from ..frontend.elaborate import ElaboratedDesign
from ..preprocess import (
    PathcodeLayout,
    bind_assertions,
    build_pathcode_layout,
    check_blocking_in_sequential,
    check_write_write,
    cone_of_influence,
    detect_repeat_instances,
    module_dependency_graph,
    partition,
)
from ..preprocess.partition import AlwaysPartition
from ..smt.solver import Sat, Solver, Unknown, make_solver
from ..symcore.evaluate import substitute
from ..symcore.execute import ExecState, SymContext, commit_cycle, eval_expr, initial_store
from ..symcore.expr import FALSE, TRUE, SExpr, Sym, mk_and1, mk_not1, simplify, to_bool
from ..symcore.state import PathCondition, SymbolicStore, SymbolPool
from .fragments import ComposedPath, Counters, PathFragment, compose, explore_block, traverse
from .report import CounterExample, Report

MODES = ("piecewise", "baseline")


@dataclass
class ExploreOptions:
    mode: str = "piecewise"
    max_cycles: int = 1
    coi: bool = True
    repeat_merge: bool = True
    ternary_mode: str = "ite"
    allow_races: bool = False
    uninit: str = "symbolic"
    all_violations: bool = False
    budget_s: Optional[float] = None
    max_states: Optional[int] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.uninit not in ("symbolic", "zero"):
            raise ValueError("uninit must be 'symbolic' or 'zero'")
        if self.max_cycles < 0:
            raise ValueError("max_cycles must be non-negative")


@dataclass
class Leaf:
    """A committed state at a cycle boundary and the path that produced it."""

    store: SymbolicStore
    pi: list[SExpr]
    history: tuple[dict[str, str], ...] = ()
    unconfirmed: bool = False


@dataclass
class _Template:
    instance: str
    fragments: list[PathFragment]


class Explorer:
    """Prepared design plus options; ``run`` performs the exploration."""

    def __init__(
        self,
        design: ElaboratedDesign,
        assertions: list[AssertionSpec],
        options: Optional[ExploreOptions] = None,
        solver: Optional[Solver] = None,
    ):
        self.design = design
        self.opts = options or ExploreOptions()
        self.solver = solver or make_solver()
        self.parts = partition(design)
        check_blocking_in_sequential(self.parts)
        self.races = check_write_write(self.parts, self.opts.allow_races)
        self.ctx = SymContext.from_design(design, self.opts.ternary_mode, self.opts.allow_races)
        self.module_order = module_dependency_graph(design).order
        self.assertions = bind_assertions(design, assertions)
        self.layout: PathcodeLayout = build_pathcode_layout(self.parts, self.opts.ternary_mode)
        self.coi = cone_of_influence(design, self.assertions, self.parts) if self.opts.coi else None
        rank = {inst: k for k, inst in enumerate(self.module_order)}
        ordered = sorted(self.parts.seq, key=lambda p: (rank[p.instance], p.block.index))
        self.blocks: list[AlwaysPartition] = [
            p for p in ordered if self.coi is None or self.coi.relevant(p.block_id)
        ]
        self.pruned = [p.block_id for p in ordered if p not in self.blocks]
        self.classes: dict[str, tuple[int, list[str]]] = {}
        if self.opts.repeat_merge and self.opts.mode == "piecewise":
            for k, cls in enumerate(detect_repeat_instances(design)):
                if len(cls) > 1:
                    for inst in cls:
                        self.classes[inst] = (k, cls)
        self.counters = Counters(block_instance={p.block_id: p.instance for p in self.parts.seq})
        self.pool = SymbolPool()
        self._deadline: Optional[float] = None

    # -- one cycle -------------------------------------------------------------

    def _check_budget(self) -> None:
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise BudgetExceeded("wall-clock budget exhausted")

    def explore_cycle(self, leaf: Leaf, cycle: int) -> list[tuple[ComposedPath, Leaf]]:
        """Every feasible successor of ``leaf`` across one clock edge."""
        if self.opts.mode == "baseline":
            paths = self._baseline_paths(leaf)
        else:
            paths = self._piecewise_paths(leaf)
        out = []
        for cp in paths:
            self._check_budget()
            store = leaf.store.copy()
            store.pending_nba = dict(cp.pending)
            nxt = commit_cycle(store, self.ctx, self.pool, cycle)
            self.counters.paths_completed += 1
            if cp.unconfirmed:
                self.counters.unconfirmed += 1
            out.append(
                (cp, Leaf(nxt, cp.pi, leaf.history + (cp.pathcodes,), leaf.unconfirmed or cp.unconfirmed))
            )
        return out

    def _piecewise_paths(self, leaf: Leaf):
        sets: list[list[PathFragment]] = []
        cache: dict[tuple[int, int], _Template] = {}
        for blk in self.blocks:
            self._check_budget()
            if blk.instance in self.classes:
                key = (self.classes[blk.instance][0], blk.block.index)
                if key not in cache:
                    cache[key] = _Template(blk.instance, self._explore_abstract(blk))
                frags = self.merge_repeat_instances(cache, key, blk, leaf)
            else:
                frags = explore_block(
                    blk, leaf.store, leaf.pi, self.layout.blocks[blk.block_id], self.ctx, self.solver, self.counters
                )
            sets.append(frags)
        return compose(sets, leaf.pi, self.solver, self.counters)

    def _baseline_paths(self, leaf: Leaf):
        store = leaf.store.copy()
        store.pending_nba.clear()
        store.nba_owner.clear()
        cont = None
        for blk in reversed(self.blocks):
            cont = ((blk.block_id, blk.body), cont)
        start = ExecState(store, PathCondition(), {}, cont)
        for st, _, _, unk in traverse(start, list(leaf.pi), self.ctx, self.solver, self.counters):
            codes = {
                b.block_id: self.layout.blocks[b.block_id].encode(st.outcomes.get(b.block_id, {}))
                for b in self.blocks
            }
            self.counters.composed_paths += 1
            frags = tuple(PathFragment(bid, code, [], {}) for bid, code in codes.items())
            yield ComposedPath(frags, list(leaf.pi) + list(st.pi), dict(st.store.pending_nba), unk)

    # -- repeated instances ------------------------------------------------------

    def _placeholders(self, instance: str) -> dict[str, Sym]:
        info = self.design.instances[instance]
        return {hier: Sym(f"$ph:{local}", self.design.width(hier)) for local, hier in info.signals.items()}

    def _explore_abstract(self, blk: AlwaysPartition) -> list[PathFragment]:
        """Explore ``blk`` with every signal of its instance left as a placeholder."""
        store = SymbolicStore(dict(), dict())
        for hier, ph in self._placeholders(blk.instance).items():
            store.current[hier] = ph
            if hier in self.ctx.registers:
                store.prev_regs[hier] = ph
        return explore_block(
            blk, store, [], self.layout.blocks[blk.block_id], self.ctx, self.solver, self.counters
        )

    def merge_repeat_instances(
        self, cache: dict, key: tuple[int, int], blk: AlwaysPartition, leaf: Leaf
    ) -> list[PathFragment]:
        """Instantiate the cached fragments of an equivalent instance for ``blk``.

        Placeholders are bound to this instance's values in ``leaf`` and
        written registers are renamed into this instance; every instantiated
        fragment is re-checked against the leaf's path condition.
        """
        tpl = cache.get(key)
        if tpl is None:
            raise CacheMiss(f"no explored template for {blk.block_id}")
        src = tpl.instance + "."
        info = self.design.instances[blk.instance]
        binding = {}
        for local, hier in info.signals.items():
            read = leaf.store.read(hier, "prev")
            binding[f"$ph:{local}"] = read
        out = []
        for f in tpl.fragments:
            conds = []
            dead = False
            for c in f.conds:
                c2 = simplify(substitute(c, binding))
                if c2 is FALSE:
                    dead = True
                    break
                if c2 is not TRUE:
                    conds.append(c2)
            if dead:
                continue
            unknown = f.unconfirmed
            if conds:
                v = self.solver.check_sat(list(leaf.pi) + conds, "feasibility")
                if not isinstance(v, (Sat, Unknown)):
                    continue
                unknown = unknown or isinstance(v, Unknown)
            delta = {
                blk.instance + "." + k[len(src):]: simplify(substitute(v, binding)) for k, v in f.delta.items()
            }
            out.append(PathFragment(blk.block_id, f.pathcode, conds, delta, 0, 0, unknown))
        self.counters.fragments += len(out)
        return out

    # -- assertions and the run ---------------------------------------------------

    def violation_condition(self, a: AssertionSpec, store: SymbolicStore) -> SExpr:
        body = to_bool(eval_expr(a.body, store, "current", self.ctx))
        if a.antecedent is None:
            return mk_not1(body)
        ante = to_bool(eval_expr(a.antecedent, store, "current", self.ctx))
        return mk_and1([ante, mk_not1(body)])

    def counterexample(self, a: AssertionSpec, leaf: Leaf, cycle: int, model: dict[str, int], unk: bool):
        inputs = []
        for c in range(cycle + 1):
            for sig in self.design.top_inputs:
                value = model.get(f"{sig}@{c}", 0)
                inputs.append({"cycle": c, "signal": sig, "value_hex": format(value, "x")})
        regs = {}
        if self.opts.uninit == "symbolic":
            for r in self.design.registers:
                if self.design.signals[r].init is None:
                    regs[r] = format(model.get(f"{r}@init", 0), "x")
        return CounterExample(a.name, cycle, inputs, list(leaf.history), regs, unk)

    def check_assertions(self, leaf: Leaf, cycle: int, open_names: set[str]) -> list[CounterExample]:
        found = []
        for a in self.assertions:
            if a.name not in open_names:
                continue
            viol = self.violation_condition(a, leaf.store)
            if viol is FALSE:
                continue
            v = self.solver.check_sat(list(leaf.pi) + [viol], "assertion")
            if isinstance(v, Sat):
                found.append(self.counterexample(a, leaf, cycle, v.model, leaf.unconfirmed))
                if not self.opts.all_violations:
                    open_names.discard(a.name)
            elif isinstance(v, Unknown):
                self.counters.unconfirmed += 1
        return found

    def run(self) -> Report:
        t0 = time.monotonic()
        if self.opts.budget_s is not None:
            self._deadline = t0 + self.opts.budget_s
        violations: list[CounterExample] = []
        open_names = {a.name for a in self.assertions}
        complete = True
        stop_reason = None
        try:
            frontier = [Leaf(initial_store(self.ctx, self.pool, self.opts.uninit), [])]
            for cycle in range(self.opts.max_cycles):
                nxt: list[Leaf] = []
                for leaf in frontier:
                    for _, child in self.explore_cycle(leaf, cycle):
                        nxt.append(child)
                        if self.opts.max_states is not None and len(nxt) > self.opts.max_states:
                            raise BudgetExceeded(
                                f"more than {self.opts.max_states} states at cycle {cycle + 1}"
                            )
                        if open_names:
                            violations.extend(self.check_assertions(child, cycle + 1, open_names))
                        if self.assertions and not open_names:
                            break
                    if self.assertions and not open_names:
                        break
                frontier = nxt
                if self.assertions and not open_names:
                    break
        except BudgetExceeded as exc:
            complete = False
            stop_reason = str(exc)
        wall_ms = (time.monotonic() - t0) * 1000.0
        return Report(self.config(), self.stats(wall_ms, stop_reason), violations, complete)

    def leaves(self, cycles: Optional[int] = None) -> list[Leaf]:
        """Every feasible state after ``cycles`` edges, without assertion checks."""
        frontier = [Leaf(initial_store(self.ctx, self.pool, self.opts.uninit), [])]
        for cycle in range(self.opts.max_cycles if cycles is None else cycles):
            frontier = [child for leaf in frontier for _, child in self.explore_cycle(leaf, cycle)]
        return frontier

    def config(self) -> dict:
        cfg = asdict(self.opts)
        cfg["top"] = self.design.top
        cfg["solver"] = self.solver.name
        cfg["assertions"] = [a.name for a in self.assertions]
        cfg["pruned_blocks"] = self.pruned
        return cfg

    def stats(self, wall_ms: float, stop_reason: Optional[str]) -> dict:
        c = self.counters
        out = {
            "statements_explored": c.statements,
            "branch_points_explored": c.branch_points,
            "fragments": c.fragments,
            "composed_paths": c.composed_paths,
            "smt": self.solver.stats.as_dict(),
            "paths_completed": c.paths_completed,
            "statements_by_instance": dict(sorted(c.by_instance.items())),
            "unconfirmed": c.unconfirmed,
            "wall_ms": round(wall_ms, 3),
        }
        if stop_reason:
            out["stopped"] = stop_reason
        return out


def run(
    design: ElaboratedDesign,
    assertions: list[AssertionSpec],
    max_cycles: int = 1,
    mode: str = "piecewise",
    solver: Optional[Solver] = None,
    **opts,
) -> Report:
    """Explore ``design`` for ``max_cycles`` clock edges and check ``assertions``."""
    options = ExploreOptions(mode=mode, max_cycles=max_cycles, **opts)
    return Explorer(design, assertions, options, solver).run()


def baseline_explore(design: ElaboratedDesign, assertions: list[AssertionSpec], max_cycles: int = 1, **opts) -> Report:
    return run(design, assertions, max_cycles, "baseline", **opts)
