"""Symbolic execution of elaborated statements, assigns and clock edges.

Always blocks are executed with a continuation list so that a
caller can fork the state at each decision.  ``run_until_fork`` advances a
state until it needs a decision and hands back a ``Fork`` describing the
feasible-looking alternatives; ``apply_arm`` then commits one of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..errors import PathcodeExhausted, UnknownSignal, WidthError, WriteWriteConflict
from ..frontend import ast as A
from ..frontend.elaborate import CombAssign, ElaboratedDesign, lvalue_root
from ..preprocess.partition import assign_reads
from ..preprocess.pathcode import BlockLayout
from .expr import (
    TRUE,
    Const,
    SExpr,
    mk_and1,
    mk_bin,
    mk_concat,
    mk_eq,
    mk_ite,
    mk_not1,
    mk_or1,
    mk_slice,
    mk_un,
    resize,
    to_bool,
    zext,
)
from .state import PathCondition, SymbolicStore, SymbolPool

UNSIZED = 32


@dataclass
class SymContext:
    """Static facts about a design needed while executing it."""

    design: ElaboratedDesign
    widths: dict[str, int]
    registers: frozenset[str]
    comb_order: list[tuple[CombAssign, frozenset[str]]]
    ternary_mode: str = "ite"
    allow_races: bool = False

    @classmethod
    def from_design(cls, design: ElaboratedDesign, ternary_mode: str = "ite", allow_races: bool = False):
        from ..preprocess import comb_dependency_order, partition

        order = comb_dependency_order(partition(design))
        return cls(
            design,
            {k: s.width for k, s in design.signals.items()},
            frozenset(design.registers),
            [(ca, frozenset(assign_reads(ca))) for ca in order],
            ternary_mode,
            allow_races,
        )


class NeedDecision(Exception):
    """Raised by ``eval_expr`` when a branch-mode ternary has no outcome yet."""

    def __init__(self, node: A.Ternary, cond: SExpr):
        self.node = node
        self.cond = cond


# -- expressions --------------------------------------------------------------

_BIN = {"+": "add", "-": "sub", "*": "mul", "/": "udiv", "%": "urem", "&": "and", "|": "or", "^": "xor"}
_SHIFT = {"<<": "shl", "<<<": "shl", ">>": "lshr", ">>>": "lshr"}


def eval_expr(
    e: A.Expr,
    store: SymbolicStore,
    reg_view: str,
    ctx: SymContext,
    choices: Optional[dict[int, int]] = None,
) -> SExpr:
    """Symbolic value of an elaborated expression.

    ``choices`` is supplied only inside always blocks in ``branch`` mode and
    maps ternary node ids to the outcome already taken on this path.
    """
    branch = choices is not None and ctx.ternary_mode == "branch"

    def go(x: A.Expr) -> SExpr:
        if isinstance(x, A.Ident):
            try:
                return store.read(x.name, reg_view)
            except KeyError:
                raise UnknownSignal(x.name) from None
        if isinstance(x, A.Number):
            return Const(x.value, x.width or UNSIZED)
        if isinstance(x, A.Unary):
            a = go(x.operand)
            op = x.op
            if op == "~":
                return mk_un("not", a)
            if op == "-":
                return mk_un("neg", a)
            if op == "+":
                return a
            if op == "!":
                return mk_not1(a)
            red = {"&": "redand", "|": "redor", "^": "redxor"}
            if op in red:
                return mk_un(red[op], a)
            if op in ("~&", "~|", "~^", "^~"):
                return mk_un("not", mk_un(red[op[1] if op[0] == "~" else "^"], a))
            raise WidthError(f"{x.span}: unsupported unary operator {op}")
        if isinstance(x, A.Binary):
            op = x.op
            if op == "&&":
                return mk_and1([go(x.left), go(x.right)])
            if op == "||":
                return mk_or1([go(x.left), go(x.right)])
            a, b = go(x.left), go(x.right)
            if op in _BIN:
                return mk_bin(_BIN[op], a, b)
            if op in ("~^", "^~"):
                return mk_un("not", mk_bin("xor", a, b))
            if op in _SHIFT:
                return mk_bin(_SHIFT[op], a, b)
            if op in ("==", "==="):
                return mk_eq(a, b)
            if op in ("!=", "!=="):
                return mk_un("not", mk_eq(a, b))
            if op == "<":
                return mk_bin("ult", a, b)
            if op == "<=":
                return mk_bin("ule", a, b)
            if op == ">":
                return mk_bin("ult", b, a)
            if op == ">=":
                return mk_bin("ule", b, a)
            raise WidthError(f"{x.span}: unsupported binary operator {op}")
        if isinstance(x, A.Ternary):
            if branch:
                taken = choices.get(x.nid)
                if taken is None:
                    raise NeedDecision(x, to_bool(go(x.cond)))
                t_w = _arm_width(x, store, reg_view, ctx)
                return zext(go(x.then) if taken else go(x.else_), t_w)
            return mk_ite(go(x.cond), go(x.then), go(x.else_))
        if isinstance(x, A.Index):
            base = go(x.base)
            if isinstance(x.index, A.Number):
                k = x.index.value
                return mk_slice(base, k, k) if k < base.width else Const(0, 1)
            return mk_slice(mk_bin("lshr", base, go(x.index)), 0, 0)
        if isinstance(x, A.PartSelect):
            return mk_slice(go(x.base), x.msb.value, x.lsb.value)
        if isinstance(x, A.Concat):
            return mk_concat([go(p) for p in x.parts])
        if isinstance(x, A.Repeat):
            n = x.count.value
            if n < 1:
                raise WidthError(f"{x.span}: replication count must be positive")
            parts = [go(p) for p in x.parts]
            return mk_concat(parts * n)
        raise TypeError(type(x).__name__)

    return go(e)


def _arm_width(x: A.Ternary, store, view, ctx) -> int:
    from ..frontend.elaborate import self_width

    return max(self_width(x.then, ctx.widths), self_width(x.else_, ctx.widths))


def splice(base: SExpr, lhs: A.Expr, value: SExpr, index_value: Optional[SExpr] = None) -> SExpr:
    """Write ``value`` into the bits of ``base`` selected by ``lhs``."""
    w = base.width
    if isinstance(lhs, A.Ident):
        return resize(value, w)
    if isinstance(lhs, A.PartSelect):
        hi, lo = lhs.msb.value, lhs.lsb.value
    elif isinstance(lhs, A.Index) and isinstance(lhs.index, A.Number):
        hi = lo = lhs.index.value
        if lo >= w:
            return base
    elif isinstance(lhs, A.Index):
        bit = zext(mk_slice(resize(value, 1), 0, 0), w)
        one = mk_bin("shl", Const(1, w), index_value)
        return mk_bin("or", mk_bin("and", base, mk_un("not", one)), mk_bin("shl", bit, index_value))
    else:
        raise TypeError(type(lhs).__name__)
    parts = []
    if hi < w - 1:
        parts.append(mk_slice(base, w - 1, hi + 1))
    parts.append(resize(value, hi - lo + 1))
    if lo > 0:
        parts.append(mk_slice(base, lo - 1, 0))
    return mk_concat(parts)


def _lhs_index_value(lhs, store, view, ctx, choices):
    if isinstance(lhs, A.Index) and not isinstance(lhs.index, A.Number):
        return eval_expr(lhs.index, store, view, ctx, choices)
    return None


def exec_assign(
    stmt: A.ProcAssign,
    store: SymbolicStore,
    ctx: SymContext,
    block_id: str,
    choices: Optional[dict[int, int]] = None,
) -> None:
    value = eval_expr(stmt.rhs, store, "prev", ctx, choices)
    idx = _lhs_index_value(stmt.lhs, store, "prev", ctx, choices)
    root = lvalue_root(stmt.lhs)
    if stmt.blocking:
        store.current[root] = splice(store.current[root], stmt.lhs, value, idx)
        store.dirty.add(root)
        return
    owner = store.nba_owner.get(root)
    if owner is not None and owner != block_id and not ctx.allow_races:
        raise WriteWriteConflict(root, owner, block_id)
    base = store.pending_nba.get(root) if owner == block_id else None
    if base is None:
        base = store.read(root, "prev")
    store.pending_nba[root] = splice(base, stmt.lhs, value, idx)
    store.nba_owner[root] = block_id
    store.dirty.add(root)


# -- forking execution ----------------------------------------------------------


@dataclass(frozen=True)
class Arm:
    outcome: int  # if/ternary: 1 or 0; case: item index, len(items) for default, -1 for no match
    cond: SExpr
    push: tuple[A.Stmt, ...] = ()


@dataclass(frozen=True)
class Fork:
    block_id: str
    node: A.Node
    kind: str
    arms: tuple[Arm, ...]


Cont = Optional[tuple]  # cons list: ((block_id, stmt), rest)


def push_stmts(cont: Cont, block_id: str, stmts) -> Cont:
    for s in reversed(tuple(stmts)):
        cont = ((block_id, s), cont)
    return cont


@dataclass
class ExecState:
    store: SymbolicStore
    pi: PathCondition = field(default_factory=PathCondition)
    outcomes: dict[str, dict[int, int]] = field(default_factory=dict)
    cont: Cont = None

    def copy(self) -> "ExecState":
        return ExecState(
            self.store.copy(), self.pi.copy(), {k: dict(v) for k, v in self.outcomes.items()}, self.cont
        )


def case_conditions(stmt: A.Case, sel: SExpr) -> list[Arm]:
    """Arms of a case with priority: arm k excludes every earlier match."""
    arms = []
    earlier: list[SExpr] = []
    for k, item in enumerate(stmt.items):
        match = mk_or1([mk_eq(sel, Const(lbl.value, lbl.width or UNSIZED)) for lbl in item.labels])
        arms.append(Arm(k, mk_and1([match] + [mk_not1(m) for m in earlier]), (item.body,)))
        earlier.append(match)
    rest = mk_and1([mk_not1(m) for m in earlier])
    if stmt.default is not None:
        arms.append(Arm(len(stmt.items), rest, (stmt.default,)))
    else:
        arms.append(Arm(-1, rest, ()))
    return arms


Visit = Callable[[str, A.Stmt], None]


def run_until_fork(state: ExecState, ctx: SymContext, on_visit: Optional[Visit] = None) -> Optional[Fork]:
    """Execute queued statements until a decision is needed or the queue empties."""
    while state.cont is not None:
        (block_id, stmt), rest = state.cont
        state.cont = rest
        if isinstance(stmt, A.Block):
            state.cont = push_stmts(rest, block_id, stmt.stmts)
            continue
        choices = state.outcomes.setdefault(block_id, {}) if ctx.ternary_mode == "branch" else None
        try:
            if isinstance(stmt, A.ProcAssign):
                exec_assign(stmt, state.store, ctx, block_id, choices)
                if on_visit:
                    on_visit(block_id, stmt)
                continue
            if isinstance(stmt, A.If):
                c = to_bool(eval_expr(stmt.cond, state.store, "prev", ctx, choices))
                if on_visit:
                    on_visit(block_id, stmt)
                els = (stmt.else_,) if stmt.else_ is not None else ()
                return Fork(block_id, stmt, "if", (Arm(1, c, (stmt.then,)), Arm(0, mk_not1(c), els)))
            if isinstance(stmt, A.Case):
                sel = eval_expr(stmt.selector, state.store, "prev", ctx, choices)
                if on_visit:
                    on_visit(block_id, stmt)
                return Fork(block_id, stmt, "case", tuple(case_conditions(stmt, sel)))
            if isinstance(stmt, A.NullStmt):
                if on_visit:
                    on_visit(block_id, stmt)
                continue
            raise TypeError(type(stmt).__name__)
        except NeedDecision as need:
            # Re-run the statement once the ternary has an outcome.
            state.cont = ((block_id, stmt), rest)
            c = need.cond
            return Fork(block_id, need.node, "ternary", (Arm(1, c), Arm(0, mk_not1(c))))
    return None


def apply_arm(state: ExecState, fork: Fork, arm: Arm) -> ExecState:
    """Commit ``arm`` of ``fork`` to ``state`` in place."""
    if arm.cond is not TRUE:
        state.pi.append(arm.cond)
    state.outcomes.setdefault(fork.block_id, {})[fork.node.nid] = arm.outcome
    state.cont = push_stmts(state.cont, fork.block_id, arm.push)
    return state


class PathcodeCursor:
    """Reads decision outcomes for one block out of a pathcode bit string."""

    def __init__(self, layout: BlockLayout, bits: str):
        self.layout = layout
        self.bits = bits

    def outcome(self, nid: int) -> int:
        p = self.layout.by_nid[nid]
        if p.offset + p.bits > len(self.bits):
            raise PathcodeExhausted(f"pathcode for {self.layout.block_id} ends before decision at bit {p.offset}")
        field_ = self.bits[p.offset : p.offset + p.bits]
        if p.kind != "case":
            return int(field_ == "1")
        ones = [k for k, ch in enumerate(field_) if ch == "1"]
        if len(ones) > 1:
            raise PathcodeExhausted(f"case field {field_} selects more than one arm")
        return ones[0] if ones else -1


def exec_statement(
    stmt: A.Stmt,
    state: ExecState,
    cursor: PathcodeCursor,
    ctx: SymContext,
    block_id: str,
    on_visit: Optional[Visit] = None,
) -> ExecState:
    """Execute ``stmt`` following the outcomes recorded in ``cursor``."""
    state.cont = push_stmts(state.cont, block_id, (stmt,))
    while True:
        fork = run_until_fork(state, ctx, on_visit)
        if fork is None:
            return state
        want = cursor.outcome(fork.node.nid)
        for arm in fork.arms:
            if arm.outcome == want:
                apply_arm(state, fork, arm)
                break
        else:
            raise PathcodeExhausted(f"pathcode selects no arm of decision {fork.node.nid} in {block_id}")


# -- continuous assigns and clock edges -----------------------------------------


def eval_comb_assign(ca: CombAssign, store: SymbolicStore, ctx: SymContext) -> SExpr:
    value = eval_expr(ca.rhs, store, "current", ctx)
    idx = _lhs_index_value(ca.lhs, store, "current", ctx, None)
    return splice(store.current[ca.target], ca.lhs, value, idx)


def reevaluate_dirty_assigns(store: SymbolicStore, ctx: SymContext, order=None) -> SymbolicStore:
    """Re-run, in dependency order, every assign that reads a dirty signal."""
    for ca, reads in order if order is not None else ctx.comb_order:
        if not (reads & store.dirty):
            continue
        new = eval_comb_assign(ca, store, ctx)
        if new is not store.current[ca.target]:
            store.current[ca.target] = new
            store.dirty.add(ca.target)
    return store


def initial_store(ctx: SymContext, pool: SymbolPool, uninit: str = "symbolic") -> SymbolicStore:
    """Reset state at cycle 0 with cycle-0 inputs and settled comb logic."""
    design = ctx.design
    current: dict[str, SExpr] = {}
    inputs = set(design.top_inputs)
    for name, sig in design.signals.items():
        if sig.kind == "reg":
            if sig.init is not None:
                current[name] = Const(sig.init, sig.width)
            elif uninit == "zero":
                current[name] = Const(0, sig.width)
            else:
                current[name] = pool.init_symbol(name, sig.width)
        elif name in inputs:
            current[name] = pool.input_symbol(name, 0, sig.width)
        else:
            current[name] = Const(0, sig.width)
    store = SymbolicStore(current, {r: current[r] for r in ctx.registers})
    for ca, _ in ctx.comb_order:
        store.current[ca.target] = eval_comb_assign(ca, store, ctx)
    return store


def commit_cycle(store: SymbolicStore, ctx: SymContext, pool: SymbolPool, cycle: int) -> SymbolicStore:
    """Clock edge ending ``cycle``: apply NBAs, draw cycle+1 inputs, settle comb."""
    out = store.copy()
    changed: set[str] = set()
    for r, v in out.pending_nba.items():
        if out.current[r] is not v:
            out.current[r] = v
            changed.add(r)
    out.pending_nba.clear()
    out.nba_owner.clear()
    out.prev_regs = {r: out.current[r] for r in ctx.registers}
    for name in ctx.design.top_inputs:
        out.current[name] = pool.input_symbol(name, cycle + 1, ctx.widths[name])
        changed.add(name)
    out.dirty = changed
    reevaluate_dirty_assigns(out, ctx)
    out.dirty = set()
    return out


def sync_hierarchy(store: SymbolicStore, ctx: SymContext, completed_instance: str) -> SymbolicStore:
    """Copy the output ports of ``completed_instance`` into the parent's nets."""
    for ca, _ in ctx.comb_order:
        if ca.origin == "output" and ca.child == completed_instance:
            new = eval_comb_assign(ca, store, ctx)
            if new is not store.current[ca.target]:
                store.current[ca.target] = new
                store.dirty.add(ca.target)
    return store
