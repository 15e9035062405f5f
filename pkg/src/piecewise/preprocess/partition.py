from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from ..frontend import ast as A
from ..frontend.elaborate import AlwaysBlock, CombAssign, ElaboratedDesign, lvalue_root


@dataclass(frozen=True)
class AlwaysPartition:
    block_id: str
    instance: str
    body: A.Stmt
    read_set: frozenset[str]
    write_set: frozenset[str]
    block: AlwaysBlock


@dataclass(frozen=True)
class Partitions:
    design: ElaboratedDesign
    comb: tuple[CombAssign, ...]
    regs: dict[str, Optional[int]]
    seq: tuple[AlwaysPartition, ...]

    def block(self, block_id: str) -> AlwaysPartition:
        for p in self.seq:
            if p.block_id == block_id:
                return p
        raise KeyError(block_id)


def lhs_reads(lhs: A.Expr) -> set[str]:
    """Signals read by the index expressions of an lvalue."""
    out: set[str] = set()
    while isinstance(lhs, (A.Index, A.PartSelect)):
        if isinstance(lhs, A.Index):
            out |= A.idents(lhs.index)
        lhs = lhs.base
    return out


def assign_reads(ca: CombAssign) -> set[str]:
    return A.idents(ca.rhs) | lhs_reads(ca.lhs)


def iter_assigns(s: A.Stmt, conds: tuple[A.Expr, ...] = ()) -> Iterator[tuple[A.ProcAssign, tuple[A.Expr, ...]]]:
    """Yield each procedural assignment with the guard expressions above it."""
    if isinstance(s, A.Block):
        for st in s.stmts:
            yield from iter_assigns(st, conds)
    elif isinstance(s, A.If):
        yield from iter_assigns(s.then, conds + (s.cond,))
        if s.else_ is not None:
            yield from iter_assigns(s.else_, conds + (s.cond,))
    elif isinstance(s, A.Case):
        guard = conds + (s.selector,)
        for item in s.items:
            yield from iter_assigns(item.body, guard)
        if s.default is not None:
            yield from iter_assigns(s.default, guard)
    elif isinstance(s, A.ProcAssign):
        yield s, conds


def iter_statements(s: A.Stmt) -> Iterator[A.Stmt]:
    """Executable statements (everything except the ``begin``/``end`` wrappers)."""
    if isinstance(s, A.Block):
        for st in s.stmts:
            yield from iter_statements(st)
        return
    yield s
    if isinstance(s, A.If):
        yield from iter_statements(s.then)
        if s.else_ is not None:
            yield from iter_statements(s.else_)
    elif isinstance(s, A.Case):
        for item in s.items:
            yield from iter_statements(item.body)
        if s.default is not None:
            yield from iter_statements(s.default)


def _block_sets(body: A.Stmt) -> tuple[frozenset[str], frozenset[str]]:
    reads: set[str] = set()
    writes: set[str] = set()
    for st in iter_statements(body):
        if isinstance(st, A.If):
            reads |= A.idents(st.cond)
        elif isinstance(st, A.Case):
            reads |= A.idents(st.selector)
        elif isinstance(st, A.ProcAssign):
            reads |= A.idents(st.rhs) | lhs_reads(st.lhs)
            writes.add(lvalue_root(st.lhs))
    return frozenset(reads), frozenset(writes)


def partition(design: ElaboratedDesign) -> Partitions:
    seq = []
    for blk in design.blocks:
        reads, writes = _block_sets(blk.body)
        seq.append(AlwaysPartition(blk.block_id, blk.instance, blk.body, reads, writes, blk))
    regs = {s.name: s.init for s in design.signals.values() if s.kind == "reg"}
    return Partitions(design, tuple(design.assigns), regs, tuple(seq))
