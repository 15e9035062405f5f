"""Pathcode layout: one bit-field per decision point of each always block.

Decision points are numbered in pre-order over the statement tree.  Within a
statement, ternaries in its expressions (``branch`` mode only) precede the
statement's own decision.  An ``if`` owns one bit (1 = then).  A ``case``
owns one bit per listed item plus one for ``default``; exactly one of them is
set on a visited arm and all are clear when nothing matches.  Bits of points
that a path never reaches stay 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from ..frontend import ast as A
from .partition import Partitions

TERNARY_MODES = ("ite", "branch")


@dataclass(frozen=True)
class DecisionPoint:
    nid: int
    kind: str  # "if" | "case" | "ternary"
    offset: int
    bits: int
    arity: int
    node: A.Node


@dataclass
class BlockLayout:
    block_id: str
    points: list[DecisionPoint]
    total_bits: int
    by_nid: dict[int, DecisionPoint] = field(default_factory=dict)

    def encode(self, outcomes: dict[int, int]) -> str:
        """Render ``{nid: outcome}`` as a bit string, most significant point first.

        For an ``if`` or ternary the outcome is 1/0.  For a ``case`` it is the
        index of the taken arm (default = number of items) or -1 for no match.
        """
        bits = ["0"] * self.total_bits
        for nid, outcome in outcomes.items():
            p = self.by_nid[nid]
            if p.kind == "case":
                if outcome >= 0:
                    bits[p.offset + outcome] = "1"
            elif outcome:
                bits[p.offset] = "1"
        return "".join(bits)


@dataclass
class PathcodeLayout:
    ternary_mode: str
    blocks: dict[str, BlockLayout]

    def point(self, block_id: str, nid: int) -> DecisionPoint:
        return self.blocks[block_id].by_nid[nid]


def _expr_ternaries(e: A.Expr) -> Iterator[A.Ternary]:
    if isinstance(e, A.Ternary):
        yield e
    for c in e.children():
        if isinstance(c, A.Expr):
            yield from _expr_ternaries(c)


def statement_exprs(s: A.Stmt) -> list[A.Expr]:
    if isinstance(s, A.If):
        return [s.cond]
    if isinstance(s, A.Case):
        return [s.selector]
    if isinstance(s, A.ProcAssign):
        out = []
        lhs = s.lhs
        while isinstance(lhs, (A.Index, A.PartSelect)):
            if isinstance(lhs, A.Index):
                out.append(lhs.index)
            lhs = lhs.base
        return out + [s.rhs]
    return []


def _points(s: A.Stmt, branch: bool) -> Iterator[tuple[str, A.Node, int, int]]:
    if branch:
        for e in statement_exprs(s):
            for t in _expr_ternaries(e):
                yield "ternary", t, 1, 2
    if isinstance(s, A.Block):
        for st in s.stmts:
            yield from _points(st, branch)
    elif isinstance(s, A.If):
        yield "if", s, 1, 2
        yield from _points(s.then, branch)
        if s.else_ is not None:
            yield from _points(s.else_, branch)
    elif isinstance(s, A.Case):
        n = len(s.items)
        yield "case", s, n + (1 if s.default is not None else 0), n + 1
        for item in s.items:
            yield from _points(item.body, branch)
        if s.default is not None:
            yield from _points(s.default, branch)


def block_layout(block_id: str, body: A.Stmt, ternary_mode: str = "ite") -> BlockLayout:
    if ternary_mode not in TERNARY_MODES:
        raise ValueError(f"ternary mode must be one of {TERNARY_MODES}")
    points = []
    offset = 0
    for kind, node, bits, arity in _points(body, ternary_mode == "branch"):
        points.append(DecisionPoint(node.nid, kind, offset, bits, arity, node))
        offset += bits
    return BlockLayout(block_id, points, offset, {p.nid: p for p in points})


def build_pathcode_layout(partitions: Partitions, ternary_mode: str = "ite") -> PathcodeLayout:
    return PathcodeLayout(
        ternary_mode,
        {p.block_id: block_layout(p.block_id, p.body, ternary_mode) for p in partitions.seq},
    )


@dataclass(frozen=True)
class PathBounds:
    per_block: list[int]
    baseline_total: int
    piecewise_total: int


def upper_bound_paths(layout: PathcodeLayout) -> PathBounds:
    per_block = [math.prod(p.arity for p in bl.points) for bl in layout.blocks.values()]
    return PathBounds(per_block, math.prod(per_block), sum(per_block))
