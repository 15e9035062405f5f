"""Abstract syntax for the supported Verilog subset.

All nodes are frozen dataclasses.  ``span`` and ``nid`` are excluded from
equality so that structurally identical trees compare equal regardless of
where they came from (used by the print/parse round-trip check).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, fields, is_dataclass
from typing import Iterator, Optional, Union

_nid = itertools.count(1)


def next_nid() -> int:
    return next(_nid)


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def contains(self, other: "Span") -> bool:
        return (self.line, self.col) <= (other.line, other.col) and (other.end_line, other.end_col) <= (
            self.end_line,
            self.end_col,
        )

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOSPAN = Span(0, 0, 0, 0)


@dataclass(frozen=True)
class Node:
    span: Span = field(default=NOSPAN, compare=False, repr=False, kw_only=True)
    nid: int = field(default_factory=next_nid, compare=False, repr=False, kw_only=True)

    def children(self) -> Iterator["Node"]:
        for f in fields(self):
            if f.name in ("span", "nid"):
                continue
            yield from _nodes_in(getattr(self, f.name))

    def walk(self) -> Iterator["Node"]:
        yield self
        for child in self.children():
            yield from child.walk()


def _nodes_in(value) -> Iterator[Node]:
    if isinstance(value, Node):
        yield value
    elif isinstance(value, (tuple, list)):
        for v in value:
            yield from _nodes_in(v)


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class Expr(Node):
    pass


@dataclass(frozen=True)
class Ident(Expr):
    name: str


@dataclass(frozen=True)
class Number(Expr):
    value: int
    width: Optional[int] = None  # None: unsized literal


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Ternary(Expr):
    cond: Expr
    then: Expr
    else_: Expr


@dataclass(frozen=True)
class Index(Expr):
    base: Expr
    index: Expr


@dataclass(frozen=True)
class PartSelect(Expr):
    base: Expr
    msb: Expr
    lsb: Expr


@dataclass(frozen=True)
class Concat(Expr):
    parts: tuple[Expr, ...]


@dataclass(frozen=True)
class Repeat(Expr):
    count: Expr
    parts: tuple[Expr, ...]


# -- statements --------------------------------------------------------------


@dataclass(frozen=True)
class Stmt(Node):
    pass


@dataclass(frozen=True)
class Block(Stmt):
    stmts: tuple[Stmt, ...]
    label: Optional[str] = None


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then: Stmt
    else_: Optional[Stmt] = None


@dataclass(frozen=True)
class CaseItem(Node):
    labels: tuple[Expr, ...]
    body: Stmt


@dataclass(frozen=True)
class Case(Stmt):
    selector: Expr
    items: tuple[CaseItem, ...]
    default: Optional[Stmt] = None


@dataclass(frozen=True)
class For(Stmt):
    var: str
    init: Expr
    cond: Expr
    step: Expr  # right-hand side of ``var = step``
    body: Stmt


@dataclass(frozen=True)
class ProcAssign(Stmt):
    lhs: Expr
    rhs: Expr
    blocking: bool = False


@dataclass(frozen=True)
class NullStmt(Stmt):
    pass


# -- module items ------------------------------------------------------------


@dataclass(frozen=True)
class Range(Node):
    msb: Expr
    lsb: Expr


@dataclass(frozen=True)
class Port(Node):
    name: str
    direction: str  # "input" | "output"
    range: Optional[Range] = None
    is_reg: bool = False
    init: Optional[Expr] = None


@dataclass(frozen=True)
class NetDecl(Node):
    kind: str  # "wire" | "reg" | "integer" | "genvar"
    name: str
    range: Optional[Range] = None
    init: Optional[Expr] = None


@dataclass(frozen=True)
class ParamDecl(Node):
    name: str
    value: Expr
    local: bool = False


@dataclass(frozen=True)
class ContAssign(Node):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Always(Node):
    clock: str
    body: Stmt
    edge: str = "posedge"


@dataclass(frozen=True)
class Connection(Node):
    port: str
    expr: Optional[Expr]


@dataclass(frozen=True)
class ParamOverride(Node):
    name: Optional[str]  # None for positional overrides
    value: Expr


@dataclass(frozen=True)
class Instance(Node):
    module: str
    name: str
    params: tuple[ParamOverride, ...] = ()
    connections: tuple[Connection, ...] = ()


Item = Union[Port, NetDecl, ParamDecl, ContAssign, Always, Instance]


@dataclass(frozen=True)
class ModuleDecl(Node):
    name: str
    port_order: tuple[str, ...] = ()
    ansi: bool = True
    items: tuple[Node, ...] = ()

    def _of(self, cls):
        return tuple(i for i in self.items if isinstance(i, cls))

    @property
    def ports(self) -> tuple[Port, ...]:
        return self._of(Port)

    @property
    def nets(self) -> tuple[NetDecl, ...]:
        return self._of(NetDecl)

    @property
    def params(self) -> tuple[ParamDecl, ...]:
        return self._of(ParamDecl)

    @property
    def assigns(self) -> tuple[ContAssign, ...]:
        return self._of(ContAssign)

    @property
    def always_blocks(self) -> tuple[Always, ...]:
        return self._of(Always)

    @property
    def instances(self) -> tuple[Instance, ...]:
        return self._of(Instance)


@dataclass(frozen=True)
class DesignAst(Node):
    modules: tuple[ModuleDecl, ...] = ()

    def module(self, name: str) -> Optional[ModuleDecl]:
        for m in self.modules:
            if m.name == name:
                return m
        return None


def map_expr(e: Expr, fn) -> Expr:
    """Bottom-up rebuild of an expression; ``fn`` may return a replacement."""
    if isinstance(e, Unary):
        e = Unary(e.op, map_expr(e.operand, fn), span=e.span)
    elif isinstance(e, Binary):
        e = Binary(e.op, map_expr(e.left, fn), map_expr(e.right, fn), span=e.span)
    elif isinstance(e, Ternary):
        e = Ternary(map_expr(e.cond, fn), map_expr(e.then, fn), map_expr(e.else_, fn), span=e.span)
    elif isinstance(e, Index):
        e = Index(map_expr(e.base, fn), map_expr(e.index, fn), span=e.span)
    elif isinstance(e, PartSelect):
        e = PartSelect(map_expr(e.base, fn), map_expr(e.msb, fn), map_expr(e.lsb, fn), span=e.span)
    elif isinstance(e, Concat):
        e = Concat(tuple(map_expr(p, fn) for p in e.parts), span=e.span)
    elif isinstance(e, Repeat):
        e = Repeat(map_expr(e.count, fn), tuple(map_expr(p, fn) for p in e.parts), span=e.span)
    out = fn(e)
    return e if out is None else out


def idents(e: Node) -> set[str]:
    return {n.name for n in e.walk() if isinstance(n, Ident)}


def strip_meta(node):
    """Comparable form of a tree: nested tuples without spans or ids."""
    if is_dataclass(node):
        return (type(node).__name__,) + tuple(
            strip_meta(getattr(node, f.name)) for f in fields(node) if f.name not in ("span", "nid")
        )
    if isinstance(node, (tuple, list)):
        return tuple(strip_meta(v) for v in node)
    return node
