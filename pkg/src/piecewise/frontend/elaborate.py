"""Elaboration: resolve parameters, unroll static loops and flatten names.

The elaborated design keeps the instance tree as metadata but rewrites every
expression to use hierarchical signal names (``top.q1.in_use``), so later
stages work over one flat namespace.  Port connections become directed
continuous assignments tagged with their origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import (
    ElaborationError,
    NonStaticLoopBound,
    RecursiveInstantiation,
    UnknownSignal,
    UnknownTop,
    UnsupportedConstruct,
    WidthMismatch,
)
from . import ast as A

MAX_UNROLL = 4096
UNSIZED_WIDTH = 32


@dataclass(frozen=True)
class Signal:
    name: str
    local: str
    instance: str
    kind: str  # "input" | "output" | "wire" | "reg"
    width: int
    lsb: int = 0
    init: Optional[int] = None

    @property
    def is_reg(self) -> bool:
        return self.kind == "reg"


@dataclass(frozen=True)
class CombAssign:
    """A continuous driver.  ``origin`` is "assign", "input" or "output"."""

    lhs: A.Expr
    rhs: A.Expr
    instance: str
    origin: str = "assign"
    child: Optional[str] = None
    span: A.Span = A.NOSPAN

    @property
    def target(self) -> str:
        return lvalue_root(self.lhs)


@dataclass(frozen=True)
class PortBinding:
    parent: str
    child: str
    port: str  # hierarchical name of the child's port
    direction: str
    expr: A.Expr  # parent-side expression (hierarchical names)


@dataclass(frozen=True)
class AlwaysBlock:
    block_id: str
    instance: str
    index: int
    clock: str
    body: A.Stmt
    span: A.Span = A.NOSPAN


@dataclass
class InstanceInfo:
    path: str
    module: str
    params: tuple[tuple[str, int], ...]
    parent: Optional[str]
    children: list[str] = field(default_factory=list)
    signals: dict[str, str] = field(default_factory=dict)
    assigns: list[CombAssign] = field(default_factory=list)
    blocks: list[AlwaysBlock] = field(default_factory=list)
    port_names: tuple[str, ...] = ()

    @property
    def key(self) -> tuple:
        return (self.module, self.params)


@dataclass
class ElaboratedDesign:
    top: str
    ast: A.DesignAst
    instances: dict[str, InstanceInfo]
    signals: dict[str, Signal]
    assigns: list[CombAssign]
    bindings: list[PortBinding]
    blocks: list[AlwaysBlock]
    clocks: frozenset[str]

    @property
    def top_inputs(self) -> list[str]:
        return [
            s.name
            for s in self.signals.values()
            if s.instance == self.top and s.kind == "input" and s.name not in self.clocks
        ]

    @property
    def registers(self) -> list[str]:
        return [s.name for s in self.signals.values() if s.kind == "reg"]

    def width(self, name: str) -> int:
        return self.signals[name].width


def lvalue_root(e: A.Expr) -> str:
    while isinstance(e, (A.Index, A.PartSelect)):
        e = e.base
    if not isinstance(e, A.Ident):
        raise UnsupportedConstruct("complex left-hand side", e.span.line, e.span.col)
    return e.name


# -- constant evaluation -----------------------------------------------------

_MASK32 = (1 << 32) - 1


def const_eval(e: A.Expr, env: dict[str, int], what: str = "constant expression") -> int:
    """Evaluate a constant expression over parameters / loop variables."""

    def ev(x: A.Expr) -> int:
        if isinstance(x, A.Number):
            return x.value
        if isinstance(x, A.Ident):
            if x.name in env:
                return env[x.name]
            raise ElaborationError(f"{x.span}: {x.name!r} is not constant in {what}")
        if isinstance(x, A.Unary):
            v = ev(x.operand)
            return {
                "+": lambda: v,
                "-": lambda: -v,
                "!": lambda: int(v == 0),
                "~": lambda: ~v & _MASK32,
                "|": lambda: int(v != 0),
                "&": lambda: int(v == _MASK32),
            }.get(x.op, lambda: _bad(x))()
        if isinstance(x, A.Binary):
            a, b = ev(x.left), ev(x.right)
            op = x.op
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                return a // b if b else 0
            if op == "%":
                return a % b if b else 0
            if op in ("<<", "<<<"):
                return a << b
            if op in (">>", ">>>"):
                return a >> b
            if op == "&":
                return a & b
            if op == "|":
                return a | b
            if op == "^":
                return a ^ b
            if op in ("==", "==="):
                return int(a == b)
            if op in ("!=", "!=="):
                return int(a != b)
            if op == "<":
                return int(a < b)
            if op == "<=":
                return int(a <= b)
            if op == ">":
                return int(a > b)
            if op == ">=":
                return int(a >= b)
            if op == "&&":
                return int(bool(a) and bool(b))
            if op == "||":
                return int(bool(a) or bool(b))
            return _bad(x)
        if isinstance(x, A.Ternary):
            return ev(x.then) if ev(x.cond) else ev(x.else_)
        return _bad(x)

    def _bad(x):
        raise ElaborationError(f"{x.span}: unsupported operator in {what}")

    return ev(e)


def self_width(e: A.Expr, widths: dict[str, int]) -> int:
    """Self-determined width of an elaborated expression."""
    if isinstance(e, A.Ident):
        return widths[e.name]
    if isinstance(e, A.Number):
        return e.width or UNSIZED_WIDTH
    if isinstance(e, A.Unary):
        return self_width(e.operand, widths) if e.op in ("~", "-", "+") else 1
    if isinstance(e, A.Binary):
        if e.op in ("==", "!=", "===", "!==", "<", "<=", ">", ">=", "&&", "||"):
            return 1
        if e.op in ("<<", ">>", "<<<", ">>>"):
            return self_width(e.left, widths)
        return max(self_width(e.left, widths), self_width(e.right, widths))
    if isinstance(e, A.Ternary):
        return max(self_width(e.then, widths), self_width(e.else_, widths))
    if isinstance(e, A.Index):
        return 1
    if isinstance(e, A.PartSelect):
        return e.msb.value - e.lsb.value + 1
    if isinstance(e, A.Concat):
        return sum(self_width(p, widths) for p in e.parts)
    if isinstance(e, A.Repeat):
        return e.count.value * sum(self_width(p, widths) for p in e.parts)
    raise TypeError(type(e).__name__)


# -- elaboration -------------------------------------------------------------


class _Elaborator:
    def __init__(self, ast: A.DesignAst, top: str):
        self.ast = ast
        self.top = top
        self.instances: dict[str, InstanceInfo] = {}
        self.signals: dict[str, Signal] = {}
        self.assigns: list[CombAssign] = []
        self.bindings: list[PortBinding] = []
        self.blocks: list[AlwaysBlock] = []
        self.raw_clocks: dict[str, str] = {}  # block id -> hierarchical clock name

    def run(self) -> ElaboratedDesign:
        mod = self.ast.module(self.top)
        if mod is None:
            raise UnknownTop(f"top module {self.top!r} not found")
        self.instantiate(mod, self.top, None, {}, [self.top])
        clocks = self.resolve_clocks()
        self.check_drivers()
        return ElaboratedDesign(
            self.top,
            self.ast,
            self.instances,
            self.signals,
            self.assigns,
            self.bindings,
            self.blocks,
            frozenset(clocks),
        )

    # instance --------------------------------------------------------------

    def instantiate(self, mod: A.ModuleDecl, path: str, parent: Optional[str], overrides: dict, chain: list[str]):
        params = self.resolve_params(mod, overrides, path)
        info = InstanceInfo(path, mod.name, tuple(sorted(params.items())), parent)
        self.instances[path] = info
        scope = _Scope(path, params)

        ports: dict[str, A.Port] = {p.name: p for p in mod.ports}
        nets: dict[str, A.NetDecl] = {}
        for n in mod.nets:
            if n.kind in ("integer", "genvar"):
                scope.loopvars.add(n.name)
                continue
            if n.name in nets:
                raise ElaborationError(f"{n.span}: {n.name!r} declared twice in {mod.name}")
            nets[n.name] = n
        if not mod.ansi:
            for name in mod.port_order:
                if name not in ports:
                    raise ElaborationError(f"port {name!r} of {mod.name} has no direction declaration")
        for name in ports:
            if not mod.ansi and name not in mod.port_order:
                raise ElaborationError(f"{name!r} declared as port but not in port list of {mod.name}")
        info.port_names = tuple(ports)

        for name, p in ports.items():
            net = nets.pop(name, None)
            rng = p.range or (net.range if net is not None else None)
            is_reg = p.is_reg or (net is not None and net.kind == "reg")
            if p.direction == "input" and is_reg:
                raise ElaborationError(f"{p.span}: input {name!r} declared reg")
            init_expr = p.init if p.init is not None else (net.init if net is not None else None)
            kind = "reg" if is_reg else p.direction
            self.declare(scope, info, name, kind, rng, init_expr, p, output=p.direction == "output")
        for name, n in nets.items():
            self.declare(scope, info, name, n.kind, n.range, n.init, n)
        for hier, init_expr, node in scope.pending:
            lhs = A.Ident(hier, span=node.span)
            self.add_assign(CombAssign(lhs, scope.resolve(init_expr), info.path, "assign", span=node.span), info)

        for a in mod.assigns:
            lhs = scope.resolve(a.lhs)
            self.check_lvalue(lhs, a)
            self.add_assign(CombAssign(lhs, scope.resolve(a.rhs), path, "assign", span=a.span), info)

        for k, alw in enumerate(mod.always_blocks):
            block_id = f"{path}#{k}"
            body = self.elab_stmt(alw.body, scope, {})
            if alw.clock not in scope.signals:
                raise UnknownSignal(alw.clock, f"sensitivity list of {mod.name}")
            blk = AlwaysBlock(block_id, path, k, scope.signals[alw.clock], body, alw.span)
            info.blocks.append(blk)
            self.blocks.append(blk)

        for inst in mod.instances:
            child_mod = self.ast.module(inst.module)
            if child_mod is None:
                raise ElaborationError(f"{inst.span}: unknown module {inst.module!r}")
            if inst.module in chain:
                raise RecursiveInstantiation(chain + [inst.module])
            child_path = f"{path}.{inst.name}"
            if child_path in self.instances or inst.name in scope.signals:
                raise ElaborationError(f"{inst.span}: duplicate name {inst.name!r}")
            ov = self.eval_overrides(inst, child_mod, scope)
            info.children.append(child_path)
            self.instantiate(child_mod, child_path, path, ov, chain + [inst.module])
            self.bind_ports(inst, child_mod, scope, info, self.instances[child_path])

    def resolve_params(self, mod: A.ModuleDecl, overrides: dict, path: str) -> dict[str, int]:
        env: dict[str, int] = {}
        declared = [p.name for p in mod.params if not p.local]
        for name in overrides:
            if name not in declared:
                raise ElaborationError(f"{path}: module {mod.name} has no parameter {name!r}")
        for p in mod.params:
            if not p.local and p.name in overrides:
                env[p.name] = overrides[p.name]
            else:
                env[p.name] = const_eval(p.value, env, f"parameter {p.name}")
        return env

    def eval_overrides(self, inst: A.Instance, child: A.ModuleDecl, scope: "_Scope") -> dict[str, int]:
        names = [p.name for p in child.params if not p.local]
        out = {}
        for k, ov in enumerate(inst.params):
            name = ov.name
            if name is None:
                if k >= len(names):
                    raise ElaborationError(f"{ov.span}: too many parameter overrides for {child.name}")
                name = names[k]
            out[name] = const_eval(ov.value, scope.params, f"parameter override {name}")
        return out

    def declare(self, scope, info, name, kind, rng, init_expr, node, output=False):
        if name in scope.signals or name in scope.params:
            raise ElaborationError(f"{node.span}: {name!r} declared twice")
        if rng is not None:
            msb = const_eval(rng.msb, scope.params, f"range of {name}")
            lsb = const_eval(rng.lsb, scope.params, f"range of {name}")
            if msb < lsb:
                raise UnsupportedConstruct(f"ascending range on {name}", node.span.line, node.span.col)
            width, offset = msb - lsb + 1, lsb
        else:
            width, offset = 1, 0
        hier = f"{info.path}.{name}"
        init = None
        if init_expr is not None and kind == "reg":
            init = const_eval(init_expr, scope.params, f"initializer of {name}") & ((1 << width) - 1)
        if kind == "wire" and output:
            kind = "output"
        self.signals[hier] = Signal(hier, name, info.path, kind, width, offset, init)
        scope.signals[name] = hier
        scope.offsets[hier] = offset
        scope.widths[hier] = width
        info.signals[name] = hier
        if init_expr is not None and kind != "reg":
            if kind == "input":
                raise ElaborationError(f"{node.span}: input {name!r} cannot have an initializer")
            scope.pending.append((hier, init_expr, node))

    def check_lvalue(self, lhs: A.Expr, node):
        root = lvalue_root(lhs)
        sig = self.signals[root]
        if sig.kind == "reg":
            raise ElaborationError(f"{node.span}: continuous assignment to reg {sig.local!r}")
        if sig.kind == "input":
            raise ElaborationError(f"{node.span}: continuous assignment to input {sig.local!r}")

    def add_assign(self, ca: CombAssign, info: InstanceInfo):
        info.assigns.append(ca)
        self.assigns.append(ca)

    def bind_ports(self, inst: A.Instance, child_mod: A.ModuleDecl, scope, info: InstanceInfo, child: InstanceInfo):
        seen = set()
        for conn in inst.connections:
            if conn.port not in child.port_names:
                raise ElaborationError(f"{conn.span}: module {child_mod.name} has no port {conn.port!r}")
            if conn.port in seen:
                raise ElaborationError(f"{conn.span}: port {conn.port!r} connected twice")
            seen.add(conn.port)
            if conn.expr is None:
                continue
            port_sig = self.signals[child.signals[conn.port]]
            parent_expr = scope.resolve(conn.expr)
            pw = self_width(parent_expr, self.widths())
            if pw != port_sig.width:
                raise WidthMismatch(
                    f"{conn.span}: port {child.path}.{conn.port} is {port_sig.width} bits, "
                    f"connection is {pw} bits"
                )
            port_ident = A.Ident(port_sig.name, span=conn.span)
            is_input = port_sig.kind == "input"
            self.bindings.append(
                PortBinding(info.path, child.path, port_sig.name, "input" if is_input else "output", parent_expr)
            )
            if is_input:
                self.add_assign(CombAssign(port_ident, parent_expr, info.path, "input", child.path, conn.span), info)
            else:
                if not isinstance(parent_expr, (A.Ident, A.Index, A.PartSelect)):
                    raise ElaborationError(f"{conn.span}: output port {conn.port!r} must connect to a net")
                self.check_lvalue(parent_expr, conn)
                self.add_assign(CombAssign(parent_expr, port_ident, info.path, "output", child.path, conn.span), info)
        for pname in child.port_names:
            sig = self.signals[child.signals[pname]]
            if sig.kind == "input" and pname not in seen:
                raise ElaborationError(f"{inst.span}: input port {pname!r} of {child.path} is unconnected")

    def widths(self) -> dict[str, int]:
        return {k: s.width for k, s in self.signals.items()}

    # statements ------------------------------------------------------------

    def elab_stmt(self, s: A.Stmt, scope: "_Scope", loop: dict[str, int]) -> A.Stmt:
        if isinstance(s, A.Block):
            stmts = []
            for st in s.stmts:
                out = self.elab_stmt(st, scope, loop)
                if isinstance(out, A.Block) and out.label == "__unrolled__":
                    stmts.extend(out.stmts)
                else:
                    stmts.append(out)
            return A.Block(tuple(stmts), s.label, span=s.span)
        if isinstance(s, A.If):
            els = self.elab_stmt(s.else_, scope, loop) if s.else_ is not None else None
            return A.If(scope.resolve(s.cond, loop), self.elab_stmt(s.then, scope, loop), els, span=s.span)
        if isinstance(s, A.Case):
            items = []
            for item in s.items:
                labels = tuple(
                    A.Number(
                        const_eval(lbl, {**scope.params, **loop}, "case label"),
                        _literal_width(lbl, scope, loop),
                        span=lbl.span,
                    )
                    for lbl in item.labels
                )
                items.append(A.CaseItem(labels, self.elab_stmt(item.body, scope, loop), span=item.span))
            dflt = self.elab_stmt(s.default, scope, loop) if s.default is not None else None
            return A.Case(scope.resolve(s.selector, loop), tuple(items), dflt, span=s.span)
        if isinstance(s, A.For):
            return self.unroll(s, scope, loop)
        if isinstance(s, A.ProcAssign):
            lhs = scope.resolve(s.lhs, loop)
            root = lvalue_root(lhs)
            sig = self.signals[root]
            if not s.blocking and sig.kind != "reg":
                raise ElaborationError(f"{s.span}: non-blocking assignment to non-reg {sig.local!r}")
            return A.ProcAssign(lhs, scope.resolve(s.rhs, loop), s.blocking, span=s.span)
        if isinstance(s, A.NullStmt):
            return A.NullStmt(span=s.span)
        raise TypeError(type(s).__name__)

    def unroll(self, s: A.For, scope: "_Scope", loop: dict[str, int]) -> A.Stmt:
        if s.var not in scope.loopvars:
            raise UnknownSignal(s.var, "for loop (declare it integer or genvar)")
        env = {**scope.params, **loop}
        try:
            value = const_eval(s.init, env, "loop bound")
        except ElaborationError as exc:
            raise NonStaticLoopBound(f"{s.span}: {exc}") from None
        out = []
        for _ in range(MAX_UNROLL + 1):
            env = {**scope.params, **loop, s.var: value}
            try:
                go = const_eval(s.cond, env, "loop bound")
                nxt = const_eval(s.step, env, "loop step")
            except ElaborationError as exc:
                raise NonStaticLoopBound(f"{s.span}: {exc}") from None
            if not go:
                return A.Block(tuple(out), "__unrolled__", span=s.span)
            body = self.elab_stmt(s.body, scope, {**loop, s.var: value})
            if isinstance(body, A.Block) and body.label in (None, "__unrolled__"):
                out.extend(body.stmts)
            else:
                out.append(body)
            value = nxt
        raise NonStaticLoopBound(f"{s.span}: loop exceeds {MAX_UNROLL} iterations")

    # clocks and drivers ----------------------------------------------------

    def resolve_clocks(self) -> set[str]:
        input_of: dict[str, A.Expr] = {
            ca.target: ca.rhs for ca in self.assigns if ca.origin == "input"
        }
        tops = set()
        for blk in self.blocks:
            name = blk.clock
            while name in input_of:
                src = input_of[name]
                if not isinstance(src, A.Ident):
                    raise UnsupportedConstruct(f"derived clock for block {blk.block_id}")
                name = src.name
            sig = self.signals[name]
            if sig.instance != self.top or sig.kind != "input":
                raise UnsupportedConstruct(f"clock of {blk.block_id} is not a top-level input")
            tops.add(name)
        if len(tops) > 1:
            raise UnsupportedConstruct("multiple clock domains: " + ", ".join(sorted(tops)))
        clock_nets = set(tops)
        changed = True
        while changed:
            changed = False
            for ca in self.assigns:
                if ca.origin == "input" and isinstance(ca.rhs, A.Ident) and ca.rhs.name in clock_nets:
                    if ca.target not in clock_nets:
                        clock_nets.add(ca.target)
                        changed = True
        # Clock nets carry no data; drop their bindings.
        keep = [
            ca for ca in self.assigns if not (ca.origin == "input" and ca.target in clock_nets and ca.target not in tops)
        ]
        self.assigns[:] = keep
        for info in self.instances.values():
            info.assigns[:] = [ca for ca in info.assigns if ca in keep]
        self.bindings[:] = [b for b in self.bindings if b.port not in clock_nets]
        for ca in self.assigns:
            used = A.idents(ca.rhs) | (A.idents(ca.lhs) - {ca.target})
            if used & clock_nets:
                raise UnsupportedConstruct(f"clock used as data in {ca.instance}", ca.span.line, ca.span.col)
        for blk in self.blocks:
            if A.idents(blk.body) & clock_nets:
                raise UnsupportedConstruct(f"clock used as data in {blk.block_id}", blk.span.line, blk.span.col)
        self.clock_nets = clock_nets
        return tops

    def check_drivers(self):
        driven: dict[str, list[tuple[int, int]]] = {}
        widths = self.widths()
        for ca in self.assigns:
            t = ca.target
            lo, hi = _lvalue_bits(ca.lhs, widths[t])
            for (a, b) in driven.get(t, []):
                if not (hi < a or b < lo):
                    raise ElaborationError(f"{ca.span}: {t!r} has multiple continuous drivers")
            driven.setdefault(t, []).append((lo, hi))
        read: set[str] = set()
        for ca in self.assigns:
            read |= A.idents(ca.rhs)
            read |= A.idents(ca.lhs) - {ca.target}
        for blk in self.blocks:
            read |= A.idents(blk.body)
        for sig in self.signals.values():
            if sig.kind in ("wire", "output") and sig.name not in self.clock_nets:
                if sig.name not in driven and sig.name in read:
                    raise ElaborationError(f"net {sig.name!r} is read but never driven")


def _literal_width(lbl: A.Expr, scope, loop) -> Optional[int]:
    return lbl.width if isinstance(lbl, A.Number) else None


def _lvalue_bits(lhs: A.Expr, width: int) -> tuple[int, int]:
    if isinstance(lhs, A.Index):
        k = lhs.index.value
        return k, k
    if isinstance(lhs, A.PartSelect):
        return lhs.lsb.value, lhs.msb.value
    return 0, width - 1


class _Scope:
    """Name resolution for one instance."""

    def __init__(self, path: str, params: dict[str, int]):
        self.path = path
        self.params = params
        self.signals: dict[str, str] = {}
        self.offsets: dict[str, int] = {}
        self.widths: dict[str, int] = {}
        self.loopvars: set[str] = set()
        self.pending: list[tuple[str, A.Expr, A.Node]] = []

    def resolve(self, e: A.Expr, loop: dict[str, int] | None = None) -> A.Expr:
        loop = loop or {}
        consts = {**self.params, **loop}

        def fn(x: A.Expr):
            if isinstance(x, A.Ident):
                if x.name in loop:
                    return A.Number(loop[x.name], None, span=x.span)
                if x.name in self.signals:
                    return A.Ident(self.signals[x.name], span=x.span)
                if x.name in self.params:
                    return A.Number(self.params[x.name], None, span=x.span)
                raise UnknownSignal(x.name, self.path)
            if isinstance(x, (A.Index, A.PartSelect)):
                return self.select(x, consts)
            if isinstance(x, A.Repeat):
                n = self.const(x.count, consts, "replication count")
                if n < 1:
                    raise ElaborationError(f"{x.span}: replication count must be positive")
                return A.Repeat(A.Number(n, None), x.parts, span=x.span)
            return None

        return A.map_expr(e, fn)

    def const(self, e: A.Expr, consts: dict[str, int], what: str) -> int:
        if isinstance(e, A.Number):
            return e.value
        return const_eval(e, consts, what)

    def select(self, x, consts):
        base = x.base
        if not isinstance(base, A.Ident):
            raise UnsupportedConstruct("select on an expression", x.span.line, x.span.col)
        hier = base.name
        off = self.offsets.get(hier, 0)
        width = self.widths.get(hier)
        if isinstance(x, A.Index):
            idx = x.index
            if _is_const(idx):
                k = _fold(idx) - off
                if not 0 <= k < width:
                    raise ElaborationError(f"{x.span}: index out of range for {hier}")
                return A.Index(base, A.Number(k, None), span=x.span)
            if off:
                idx = A.Binary("-", idx, A.Number(off, None))
            return A.Index(base, idx, span=x.span)
        if not (_is_const(x.msb) and _is_const(x.lsb)):
            raise UnsupportedConstruct("non-constant part select", x.span.line, x.span.col)
        msb, lsb = _fold(x.msb) - off, _fold(x.lsb) - off
        if not 0 <= lsb <= msb < width:
            raise ElaborationError(f"{x.span}: part select out of range for {hier}")
        return A.PartSelect(base, A.Number(msb, None), A.Number(lsb, None), span=x.span)


def _is_const(e: A.Expr) -> bool:
    return all(not isinstance(n, A.Ident) for n in e.walk())


def _fold(e: A.Expr) -> int:
    return const_eval(e, {}, "select index")


def elaborate(ast: A.DesignAst, top_name: str) -> ElaboratedDesign:
    """Elaborate ``ast`` rooted at module ``top_name``."""
    return _Elaborator(ast, top_name).run()
