"""Translation of symbolic expressions to SMT-LIB2 QF_BV text.

Every node lowers to a bit-vector term; 1-bit predicates are wrapped as
``(ite p #b1 #b0)`` so that widths match the Verilog view.  Subterms shared
inside a query are emitted once as ``define-fun`` bindings.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..symcore.evaluate import free_symbols
from ..symcore.expr import BinOp, Concat, Const, Extend, Ite, SExpr, Slice, Sym, UnOp

_BV = {
    "add": "bvadd", "sub": "bvsub", "mul": "bvmul", "udiv": "bvudiv", "urem": "bvurem",
    "and": "bvand", "or": "bvor", "xor": "bvxor", "shl": "bvshl", "lshr": "bvlshr",
}
_PRED = {"eq": "=", "ult": "bvult", "ule": "bvule"}


def quote(name: str) -> str:
    if "|" in name or "\\" in name:
        raise ValueError(f"symbol name cannot be quoted: {name!r}")
    return f"|{name}|"


def sort(width: int) -> str:
    return f"(_ BitVec {width})"


def literal(value: int, width: int) -> str:
    if width % 4 == 0:
        return "#x" + format(value, f"0{width // 4}x")
    return "#b" + format(value, f"0{width}b")


@dataclass
class LoweredQuery:
    declarations: dict[str, int]
    definitions: list[tuple[str, int, str]]
    assertions: list[str]

    def script(self) -> list[str]:
        out = [f"(declare-fun {quote(n)} () {sort(w)})" for n, w in self.declarations.items()]
        out += [f"(define-fun {n} () {sort(w)} {t})" for n, w, t in self.definitions]
        out += [f"(assert {a})" for a in self.assertions]
        return out


class _Lowerer:
    def __init__(self, shared: set[int]):
        self.shared = shared
        self.names: dict[int, str] = {}
        self.definitions: list[tuple[str, int, str]] = []

    def term(self, e: SExpr) -> str:
        name = self.names.get(id(e))
        if name is not None:
            return name
        # Iterative post-order keeps deep expressions off the Python stack.
        stack = [(e, False)]
        done: dict[int, str] = {}
        while stack:
            x, expanded = stack.pop()
            if id(x) in self.names or id(x) in done:
                continue
            if not expanded and x.children:
                stack.append((x, True))
                stack.extend((c, False) for c in x.children)
                continue
            text = self._node(x, lambda c: self.names.get(id(c)) or done[id(c)])
            if id(x) in self.shared and x.children:
                nm = f"|$t{len(self.definitions)}|"
                self.definitions.append((nm, x.width, text))
                self.names[id(x)] = nm
            else:
                done[id(x)] = text
        return self.names.get(id(e)) or done[id(e)]

    @staticmethod
    def _node(x: SExpr, sub) -> str:
        if isinstance(x, Sym):
            return quote(x.name)
        if isinstance(x, Const):
            return literal(x.value, x.width)
        if isinstance(x, UnOp):
            a = sub(x.a)
            w = x.a.width
            if x.op == "not":
                return f"(bvnot {a})"
            if x.op == "neg":
                return f"(bvneg {a})"
            if x.op == "redand":
                return f"(ite (= {a} {literal((1 << w) - 1, w)}) #b1 #b0)"
            if x.op == "redor":
                return f"(ite (= {a} {literal(0, w)}) #b0 #b1)"
            bits = [f"((_ extract {k} {k}) {a})" for k in range(w)]
            out = bits[0]
            for b in bits[1:]:
                out = f"(bvxor {out} {b})"
            return out
        if isinstance(x, BinOp):
            a, b = sub(x.a), sub(x.b)
            if x.op in _PRED:
                return f"(ite ({_PRED[x.op]} {a} {b}) #b1 #b0)"
            return f"({_BV[x.op]} {a} {b})"
        if isinstance(x, Ite):
            return f"(ite (= {sub(x.c)} #b1) {sub(x.t)} {sub(x.f)})"
        if isinstance(x, Slice):
            return f"((_ extract {x.hi} {x.lo}) {sub(x.a)})"
        if isinstance(x, Concat):
            out = sub(x.parts[-1])
            for p in reversed(x.parts[:-1]):
                out = f"(concat {sub(p)} {out})"
            return out
        if isinstance(x, Extend):
            ext = "sign_extend" if x.signed else "zero_extend"
            return f"((_ {ext} {x.width - x.a.width}) {sub(x.a)})"
        raise TypeError(type(x).__name__)


def _shared_nodes(roots: list[SExpr]) -> set[int]:
    parents: dict[int, int] = {}
    seen: set[int] = set()
    stack = list(roots)
    while stack:
        x = stack.pop()
        if id(x) in seen:
            continue
        seen.add(id(x))
        for c in x.children:
            parents[id(c)] = parents.get(id(c), 0) + 1
            stack.append(c)
    return {k for k, n in parents.items() if n > 1}


def lower(e: SExpr) -> str:
    """Stand-alone term for ``e`` (no sharing)."""
    return _Lowerer(set()).term(e)


def lower_query(conjuncts: list[SExpr]) -> LoweredQuery:
    decls: dict[str, int] = {}
    for c in conjuncts:
        decls.update(free_symbols(c))
    low = _Lowerer(_shared_nodes(conjuncts))
    assertions = [f"(= {low.term(c)} #b1)" for c in conjuncts]
    return LoweredQuery(dict(sorted(decls.items())), low.definitions, assertions)
