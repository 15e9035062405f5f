"""Parser for the restricted assertion format.

One statement per assertion::

    [label:] assert property (@(posedge clk) [antecedent |->] body);

Unlabelled assertions are named ``assert_<k>`` by 1-based position.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..errors import DuplicateAssertion
from . import ast as A
from .parser import Parser


@dataclass(frozen=True)
class AssertionSpec:
    name: str
    clock: str
    body: A.Expr
    antecedent: Optional[A.Expr] = None
    span: A.Span = A.NOSPAN

    def source(self) -> str:
        from .printer import expr_str

        pre = f"{expr_str(self.antecedent)} |-> " if self.antecedent is not None else ""
        return f"assert property (@(posedge {self.clock}) {pre}{expr_str(self.body)});"


def parse_assertions(source_text: str) -> list[AssertionSpec]:
    p = Parser(source_text, allow_hierarchical=True)
    out: list[AssertionSpec] = []
    seen: set[str] = set()
    while not p.at_eof():
        start = p.tok
        name = None
        if start.kind == "ident" and p.peek().text == ":":
            name = p.advance().text
            p.advance()
        p.expect("assert")
        p.expect("property")
        p.expect("(")
        p.expect("@")
        p.expect("(")
        p.expect("posedge")
        clock = p.expect_ident().text
        p.expect(")")
        first = p.parse_expr()
        antecedent = None
        if p.accept("|->"):
            antecedent, body = first, p.parse_expr()
        else:
            body = first
        p.expect(")")
        p.expect(";")
        if name is None:
            name = f"assert_{len(out) + 1}"
        if name in seen:
            raise DuplicateAssertion(f"{start.line}:{start.col}: duplicate assertion name {name!r}")
        seen.add(name)
        out.append(AssertionSpec(name, clock, body, antecedent, p.span_from(start)))
    return out
