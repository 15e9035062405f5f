"""Assertion binding and cone-of-influence analysis."""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..errors import UnknownSignal
from ..frontend import ast as A
from ..frontend.assertions import AssertionSpec
from ..frontend.elaborate import ElaboratedDesign, lvalue_root
from .partition import Partitions, assign_reads, iter_assigns, lhs_reads, partition


def _resolve_name(design: ElaboratedDesign, name: str) -> str:
    if name in design.signals:
        return name
    qualified = f"{design.top}.{name}"
    if qualified in design.signals:
        return qualified
    raise UnknownSignal(name, "assertion")


def bind_expr(design: ElaboratedDesign, e: A.Expr) -> A.Expr:
    """Rewrite assertion identifiers to hierarchical names and 0-based selects."""

    def fn(x: A.Expr):
        if isinstance(x, A.Ident):
            return A.Ident(_resolve_name(design, x.name), span=x.span)
        if isinstance(x, (A.Index, A.PartSelect)) and isinstance(x.base, A.Ident):
            base = A.Ident(_resolve_name(design, x.base.name), span=x.base.span)
            off = design.signals[base.name].lsb
            if isinstance(x, A.Index):
                idx = bind_expr(design, x.index)
                if isinstance(idx, A.Number):
                    idx = A.Number(idx.value - off, None)
                elif off:
                    idx = A.Binary("-", idx, A.Number(off, None))
                return A.Index(base, idx, span=x.span)
            return A.PartSelect(
                base, A.Number(x.msb.value - off, None), A.Number(x.lsb.value - off, None), span=x.span
            )
        return None

    return A.map_expr(e, fn)


def bind_assertions(design: ElaboratedDesign, specs: list[AssertionSpec]) -> list[AssertionSpec]:
    out = []
    for a in specs:
        _resolve_name(design, a.clock)
        ante = bind_expr(design, a.antecedent) if a.antecedent is not None else None
        out.append(replace(a, body=bind_expr(design, a.body), antecedent=ante))
    return out


def assertion_reads(a: AssertionSpec) -> set[str]:
    out = A.idents(a.body)
    if a.antecedent is not None:
        out |= A.idents(a.antecedent)
    return out


@dataclass(frozen=True)
class CoiResult:
    closure: frozenset[str]
    blocks: dict[str, bool]
    instances: dict[str, bool]

    def relevant(self, block_id: str) -> bool:
        return self.blocks[block_id]


def cone_of_influence(
    design: ElaboratedDesign, assertions: list[AssertionSpec], partitions: Partitions | None = None
) -> CoiResult:
    """Backward closure from the assertion signals, jointly over all cycles.

    ``assertions`` may be bound or unbound; unbound names are resolved
    against the top module.
    """
    parts = partitions or partition(design)
    deps: dict[str, set[str]] = {}
    for ca in parts.comb:
        deps.setdefault(ca.target, set()).update(assign_reads(ca))
    for p in parts.seq:
        for st, guards in iter_assigns(p.body):
            d = deps.setdefault(lvalue_root(st.lhs), set())
            d |= A.idents(st.rhs) | lhs_reads(st.lhs)
            for g in guards:
                d |= A.idents(g)
    seeds = set()
    for a in assertions:
        seeds |= {_resolve_name(design, n) for n in assertion_reads(a)}
    closure = set(seeds)
    work = list(seeds)
    while work:
        s = work.pop()
        for d in deps.get(s, ()):
            if d not in closure:
                closure.add(d)
                work.append(d)
    blocks = {p.block_id: bool(p.write_set & closure) for p in parts.seq}
    instances = {name: False for name in design.instances}
    for p in parts.seq:
        instances[p.instance] = instances[p.instance] or blocks[p.block_id]
    return CoiResult(frozenset(closure), blocks, instances)
