"""Read/write dependency graphs over continuous assigns and module instances."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from ..errors import CombLatchError, CombLoopError
from ..frontend import ast as A
from ..frontend.elaborate import CombAssign, ElaboratedDesign
from .partition import Partitions, assign_reads, lhs_reads, partition


@dataclass
class DependencyGraph:
    kind: str  # "comb" | "module"
    nodes: list[str]
    edges: list[tuple[str, str]]
    order: Optional[list[str]] = None
    cycle: list[str] = field(default_factory=list)
    edge_attrs: dict[tuple[str, str], dict] = field(default_factory=dict)

    def cycle_edges(self) -> set[tuple[str, str]]:
        c = self.cycle
        return {(c[k], c[(k + 1) % len(c)]) for k in range(len(c))} if c else set()


# -- bit-precise reads ------------------------------------------------------

Bits = tuple[int, int]


def _read_bits(e: A.Expr, widths: dict[str, int], out: dict[str, list[Bits]]) -> None:
    if isinstance(e, A.Ident):
        out.setdefault(e.name, []).append((0, widths[e.name] - 1))
        return
    if isinstance(e, A.Index) and isinstance(e.base, A.Ident):
        if isinstance(e.index, A.Number):
            out.setdefault(e.base.name, []).append((e.index.value, e.index.value))
        else:
            _read_bits(e.base, widths, out)
            _read_bits(e.index, widths, out)
        return
    if isinstance(e, A.PartSelect) and isinstance(e.base, A.Ident):
        out.setdefault(e.base.name, []).append((e.lsb.value, e.msb.value))
        return
    for c in e.children():
        if isinstance(c, A.Expr):
            _read_bits(c, widths, out)


def _driven_bits(lhs: A.Expr, width: int) -> Bits:
    if isinstance(lhs, A.Index) and isinstance(lhs.index, A.Number):
        return lhs.index.value, lhs.index.value
    if isinstance(lhs, A.PartSelect):
        return lhs.lsb.value, lhs.msb.value
    return 0, width - 1


def _overlap(a: Bits, b: Bits) -> bool:
    return not (a[1] < b[0] or b[1] < a[0])


def _assign_graph(assigns: list[CombAssign], widths: dict[str, int]) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(len(assigns)))
    drivers: dict[str, list[tuple[int, Bits]]] = {}
    for i, ca in enumerate(assigns):
        drivers.setdefault(ca.target, []).append((i, _driven_bits(ca.lhs, widths[ca.target])))
    for j, ca in enumerate(assigns):
        reads: dict[str, list[Bits]] = {}
        _read_bits(ca.rhs, widths, reads)
        for name in lhs_reads(ca.lhs):
            reads.setdefault(name, []).append((0, widths[name] - 1))
        for name, ranges in reads.items():
            for i, bits in drivers.get(name, []):
                if any(_overlap(bits, r) for r in ranges):
                    g.add_edge(i, j)
    return g


def _arm_reads(e: A.Expr) -> set[str]:
    out: set[str] = set()
    for n in e.walk():
        if isinstance(n, A.Ternary):
            out |= A.idents(n.then) | A.idents(n.else_)
    return out


def _raise_cycle(assigns: list[CombAssign], g: nx.DiGraph) -> None:
    cyc = nx.find_cycle(g)
    members = [u for u, _ in cyc]
    names = [assigns[i].target for i in members]
    signals = set(names)
    if any(_arm_reads(assigns[i].rhs) & signals for i in members):
        raise CombLatchError(names)
    raise CombLoopError(names)


def comb_dependency_order(partitions: Partitions) -> list[CombAssign]:
    """Continuous assigns in an order where every driver precedes its readers."""
    assigns = list(partitions.comb)
    widths = {k: s.width for k, s in partitions.design.signals.items()}
    g = _assign_graph(assigns, widths)
    if not nx.is_directed_acyclic_graph(g):
        _raise_cycle(assigns, g)
    return [assigns[i] for i in nx.lexicographical_topological_sort(g)]


def comb_dependency_graph(partitions: Partitions) -> DependencyGraph:
    """Signal-level graph (edge = read signal -> assigned signal); never raises."""
    assigns = list(partitions.comb)
    nodes: list[str] = []
    edges: list[tuple[str, str]] = []
    for ca in assigns:
        for s in sorted(assign_reads(ca)) + [ca.target]:
            if s not in nodes:
                nodes.append(s)
        for s in sorted(assign_reads(ca)):
            if (s, ca.target) not in edges:
                edges.append((s, ca.target))
    out = DependencyGraph("comb", nodes, edges)
    try:
        out.order = [ca.target for ca in comb_dependency_order(partitions)]
    except CombLoopError as exc:
        out.cycle = _signal_cycle(exc.cycle, edges)
    return out


def _signal_cycle(targets: list[str], edges: list[tuple[str, str]]) -> list[str]:
    # The assign-level cycle lists driven signals; express it as signal edges.
    g = nx.DiGraph(edges)
    sub = g.subgraph(targets)
    try:
        return [u for u, _ in nx.find_cycle(sub)]
    except nx.NetworkXNoCycle:
        return list(targets)


# -- module graph -----------------------------------------------------------


def _signal_graph(design: ElaboratedDesign) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(design.signals)
    for ca in design.assigns:
        for s in assign_reads(ca):
            g.add_edge(s, ca.target)
    return g


def module_dependency_graph(design: ElaboratedDesign, check_comb: bool = True) -> DependencyGraph:
    """Instance graph with an edge X -> Y when a value produced by X reaches Y.

    X produces its registers and output ports; Y consumes its input ports and
    whatever its own assigns and always blocks read.  Strongly connected
    groups are ordered internally by the edges whose producing output depends
    combinationally on X's inputs; register-sourced edges cross a clock edge
    and impose no order.
    """
    parts = partition(design)
    if check_comb:
        comb_dependency_order(parts)
    sg = _signal_graph(design)
    names = list(design.instances)
    index = {n: k for k, n in enumerate(names)}
    inputs = {n: set() for n in names}
    sources = {n: set() for n in names}
    consumes = {n: set() for n in names}
    for s in design.signals.values():
        if s.kind == "input":
            inputs[s.instance].add(s.name)
        elif s.kind in ("reg", "output"):
            sources[s.instance].add(s.name)
    for ca in design.assigns:
        if ca.origin == "assign":
            consumes[ca.instance] |= assign_reads(ca)
    for p in parts.seq:
        consumes[p.instance] |= p.read_set
    for n in names:
        consumes[n] |= inputs[n]

    g = nx.DiGraph()
    g.add_nodes_from(names)
    attrs: dict[tuple[str, str], dict] = {}
    for x in names:
        for o in sorted(sources[x]):
            reach = nx.descendants(sg, o) | {o}
            comb_sourced = bool(nx.ancestors(sg, o) & inputs[x])
            for y in names:
                if y == x or not (reach & consumes[y]):
                    continue
                g.add_edge(x, y)
                a = attrs.setdefault((x, y), {"comb": False, "via": []})
                a["comb"] = a["comb"] or comb_sourced
                a["via"].append(o)

    cond = nx.condensation(g)
    members = cond.graph["mapping"]
    groups: dict[int, list[str]] = {}
    for n, c in members.items():
        groups.setdefault(c, []).append(n)
    order: list[str] = []
    key = {c: min(index[n] for n in ns) for c, ns in groups.items()}
    for c in nx.lexicographical_topological_sort(cond, key=lambda c: key[c]):
        ns = sorted(groups[c], key=index.__getitem__)
        if len(ns) > 1:
            inner = nx.DiGraph()
            inner.add_nodes_from(ns)
            inner.add_edges_from((u, v) for u, v in g.subgraph(ns).edges if attrs[(u, v)]["comb"])
            if nx.is_directed_acyclic_graph(inner):
                ns = list(nx.lexicographical_topological_sort(inner, key=index.__getitem__))
        order.extend(ns)
    return DependencyGraph("module", names, list(g.edges), order, [], attrs)


# -- DOT --------------------------------------------------------------------


def _q(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def to_dot(graph: DependencyGraph, name: Optional[str] = None) -> str:
    red = graph.cycle_edges()
    lines = [f"digraph {_q(name or graph.kind)} {{"]
    for n in graph.nodes:
        lines.append(f"  {_q(n)};")
    for u, v in graph.edges:
        attr = ""
        if (u, v) in red:
            attr = " [color=red]"
        elif graph.kind == "module" and not graph.edge_attrs.get((u, v), {}).get("comb", True):
            attr = " [style=dashed]"
        lines.append(f"  {_q(u)} -> {_q(v)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
