"""Concrete reference simulator.

Values are plain Python integers.  The expression evaluator and its width
rules are written here from scratch so that differential tests against the
symbolic engine do not share an implementation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from ..errors import UnknownSignal
from ..frontend import ast as A
from ..frontend.elaborate import ElaboratedDesign
from ..preprocess import (
    build_pathcode_layout,
    check_blocking_in_sequential,
    check_write_write,
    comb_dependency_order,
    module_dependency_graph,
    partition,
)

_CMP = ("==", "!=", "===", "!==", "<", "<=", ">", ">=", "&&", "||")
_SHIFTS = ("<<", ">>", "<<<", ">>>")


def _m(w: int) -> int:
    return (1 << w) - 1


class Evaluator:
    """Evaluates elaborated expressions over a concrete valuation."""

    def __init__(self, widths: Mapping[str, int]):
        self.widths = widths

    def width(self, e: A.Expr) -> int:
        if isinstance(e, A.Ident):
            return self.widths[e.name]
        if isinstance(e, A.Number):
            return 32 if e.width is None else e.width
        if isinstance(e, A.Unary):
            return self.width(e.operand) if e.op in ("~", "-", "+") else 1
        if isinstance(e, A.Binary):
            if e.op in _CMP:
                return 1
            if e.op in _SHIFTS:
                return self.width(e.left)
            return max(self.width(e.left), self.width(e.right))
        if isinstance(e, A.Ternary):
            return max(self.width(e.then), self.width(e.else_))
        if isinstance(e, A.Index):
            return 1
        if isinstance(e, A.PartSelect):
            return e.msb.value - e.lsb.value + 1
        if isinstance(e, A.Concat):
            return sum(self.width(p) for p in e.parts)
        if isinstance(e, A.Repeat):
            return e.count.value * sum(self.width(p) for p in e.parts)
        raise TypeError(type(e).__name__)

    def value(self, e: A.Expr, env: Mapping[str, int], decisions: Optional[dict[int, int]] = None) -> int:
        """Value of ``e``; ternaries taken are logged in ``decisions`` if given."""

        def ev(x: A.Expr) -> int:
            if isinstance(x, A.Ident):
                if x.name not in env:
                    raise UnknownSignal(x.name)
                return env[x.name]
            if isinstance(x, A.Number):
                return x.value & _m(32 if x.width is None else x.width)
            if isinstance(x, A.Unary):
                v = ev(x.operand)
                w = self.width(x.operand)
                op = x.op
                if op == "~":
                    return v ^ _m(w)
                if op == "-":
                    return (-v) % (1 << w)
                if op == "+":
                    return v
                if op == "!":
                    return 1 if v == 0 else 0
                if op == "&":
                    return 1 if v == _m(w) else 0
                if op == "|":
                    return 1 if v else 0
                if op == "^":
                    return bin(v).count("1") % 2
                if op == "~&":
                    return 0 if v == _m(w) else 1
                if op == "~|":
                    return 0 if v else 1
                if op in ("~^", "^~"):
                    return 1 - bin(v).count("1") % 2
                raise ValueError(op)
            if isinstance(x, A.Binary):
                op = x.op
                a, b = ev(x.left), ev(x.right)
                if op == "&&":
                    return int(a != 0 and b != 0)
                if op == "||":
                    return int(a != 0 or b != 0)
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
                w = self.width(x)
                if op in ("<<", "<<<"):
                    return (a << b) % (1 << w) if b < w else 0
                if op in (">>", ">>>"):
                    return a >> b
                if op == "+":
                    return (a + b) % (1 << w)
                if op == "-":
                    return (a - b) % (1 << w)
                if op == "*":
                    return (a * b) % (1 << w)
                if op == "/":
                    return a // b if b != 0 else _m(w)
                if op == "%":
                    return a % b if b != 0 else a
                if op == "&":
                    return a & b
                if op == "|":
                    return a | b
                if op == "^":
                    return a ^ b
                if op in ("~^", "^~"):
                    return (a ^ b) ^ _m(w)
                raise ValueError(op)
            if isinstance(x, A.Ternary):
                c = ev(x.cond) != 0
                if decisions is not None:
                    decisions[x.nid] = int(c)
                return ev(x.then) if c else ev(x.else_)
            if isinstance(x, A.Index):
                base = ev(x.base)
                k = ev(x.index)
                if k >= self.width(x.base):
                    return 0
                return (base >> k) & 1
            if isinstance(x, A.PartSelect):
                return (ev(x.base) >> x.lsb.value) & _m(x.msb.value - x.lsb.value + 1)
            if isinstance(x, A.Concat):
                acc = 0
                for p in x.parts:
                    acc = (acc << self.width(p)) | ev(p)
                return acc
            if isinstance(x, A.Repeat):
                unit_w = sum(self.width(p) for p in x.parts)
                unit = 0
                for p in x.parts:
                    unit = (unit << self.width(p)) | ev(p)
                acc = 0
                for _ in range(x.count.value):
                    acc = (acc << unit_w) | unit
                return acc
            raise TypeError(type(x).__name__)

        return ev(e)

    def store(self, old: int, lhs: A.Expr, value: int, env: Mapping[str, int], decisions=None) -> int:
        """``old`` with the bits named by ``lhs`` replaced by ``value``."""
        if isinstance(lhs, A.Ident):
            return value & _m(self.widths[lhs.name])
        if isinstance(lhs, A.PartSelect):
            lo, hi = lhs.lsb.value, lhs.msb.value
            field_mask = _m(hi - lo + 1) << lo
            return (old & ~field_mask) | ((value << lo) & field_mask)
        if isinstance(lhs, A.Index):
            w = self.widths[lhs.base.name]
            k = self.value(lhs.index, env, decisions)
            if k >= w:
                return old
            return (old & ~(1 << k)) | ((value & 1) << k)
        raise TypeError(type(lhs).__name__)


def _root(lhs: A.Expr) -> str:
    while not isinstance(lhs, A.Ident):
        lhs = lhs.base
    return lhs.name


@dataclass
class Trace:
    states: list[dict[str, int]]  # states[k]: after k clock edges, inputs of cycle k applied
    pathcodes: list[dict[str, str]]  # pathcodes[c]: decisions taken during cycle c

    def to_json_lines(self) -> Iterable[str]:
        for k, st in enumerate(self.states):
            for sig, v in st.items():
                yield json.dumps({"cycle": k, "signal": sig, "value_hex": format(v, "x")})

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            for line in self.to_json_lines():
                fh.write(line + "\n")


class Simulator:
    """Cycle-based simulation of an elaborated design."""

    def __init__(self, design: ElaboratedDesign, ternary_mode: str = "ite", allow_races: bool = False):
        self.design = design
        self.ternary_mode = ternary_mode
        parts = partition(design)
        check_blocking_in_sequential(parts)
        check_write_write(parts, allow_races)
        self.order = comb_dependency_order(parts)
        self.layout = build_pathcode_layout(parts, ternary_mode)
        rank = {inst: k for k, inst in enumerate(module_dependency_graph(design).order)}
        self.blocks = sorted(parts.seq, key=lambda p: (rank[p.instance], p.block.index))
        self.widths = {k: s.width for k, s in design.signals.items()}
        self.ev = Evaluator(self.widths)
        self.inputs = list(design.top_inputs)
        self.regs = [s.name for s in design.signals.values() if s.kind == "reg"]

    def resolve_input(self, name: str) -> str:
        if name in self.inputs:
            return name
        q = f"{self.design.top}.{name}"
        if q in self.inputs:
            return q
        raise UnknownSignal(name, "input vector")

    def settle(self, env: dict[str, int]) -> None:
        for ca in self.order:
            v = self.ev.value(ca.rhs, env)
            env[ca.target] = self.ev.store(env[ca.target], ca.lhs, v, env)

    def reset(self, first_inputs: Mapping[str, int], init: Optional[Mapping[str, int]] = None) -> dict[str, int]:
        env: dict[str, int] = {}
        init = {**(init or {})}
        for name, sig in self.design.signals.items():
            if sig.kind == "reg":
                if sig.init is not None:
                    env[name] = sig.init
                else:
                    env[name] = init.get(name, 0) & _m(sig.width)
            else:
                env[name] = 0
        self.apply_inputs(env, first_inputs)
        self.settle(env)
        return env

    def apply_inputs(self, env: dict[str, int], vec: Mapping[str, int]) -> None:
        for name, v in vec.items():
            full = self.resolve_input(name)
            env[full] = v & _m(self.widths[full])

    def step(self, env: Mapping[str, int]) -> tuple[dict[str, int], dict[str, str]]:
        """Run every always block on ``env`` and return (pending NBAs, pathcodes)."""
        pending: dict[str, int] = {}
        owner: dict[str, str] = {}
        codes: dict[str, str] = {}
        for blk in self.blocks:
            decisions: dict[int, int] = {}
            self._exec(blk.body, env, pending, owner, blk.block_id, decisions)
            codes[blk.block_id] = self.layout.blocks[blk.block_id].encode(decisions)
        return pending, codes

    def _exec(self, s: A.Stmt, env, pending, owner, block_id: str, decisions: dict[int, int]) -> None:
        tern = decisions if self.ternary_mode == "branch" else None
        if isinstance(s, A.Block):
            for st in s.stmts:
                self._exec(st, env, pending, owner, block_id, decisions)
        elif isinstance(s, A.If):
            c = self.ev.value(s.cond, env, tern) != 0
            decisions[s.nid] = int(c)
            if c:
                self._exec(s.then, env, pending, owner, block_id, decisions)
            elif s.else_ is not None:
                self._exec(s.else_, env, pending, owner, block_id, decisions)
        elif isinstance(s, A.Case):
            sel = self.ev.value(s.selector, env, tern)
            taken = -1
            for k, item in enumerate(s.items):
                if any(sel == (lbl.value & _m(32 if lbl.width is None else lbl.width)) for lbl in item.labels):
                    taken = k
                    break
            if taken >= 0:
                decisions[s.nid] = taken
                self._exec(s.items[taken].body, env, pending, owner, block_id, decisions)
            elif s.default is not None:
                decisions[s.nid] = len(s.items)
                self._exec(s.default, env, pending, owner, block_id, decisions)
            else:
                decisions[s.nid] = -1
        elif isinstance(s, A.ProcAssign):
            v = self.ev.value(s.rhs, env, tern)
            root = _root(s.lhs)
            old = pending[root] if owner.get(root) == block_id else env[root]
            pending[root] = self.ev.store(old, s.lhs, v, env, tern)
            owner[root] = block_id
        elif isinstance(s, A.NullStmt):
            pass
        else:
            raise TypeError(type(s).__name__)

    def simulate(
        self,
        inputs: Sequence[Mapping[str, int]],
        cycles: int,
        init: Optional[Mapping[str, int]] = None,
    ) -> Trace:
        """Run ``cycles`` clock edges.

        ``inputs[k]`` drives cycle ``k``; a missing or partial vector holds
        the previous values.  ``init`` gives reset values for registers
        without an initialiser (default 0).
        """
        vec = lambda k: inputs[k] if k < len(inputs) else {}
        env = self.reset(vec(0), init)
        states = [dict(env)]
        codes = []
        for c in range(cycles):
            pending, pc = self.step(env)
            env = dict(env)
            env.update(pending)
            self.apply_inputs(env, vec(c + 1))
            self.settle(env)
            states.append(dict(env))
            codes.append(pc)
        return Trace(states, codes)


def simulate(
    design: ElaboratedDesign,
    inputs: Sequence[Mapping[str, int]],
    cycles: int,
    init: Optional[Mapping[str, int]] = None,
    ternary_mode: str = "ite",
    allow_races: bool = False,
) -> Trace:
    return Simulator(design, ternary_mode, allow_races).simulate(inputs, cycles, init)
