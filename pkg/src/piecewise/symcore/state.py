from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Optional

from .expr import SExpr, Sym


@dataclass(frozen=True)
class SymbolInfo:
    signal: str
    cycle: Optional[int]  # None for an uninitialised register's reset value
    width: int


class SymbolPool:
    """Issues symbols and remembers where each one came from.

    ``input_symbol`` is memoised per (signal, cycle) so re-running a cycle
    names the same input the same way; ``fresh_symbol`` never repeats.
    """

    def __init__(self) -> None:
        self._counter = itertools.count(1)
        self._lock = threading.Lock()
        self.info: dict[str, SymbolInfo] = {}

    def _record(self, name: str, signal: str, cycle: Optional[int], width: int) -> Sym:
        with self._lock:
            known = self.info.get(name)
            if known is None:
                self.info[name] = SymbolInfo(signal, cycle, width)
            elif known.width != width:
                raise ValueError(f"symbol {name} reissued with a different width")
        return Sym(name, width)

    def fresh_symbol(self, signal: str, cycle: int, width: int) -> Sym:
        if width < 1:
            raise ValueError("width must be positive")
        n = next(self._counter)
        return self._record(f"{signal}@{cycle}#{n}", signal, cycle, width)

    def input_symbol(self, signal: str, cycle: int, width: int) -> Sym:
        return self._record(f"{signal}@{cycle}", signal, cycle, width)

    def init_symbol(self, register: str, width: int) -> Sym:
        return self._record(f"{register}@init", register, None, width)

    def inputs(self) -> dict[str, SymbolInfo]:
        return {k: v for k, v in self.info.items() if v.cycle is not None}


@dataclass
class SymbolicStore:
    current: dict[str, SExpr]
    prev_regs: dict[str, SExpr]
    pending_nba: dict[str, SExpr] = field(default_factory=dict)
    dirty: set[str] = field(default_factory=set)
    nba_owner: dict[str, str] = field(default_factory=dict)

    def copy(self) -> "SymbolicStore":
        return SymbolicStore(
            dict(self.current), dict(self.prev_regs), dict(self.pending_nba), set(self.dirty), dict(self.nba_owner)
        )

    def read(self, name: str, view: str) -> SExpr:
        if view == "prev":
            hit = self.prev_regs.get(name)
            if hit is not None:
                return hit
        return self.current[name]


class PathCondition(list):
    """Conjunct list of 1-bit expressions; empty means true."""

    def copy(self) -> "PathCondition":
        return PathCondition(self)
