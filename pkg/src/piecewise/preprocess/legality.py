from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import BlockingInSequential, WriteWriteConflict
from ..frontend import ast as A
from ..frontend.elaborate import lvalue_root
from .partition import Partitions, iter_statements


@dataclass(frozen=True)
class Race:
    signal: str
    blocks: tuple[str, ...]
    winner: str


@dataclass
class RaceReport:
    races: list[Race] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.races

    def winner_of(self, signal: str) -> str | None:
        for r in self.races:
            if r.signal == signal:
                return r.winner
        return None


def check_write_write(partitions: Partitions, allow_races: bool = False) -> RaceReport:
    """Raise on a signal written by two always blocks unless races are allowed.

    With ``allow_races`` the textually last writer wins; the report lists
    every such signal.
    """
    writers: dict[str, list[str]] = {}
    for p in partitions.seq:
        for s in sorted(p.write_set):
            writers.setdefault(s, []).append(p.block_id)
    report = RaceReport()
    for sig, blocks in writers.items():
        if len(blocks) < 2:
            continue
        if not allow_races:
            raise WriteWriteConflict(sig, blocks[0], blocks[1])
        report.races.append(Race(sig, tuple(blocks), blocks[-1]))
    return report


def check_blocking_in_sequential(partitions: Partitions) -> None:
    for p in partitions.seq:
        for st in iter_statements(p.body):
            if isinstance(st, A.ProcAssign) and st.blocking:
                raise BlockingInSequential(p.block_id, st.span.line, st.span.col, lvalue_root(st.lhs))
