"""Exception hierarchy shared across the pipeline.

Errors fall into three categories that the command-line driver maps to exit
codes: ``LegalityError`` (the design or assertion file is outside the
supported subset, exit 2), ``EnvironmentError_`` (solver or I/O trouble,
exit 3) and ``BudgetExceeded`` (exit 4).
"""

from __future__ import annotations


class PiecewiseError(Exception):
    """Base class for every error raised by this package."""


class LegalityError(PiecewiseError):
    """The input is not a legal design in the supported subset."""


class SyntaxError_(LegalityError):
    def __init__(self, message: str, line: int = 0, col: int = 0, expected: tuple[str, ...] = ()):
        self.line = line
        self.col = col
        self.expected = expected
        where = f"{line}:{col}: " if line else ""
        extra = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"{where}{message}{extra}")


class UnsupportedConstruct(LegalityError):
    def __init__(self, construct: str, line: int = 0, col: int = 0):
        self.construct = construct
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}unsupported construct: {construct}")


class ElaborationError(LegalityError):
    pass


class UnknownTop(ElaborationError):
    pass


class UnknownSignal(ElaborationError):
    def __init__(self, name: str, where: str = ""):
        self.name = name
        super().__init__(f"unknown signal {name!r}" + (f" in {where}" if where else ""))


class RecursiveInstantiation(ElaborationError):
    def __init__(self, chain: list[str]):
        self.chain = chain
        super().__init__("recursive instantiation: " + " -> ".join(chain))


class NonStaticLoopBound(ElaborationError):
    pass


class WidthMismatch(ElaborationError):
    pass


class WidthError(LegalityError):
    pass


class DuplicateAssertion(LegalityError):
    pass


class CombLoopError(LegalityError):
    """A combinational cycle; ``cycle`` lists the signals in dependency order."""

    def __init__(self, cycle: list[str], message: str | None = None):
        self.cycle = list(cycle)
        super().__init__(message or "combinational loop: " + " -> ".join(self.cycle + self.cycle[:1]))


class CombLatchError(CombLoopError):
    """A combinational feedback path that holds a value (an inferred latch)."""

    def __init__(self, cycle: list[str]):
        super().__init__(cycle, "combinational latch: " + " -> ".join(list(cycle) + list(cycle[:1])))


class WriteWriteConflict(LegalityError):
    def __init__(self, signal: str, first: str, second: str):
        self.signal = signal
        self.blocks = (first, second)
        super().__init__(f"signal {signal!r} written in always blocks {first} and {second}")


class BlockingInSequential(LegalityError):
    def __init__(self, block: str, line: int, col: int, target: str):
        self.block = block
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: blocking assignment to {target!r} inside always block {block}")


class PathcodeExhausted(PiecewiseError):
    pass


class EnvironmentError_(PiecewiseError):
    pass


class SolverUnavailable(EnvironmentError_):
    pass


class SolverProtocolError(EnvironmentError_):
    pass


class BudgetExceeded(PiecewiseError):
    pass


class CacheMiss(PiecewiseError):
    pass


class MalformedCounterExample(PiecewiseError):
    pass
