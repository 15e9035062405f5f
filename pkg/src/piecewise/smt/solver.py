"""Satisfiability checking: an external SMT-LIB2 process or exhaustive enumeration."""

from __future__ import annotations

import os
import select
import shutil
import subprocess
import threading
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from ..errors import SolverProtocolError, SolverUnavailable
from ..symcore.evaluate import evaluate, evaluate_vec, free_symbols
from ..symcore.expr import FALSE, TRUE, Const, SExpr
from .lower import lower_query
from .sexp import paren_depth, parse_model

ENUM_LIMIT_BITS = 24
DEFAULT_TIMEOUT_MS = 5000
_CHUNK = 1 << 20


@dataclass(frozen=True)
class Sat:
    model: dict[str, int]


@dataclass(frozen=True)
class Unsat:
    pass


@dataclass(frozen=True)
class Unknown:
    reason: str


Verdict = Union[Sat, Unsat, Unknown]

IMPLIES_TRUE = "implies_true"
IMPLIES_FALSE = "implies_false"
BOTH_FEASIBLE = "both_feasible"


@dataclass
class SolverStats:
    queries: int = 0
    solver_ms: float = 0.0
    unknown: int = 0
    by_phase: dict[str, int] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def record(self, phase: str, ms: float, unknown: bool) -> None:
        with self._lock:
            self.queries += 1
            self.solver_ms += ms
            self.unknown += int(unknown)
            self.by_phase[phase] = self.by_phase.get(phase, 0) + 1

    def as_dict(self) -> dict:
        return {
            "queries": self.queries,
            "solver_ms": round(self.solver_ms, 3),
            "unknown": self.unknown,
            "by_phase": dict(self.by_phase),
        }


# -- backends ---------------------------------------------------------------


class ExternalSolver:
    """A long-running SMT-LIB2 process driven with push/pop per query."""

    name = "external"

    def __init__(self, command: list[str], timeout_ms: int = DEFAULT_TIMEOUT_MS):
        self.command = command
        self.timeout_ms = timeout_ms
        self.proc: Optional[subprocess.Popen] = None
        self._start()

    def _start(self) -> None:
        try:
            self.proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                bufsize=0,
            )
        except OSError as exc:
            raise SolverUnavailable(f"cannot start solver {self.command[0]!r}: {exc}") from None
        self._buf = b""
        self._send(
            [
                "(set-option :print-success false)",
                "(set-option :produce-models true)",
                f"(set-option :timeout {int(self.timeout_ms)})",
                "(set-logic QF_BV)",
            ]
        )

    def _send(self, lines: Iterable[str]) -> None:
        assert self.proc is not None and self.proc.stdin is not None
        try:
            self.proc.stdin.write(("\n".join(lines) + "\n").encode())
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise SolverProtocolError(f"solver pipe closed: {exc}") from None

    def _readline(self, deadline: float) -> str:
        assert self.proc is not None and self.proc.stdout is not None
        fd = self.proc.stdout.fileno()
        while b"\n" not in self._buf:
            wait = max(0.0, deadline - time.monotonic())
            ready, _, _ = select.select([fd], [], [], wait)
            if not ready:
                raise TimeoutError
            chunk = os.read(fd, 65536)
            if not chunk:
                raise SolverProtocolError("solver exited unexpectedly")
            self._buf += chunk
        line, _, self._buf = self._buf.partition(b"\n")
        return line.decode() + "\n"

    def _read_sexp(self, deadline: float) -> str:
        text = self._readline(deadline)
        while paren_depth(text) > 0:
            text += self._readline(deadline)
        return text

    def check(self, conjuncts: list[SExpr]) -> Verdict:
        q = lower_query(conjuncts)
        deadline = time.monotonic() + self.timeout_ms / 1000.0 + 5.0
        self._send(["(push 1)", *q.script(), "(check-sat)"])
        try:
            answer = self._readline(deadline).strip()
            if answer.startswith("(error"):
                raise SolverProtocolError(f"solver error: {answer}")
            if answer == "unsat":
                verdict: Verdict = Unsat()
            elif answer == "sat":
                self._send(["(get-model)"])
                text = self._read_sexp(deadline)
                if text.lstrip().startswith("(error"):
                    raise SolverProtocolError(f"solver error: {text.strip()}")
                model = parse_model(text)
                verdict = Sat({n: model.get(n, 0) for n in q.declarations})
            elif answer == "unknown":
                verdict = Unknown("solver returned unknown")
            else:
                raise SolverProtocolError(f"unexpected solver reply {answer!r}")
        except TimeoutError:
            self.restart()
            return Unknown("solver did not answer in time")
        self._send(["(pop 1)"])
        return verdict

    def restart(self) -> None:
        self.close()
        self._start()

    def close(self) -> None:
        if self.proc is not None:
            try:
                if self.proc.poll() is None:
                    self.proc.stdin.write(b"(exit)\n")
                    self.proc.stdin.flush()
                    self.proc.wait(timeout=1)
            except (OSError, subprocess.TimeoutExpired, ValueError):
                self.proc.kill()
            self.proc = None

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


def _components(conjuncts: list[SExpr]) -> list[tuple[list[SExpr], dict[str, int]]]:
    """Group conjuncts whose symbol sets overlap (union-find over symbols)."""
    parent: dict[str, str] = {}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    syms = [free_symbols(c) for c in conjuncts]
    for s in syms:
        names = list(s)
        for n in names:
            parent.setdefault(n, n)
        for n in names[1:]:
            ra, rb = find(names[0]), find(n)
            if ra != rb:
                parent[rb] = ra
    groups: dict[str, tuple[list[SExpr], dict[str, int]]] = {}
    for c, s in zip(conjuncts, syms):
        key = find(next(iter(s))) if s else ""
        g = groups.setdefault(key, ([], {}))
        g[0].append(c)
        g[1].update(s)
    return list(groups.values())


class EnumerationSolver:
    """Exhaustive search over every assignment, vectorised with numpy.

    Independent groups of conjuncts are solved separately, so the limit
    applies to the largest group rather than the whole query.
    """

    name = "fallback"

    def __init__(self, limit_bits: int = ENUM_LIMIT_BITS):
        self.limit_bits = limit_bits

    def check(self, conjuncts: list[SExpr]) -> Verdict:
        model: dict[str, int] = {}
        for group, syms in _components(conjuncts):
            if not syms:
                if any(evaluate(c, {}) == 0 for c in group):
                    return Unsat()
                continue
            bits = sum(syms.values())
            if bits > self.limit_bits:
                raise SolverUnavailable(
                    f"query needs {bits} free bits; enumeration handles at most {self.limit_bits} "
                    "and no external solver is configured"
                )
            found = self._search(group, syms, bits)
            if found is None:
                return Unsat()
            model.update(found)
        return Sat(model)

    @staticmethod
    def _search(group: list[SExpr], syms: dict[str, int], bits: int) -> Optional[dict[str, int]]:
        names = sorted(syms)
        total = 1 << bits
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(total, start + _CHUNK), dtype=np.uint64)
            env = {}
            shift = 0
            for n in names:
                w = syms[n]
                env[n] = (idx >> np.uint64(shift)) & np.uint64((1 << w) - 1)
                shift += w
            ok = np.ones(idx.shape, dtype=bool)
            for c in group:
                ok &= np.asarray(evaluate_vec(c, env)) != 0
                if not ok.any():
                    break
            hits = np.flatnonzero(ok)
            if hits.size:
                k = int(idx[hits[0]])
                out = {}
                shift = 0
                for n in names:
                    w = syms[n]
                    out[n] = (k >> shift) & ((1 << w) - 1)
                    shift += w
                return out
        return None

    def close(self) -> None:
        pass


# -- facade -------------------------------------------------------------------


class Solver:
    """Counts queries and answers feasibility questions over conjunct lists."""

    def __init__(self, backend, stats: Optional[SolverStats] = None):
        self.backend = backend
        self.stats = stats or SolverStats()

    @property
    def name(self) -> str:
        return self.backend.name

    def check_sat(self, conjuncts: list[SExpr], phase: str = "feasibility") -> Verdict:
        todo = []
        for c in conjuncts:
            if c.width != 1:
                raise ValueError("conjuncts must be 1 bit wide")
            if c is FALSE:
                return Unsat()
            if c is not TRUE:
                todo.append(c)
        if not todo:
            return Sat({})
        t0 = time.perf_counter()
        verdict = self.backend.check(todo)
        self.stats.record(phase, (time.perf_counter() - t0) * 1000.0, isinstance(verdict, Unknown))
        return verdict

    def check_implied(self, pi: list[SExpr], b: SExpr, phase: str = "feasibility") -> str:
        from ..symcore.expr import mk_not1

        if isinstance(b, Const):
            return IMPLIES_TRUE if b.value else IMPLIES_FALSE
        if isinstance(self.check_sat(list(pi) + [mk_not1(b)], phase), Unsat):
            return IMPLIES_TRUE
        if isinstance(self.check_sat(list(pi) + [b], phase), Unsat):
            return IMPLIES_FALSE
        return BOTH_FEASIBLE

    def close(self) -> None:
        self.backend.close()


def _command_for(path: str) -> list[str]:
    extra = os.environ.get("PIECEWISE_SOLVER_ARGS")
    if extra is not None:
        return [path, *extra.split()]
    base = os.path.basename(path).lower()
    if "z3" in base:
        return [path, "-in", "-smt2"]
    if "cvc" in base:
        return [path, "--lang=smt2", "--incremental"]
    if "bitwuzla" in base or "boolector" in base:
        return [path, "--smt2"]
    return [path]


def make_solver(choice: Optional[str] = None, timeout_ms: int = DEFAULT_TIMEOUT_MS) -> Solver:
    """Select a backend: explicit choice, then ``PIECEWISE_SOLVER``, then z3 on PATH.

    ``"fallback"`` forces enumeration; with no solver found, enumeration is
    used and raises ``SolverUnavailable`` for queries beyond its limit.
    """
    choice = choice or os.environ.get("PIECEWISE_SOLVER")
    if choice == "fallback":
        return Solver(EnumerationSolver())
    if choice:
        path = shutil.which(choice) or (choice if os.path.exists(choice) else None)
        if path is None:
            raise SolverUnavailable(f"solver {choice!r} not found")
        return Solver(ExternalSolver(_command_for(path), timeout_ms))
    found = shutil.which("z3")
    if found:
        return Solver(ExternalSolver(_command_for(found), timeout_ms))
    return Solver(EnumerationSolver())
