"""Counterexample replay and exhaustive bounded checking."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from ..errors import BudgetExceeded, UnknownSignal
from ..explorer.report import CounterExample
from ..frontend.assertions import AssertionSpec
from ..frontend.elaborate import ElaboratedDesign
from ..preprocess import bind_assertions
from .sim import Simulator, Trace


def violated(sim: Simulator, a: AssertionSpec, state: Mapping[str, int]) -> bool:
    """True when bound assertion ``a`` fails on ``state``."""
    body = sim.ev.value(a.body, state) != 0
    if a.antecedent is None:
        return not body
    return sim.ev.value(a.antecedent, state) != 0 and not body


@dataclass
class ReplayResult:
    violated: bool
    trace: Trace
    pathcode_match: bool
    mismatches: list[tuple[int, str, str, str]] = field(default_factory=list)  # (cycle, block, expected, got)


def replay(
    design: ElaboratedDesign,
    cx: CounterExample,
    assertions: Sequence[AssertionSpec],
    ternary_mode: str = "ite",
    allow_races: bool = False,
) -> ReplayResult:
    """Concretely re-run ``cx`` and check its verdict and recorded pathcodes."""
    bound = {a.name: a for a in bind_assertions(design, list(assertions))}
    if cx.assertion not in bound:
        raise UnknownSignal(cx.assertion, "assertion list")
    sim = Simulator(design, ternary_mode, allow_races)
    init = {}
    for reg, hx in cx.initial_registers.items():
        if reg not in design.signals:
            raise UnknownSignal(reg, "initial registers")
        init[reg] = int(hx, 16)
    trace = sim.simulate(cx.input_table(), cx.cycle, init)
    bad = []
    for c, expected in enumerate(cx.pathcodes):
        got = trace.pathcodes[c]
        for blk, code in expected.items():
            if got.get(blk) != code:
                bad.append((c, blk, code, got.get(blk, "")))
    return ReplayResult(violated(sim, bound[cx.assertion], trace.states[cx.cycle]), trace, not bad, bad)


@dataclass
class BruteForceResult:
    violations: dict[str, int]  # assertion name -> earliest violating cycle
    paths: set[tuple[tuple[tuple[str, str], ...], ...]]  # per-cycle sorted (block, pathcode) pairs
    states: set[tuple[tuple[str, int], ...]]  # register valuations after each commit
    simulations: int = 0


def _full_domains(sim: Simulator, domains: Optional[Mapping[str, Sequence[int]]]) -> dict[str, Sequence[int]]:
    given = {sim.resolve_input(k): list(v) for k, v in (domains or {}).items()}
    return {name: given.get(name, range(1 << sim.widths[name])) for name in sim.inputs}


def brute_force(
    design: ElaboratedDesign,
    assertions: Sequence[AssertionSpec],
    cycles: int,
    input_domains: Optional[Mapping[str, Sequence[int]]] = None,
    budget: int = 1 << 20,
    init: Optional[Mapping[str, int]] = None,
    ternary_mode: str = "ite",
    allow_races: bool = False,
) -> BruteForceResult:
    """Enumerate every input sequence of ``cycles + 1`` vectors.

    Assertions are sampled after each of the ``cycles`` clock edges, which
    is why the inputs of the final cycle take part.  Sequences sharing a
    prefix share its simulation.  Inputs left out of ``input_domains``
    range over their full width.
    """
    sim = Simulator(design, ternary_mode, allow_races)
    bound = bind_assertions(design, list(assertions))
    doms = _full_domains(sim, input_domains)
    names = list(doms)
    per_cycle = 1
    for n in names:
        per_cycle *= len(doms[n])
    total = per_cycle ** (cycles + 1)
    if total > budget:
        raise BudgetExceeded(f"{total} input sequences exceed the budget of {budget}")
    vectors = [dict(zip(names, vals)) for vals in itertools.product(*(doms[n] for n in names))]
    result = BruteForceResult({}, set(), set())
    regs = sim.regs

    def visit(env: dict[str, int], cycle: int, codes: tuple) -> None:
        # ``env`` holds the state after ``cycle`` edges with the inputs already applied
        if cycle >= 1:
            result.states.add(tuple((r, env[r]) for r in regs))
            for a in bound:
                if violated(sim, a, env):
                    prev = result.violations.get(a.name)
                    if prev is None or cycle < prev:
                        result.violations[a.name] = cycle
        if cycle == cycles:
            result.paths.add(codes)
            result.simulations += 1
            return
        pending, pc = sim.step(env)
        base = dict(env)
        base.update(pending)
        step_codes = codes + (tuple(sorted(pc.items())),)
        for vec in vectors:
            nxt = dict(base)
            sim.apply_inputs(nxt, vec)
            sim.settle(nxt)
            visit(nxt, cycle + 1, step_codes)

    for vec in vectors:
        visit(sim.reset(vec, init), 0, ())
    return result
