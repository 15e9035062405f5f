from __future__ import annotations

import json

import pytest

from piecewise import samples as S
from piecewise.errors import BudgetExceeded, UnknownSignal
from piecewise.explorer import CounterExample
from piecewise.frontend import parse_assertions
from piecewise.oracle import Simulator, brute_force, replay, simulate
from piecewise.smt import Sat
from piecewise.symcore import evaluate, free_symbols
from support import FIXED, Case, explorer, load, solver


def test_queue_write_then_state():
    d = load(S.QUEUE, "queue")
    tr = simulate(d, [{"write_en": 1, "write_data": 5, "read_en": 0}, {"write_en": 0}], 1)
    st = tr.states[1]
    assert (st["queue.content"], st["queue.in_use"]) == (5, 1)
    assert (st["queue.is_empty"], st["queue.is_full"]) == (1, 0)
    assert tr.pathcodes == [{"queue#0": "10"}]


def test_swap_is_simultaneous():
    src = "module sw(input clk, output reg [1:0] a = 1, output reg [1:0] b = 2); always @(posedge clk) begin a <= b; b <= a; end endmodule"
    tr = simulate(load(src, "sw"), [], 3)
    assert [(s["sw.a"], s["sw.b"]) for s in tr.states] == [(1, 2), (2, 1), (1, 2), (2, 1)]


def test_toy_paths():
    d = load(S.TOY, "toy")
    tr = simulate(d, [{"g0": 1, "g1": 0, "inpA": 3, "inpB": 2}], 1)
    assert (tr.states[1]["toy.x"], tr.states[1]["toy.y"]) == (3, 0)
    assert tr.pathcodes[0] == {"toy#0": "1", "toy#1": "0"}


def test_truncating_input():
    d = load(S.TOY, "toy")
    tr = simulate(d, [{"g0": 1, "inpA": 7}], 1)
    assert tr.states[1]["toy.x"] == 3


def test_held_inputs():
    d = load(S.TOY, "toy")
    tr = simulate(d, [{"g0": 1, "inpA": 2}], 2)
    assert tr.states[2]["toy.g0"] == 1 and tr.states[2]["toy.x"] == 2


def test_unknown_input():
    with pytest.raises(UnknownSignal):
        simulate(load(S.TOY, "toy"), [{"nosuch": 1}], 1)


def test_trace_lines(tmp_path):
    tr = simulate(load(S.TOY, "toy"), [{"g0": 1, "inpA": 3}], 1)
    lines = [json.loads(x) for x in tr.to_json_lines()]
    assert {"cycle": 1, "signal": "toy.x", "value_hex": "3"} in lines
    out = tmp_path / "t.jsonl"
    tr.write(str(out))
    assert len(out.read_text().splitlines()) == len(lines)


def test_brute_force_toy():
    d = load(S.TOY, "toy")
    res = brute_force(d, parse_assertions(S.ASSERT_TOY), 1)
    assert res.violations == {"assert_1": 1}
    assert len(res.paths) == 4


def test_brute_force_tied_and_flat():
    tied = brute_force(load(S.TOY_TIED, "toy"), [], 1)
    assert len(tied.paths) == 2
    flat = brute_force(load(S.CHAIN, "chain"), [], 1)
    assert len(flat.paths) == 1


def test_brute_force_domains_and_budget():
    d = load(S.QUEUE, "queue")
    res = brute_force(d, [], 1, input_domains={"write_data": [0, 1]})
    assert res.simulations == (2 * 2 * 2) ** 2
    with pytest.raises(BudgetExceeded):
        brute_force(d, [], 1)


def test_replay_engine_counterexample():
    case = FIXED[2]
    r = explorer(case, "piecewise").run()
    for cx in r.violations:
        res = replay(case.design(), cx, case.specs())
        assert res.violated and res.pathcode_match


def test_replay_forged_counterexample():
    case = FIXED[0]
    cx = CounterExample("assert_1", 1, [{"cycle": 0, "signal": "toy.g0", "value_hex": "0"}], [{"toy#0": "1", "toy#1": "0"}])
    res = replay(case.design(), cx, case.specs())
    assert not res.pathcode_match and res.mismatches[0][:2] == (0, "toy#0")


def _env_for(leaf, model):
    env = dict(model)
    for e in list(leaf.store.current.values()) + list(leaf.pi):
        for name in free_symbols(e):
            env.setdefault(name, 0)
    return env


def _inputs_from(design, env, cycles):
    return [{sig: env.get(f"{sig}@{c}", 0) for sig in design.top_inputs} for c in range(cycles + 1)]


@pytest.mark.parametrize("case", FIXED, ids=lambda c: c.name)
def test_abstraction_agreement(case):
    """A model of any leaf's path condition drives the simulator down that path."""
    ex = explorer(case, "piecewise", coi=False)
    sol = ex.solver
    sim = Simulator(case.design())
    cycles = min(case.cycles, 2)
    for leaf in ex.leaves(cycles):
        v = sol.check_sat(list(leaf.pi))
        assert isinstance(v, Sat)
        env = _env_for(leaf, v.model)
        init = {r: env.get(f"{r}@init", 0) for r in sim.regs}
        tr = sim.simulate(_inputs_from(case.design(), env, cycles), cycles, init)
        assert tr.pathcodes == list(leaf.history)
        final = tr.states[cycles]
        for sig, e in leaf.store.current.items():
            assert evaluate(e, env) == final[sig], sig


def test_coi_soundness_differential():
    # dropping out-of-cone blocks never changes a verdict
    for case in FIXED:
        if not case.brute_force_ok:
            continue
        full = explorer(case, "piecewise", coi=False, uninit="zero").run()
        pruned = explorer(case, "piecewise", coi=True, uninit="zero").run()
        bf = brute_force(case.design(), case.specs(), case.cycles)
        got = {v.assertion: v.cycle for v in pruned.violations}
        assert got == {v.assertion: v.cycle for v in full.violations} == bf.violations, case.name
