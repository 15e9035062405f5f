from __future__ import annotations

import json

import pytest

from piecewise import samples as S
from piecewise.errors import MalformedCounterExample
from piecewise.explorer import CounterExample, Explorer, ExploreOptions, Report, compose, explore_block
from piecewise.explorer.fragments import Counters
from piecewise.frontend import parse_assertions
from piecewise.preprocess import build_pathcode_layout, partition
from piecewise.smt import EnumerationSolver, Solver
from piecewise.symcore import Const, SymbolPool, SymContext, initial_store, mk_un
from support import FIXED, Case, explorer, load, path_set, solver, verdicts

TOY, TOY_TIED, TWO_QUEUE = FIXED[0], FIXED[1], FIXED[2]


def fragments_of(src, top):
    d = load(src, top)
    ctx = SymContext.from_design(d)
    parts = partition(d)
    layout = build_pathcode_layout(parts)
    pool = SymbolPool()
    store = initial_store(ctx, pool)
    sol = Solver(EnumerationSolver())
    sets = [explore_block(b, store, [], layout.blocks[b.block_id], ctx, sol, Counters()) for b in parts.seq]
    return sets, pool, sol


def test_toy_fragments_and_composition():
    sets, pool, sol = fragments_of(S.TOY, "toy")
    assert [len(s) for s in sets] == [2, 2]
    a, b = pool.input_symbol("toy.inpA", 0, 2), pool.input_symbol("toy.inpB", 0, 2)
    assert {f.pathcode: f.delta["toy.x"] for f in sets[0]} == {"1": a, "0": Const(0, 2)}
    assert {f.pathcode: f.delta["toy.y"] for f in sets[1]} == {"1": b, "0": Const(0, 2)}
    paths = list(compose(sets, [], sol))
    assert len(paths) == 4
    assert {tuple(p.pathcodes.values()) for p in paths} == {("1", "1"), ("1", "0"), ("0", "1"), ("0", "0")}


def test_tied_guards_prune_composition():
    sets, pool, sol = fragments_of(S.TOY_TIED, "toy")
    paths = list(compose(sets, [], sol))
    assert len(paths) == 2
    assert {tuple(p.pathcodes.values()) for p in paths} == {("1", "1"), ("0", "0")}


def test_fragment_conditions():
    sets, pool, _ = fragments_of(S.TOY, "toy")
    g0 = pool.input_symbol("toy.g0", 0, 1)
    conds = {f.pathcode: f.conds for f in sets[0]}
    assert conds == {"1": [g0], "0": [mk_un("not", g0)]}


def test_baseline_counts_toy():
    pw = explorer(TOY, "piecewise", coi=False).run().stats
    base = explorer(TOY, "baseline", coi=False).run().stats
    assert base["composed_paths"] == pw["composed_paths"] == 4
    assert (base["statements_explored"], pw["statements_explored"]) == (9, 6)


def test_synthetic_three_blocks():
    c = Case("s3", S.synthetic(3, 1), "synth", "", 1)
    pw = explorer(c, "piecewise", coi=False).run().stats
    base = explorer(c, "baseline", coi=False).run().stats
    assert base["composed_paths"] == 8 and pw["fragments"] == 6
    assert pw["branch_points_explored"] < base["branch_points_explored"]


def test_infeasible_branch_single_fragment():
    src = "module m(input clk, input [1:0] d, output reg [1:0] r = 0); always @(posedge clk) if (1'b0) r <= d; else r <= 2'd1; endmodule"
    c = Case("dead", src, "m", "", 1)
    stats = explorer(c, "piecewise", coi=False).run().stats
    assert stats["fragments"] == 1 and stats["composed_paths"] == 1


def test_branchless_design_single_state():
    c = Case("flat", S.CHAIN, "chain", "", 3)
    ex = explorer(c, "piecewise", coi=False)
    assert len(ex.leaves()) == 1


def test_two_queue_violation():
    r = explorer(TWO_QUEUE, "piecewise").run()
    assert verdicts(r)["assert_1"] == 1
    cx = next(v for v in r.violations if v.assertion == "assert_1")
    table = cx.input_table()
    assert table[0]["top.i_irdy"] == 1
    assert cx.pathcodes[0]["top.q1#0"][0] == "1"


def test_repeat_merge_skips_second_queue():
    merged = explorer(TWO_QUEUE, "piecewise").run()
    plain = explorer(TWO_QUEUE, "piecewise", repeat_merge=False).run()
    assert merged.stats["statements_by_instance"].get("top.q2", 0) == 0
    assert plain.stats["statements_by_instance"]["top.q2"] > 0
    assert verdicts(merged) == verdicts(plain)


def test_repeat_merge_same_states():
    a = explorer(TWO_QUEUE, "piecewise", coi=False, uninit="zero")
    b = explorer(TWO_QUEUE, "piecewise", coi=False, uninit="zero", repeat_merge=False)
    assert path_set(a, 2) == path_set(b, 2)


def test_no_assertions_explores_full_depth():
    c = Case("toy", S.TOY, "toy", "", 3)
    r = explorer(c, "piecewise", coi=False).run()
    assert r.violations == [] and r.complete
    assert r.stats["paths_completed"] == 4 + 16 + 64


def test_counterexample_round_trip():
    r = explorer(TOY, "piecewise").run()
    again = Report.from_json(json.loads(r.dumps()))
    assert again.violations == r.violations
    assert again.to_json()["violations"] == r.to_json()["violations"]


@pytest.mark.parametrize(
    "record",
    [
        {"cycle": 1, "inputs": [], "pathcodes": [{}]},
        {"assertion": "a", "cycle": 2, "inputs": [], "pathcodes": [{}]},
        {"assertion": "a", "cycle": 1, "inputs": [{"cycle": 5, "signal": "x", "value_hex": "0"}], "pathcodes": [{}]},
        {"assertion": "a", "cycle": 1, "inputs": [{"cycle": 0, "signal": "x", "value_hex": "zz"}], "pathcodes": [{}]},
        {"assertion": "a", "cycle": 1, "inputs": "none", "pathcodes": [{}]},
    ],
)
def test_malformed_counterexample(record):
    with pytest.raises(MalformedCounterExample):
        CounterExample.from_json(record)


def test_max_states_budget():
    c = Case("toy", S.TOY, "toy", "", 3)
    r = explorer(c, "piecewise", coi=False, max_states=5).run()
    assert not r.complete and "states" in r.stats["stopped"]


def test_time_budget():
    c = Case("toy", S.TOY, "toy", "", 6)
    r = explorer(c, "piecewise", coi=False, budget_s=0.0).run()
    assert not r.complete


def test_options_validation():
    with pytest.raises(ValueError):
        ExploreOptions(mode="sideways")
    with pytest.raises(ValueError):
        ExploreOptions(uninit="random")


def test_deterministic_reports():
    def run():
        r = explorer(TWO_QUEUE, "piecewise", Solver(EnumerationSolver(limit_bits=40))).run().to_json()
        r["stats"].pop("wall_ms")
        r["stats"]["smt"].pop("solver_ms", None)
        return r

    assert run() == run()


def test_all_violations_flag():
    specs = "assert property (@(posedge clk) x != 2'd3);\n"
    c = Case("toy", S.TOY, "toy", specs, 2)
    first = explorer(c, "piecewise").run()
    every = explorer(c, "piecewise", all_violations=True).run()
    assert len(first.violations) == 1 and len(every.violations) > 1


def test_ternary_modes_agree():
    src = "module m(input clk, input a, input [1:0] d, output reg [1:0] r = 0); always @(posedge clk) r <= a ? d : 2'd0; endmodule"
    specs = "assert property (@(posedge clk) r != 2'd2);\n"
    c = Case("tern", src, "m", specs, 1)
    ite = explorer(c, "piecewise", ternary_mode="ite").run()
    br = explorer(c, "piecewise", ternary_mode="branch").run()
    assert verdicts(ite) == verdicts(br) == {"assert_1": 1}
    assert ite.stats["fragments"] == 1 and br.stats["fragments"] == 2


def test_uninitialized_register_symbolic():
    src = "module m(input clk, input a, output reg [1:0] r); always @(posedge clk) if (a) r <= r + 2'd1; endmodule"
    specs = "assert property (@(posedge clk) r != 2'd3);\n"
    c = Case("uninit", src, "m", specs, 1)
    sym = explorer(c, "piecewise").run()
    zero = explorer(c, "piecewise", uninit="zero").run()
    assert verdicts(sym) == {"assert_1": 1} and verdicts(zero) == {}
    assert "m.r" in sym.violations[0].initial_registers


def test_explorer_defaults():
    ex = Explorer(load(S.TOY, "toy"), parse_assertions(S.ASSERT_TOY), solver=solver())
    assert ex.opts.mode == "piecewise" and ex.run().violations
