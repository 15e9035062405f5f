from __future__ import annotations

import itertools

import pytest

from piecewise import samples as S
from piecewise.errors import BlockingInSequential, CombLatchError, CombLoopError, UnknownSignal, WriteWriteConflict
from piecewise.frontend import parse_assertions
from piecewise.preprocess import (
    build_pathcode_layout,
    check_blocking_in_sequential,
    check_write_write,
    comb_dependency_graph,
    comb_dependency_order,
    cone_of_influence,
    detect_repeat_instances,
    iter_statements,
    module_dependency_graph,
    partition,
    to_dot,
    upper_bound_paths,
)
from support import load


def test_queue_partition():
    p = partition(load(S.QUEUE, "queue"))
    assert len(p.seq) == 1
    assert p.seq[0].write_set == {"queue.content", "queue.in_use"}
    assert len(p.comb) == 3
    assert set(p.regs) == {"queue.content", "queue.in_use"}


def test_toy_partition():
    p = partition(load(S.TOY, "toy"))
    assert [b.write_set for b in p.seq] == [{"toy.x"}, {"toy.y"}]
    assert list(p.comb) == []


def test_no_always_blocks():
    assert list(partition(load(S.CASE1, "case1")).seq) == []


def test_partition_coverage():
    d = load(S.TWO_QUEUE, "top")
    p = partition(d)
    seen = [s.nid for b in p.seq for s in iter_statements(b.body)]
    expect = [s.nid for b in d.blocks for s in iter_statements(b.body)]
    assert sorted(seen) == sorted(expect) and len(set(seen)) == len(seen)


def test_pathcode_bits():
    layout = build_pathcode_layout(partition(load(S.QUEUE, "queue")))
    assert layout.blocks["queue#0"].total_bits == 2
    case = build_pathcode_layout(partition(load(S.CASE_STMT, "casedemo")))
    assert case.blocks["casedemo#0"].total_bits == 3
    flat = build_pathcode_layout(partition(load(S.CHAIN, "chain")))
    assert all(b.total_bits == 0 for b in flat.blocks.values())


def test_pathcode_offsets_dense():
    layout = build_pathcode_layout(partition(load(S.synthetic(3, 2), "synth")))
    for blk in layout.blocks.values():
        pos = 0
        for pt in blk.points:
            assert pt.offset == pos
            pos += pt.bits
        assert pos == blk.total_bits


def test_ternary_branch_mode_bits():
    src = "module m(input clk, input a, input [1:0] d, output reg [1:0] r = 0); always @(posedge clk) r <= a ? d : 2'd0; endmodule"
    p = partition(load(src, "m"))
    assert build_pathcode_layout(p, "ite").blocks["m#0"].total_bits == 0
    assert build_pathcode_layout(p, "branch").blocks["m#0"].total_bits == 1


def test_case_encoding_one_hot():
    layout = build_pathcode_layout(partition(load(S.CASE_STMT, "casedemo"))).blocks["casedemo#0"]
    nid = layout.points[0].nid
    assert [layout.encode({nid: k}) for k in range(3)] == ["100", "010", "001"]


def test_comb_order_case2a():
    order = comb_dependency_order(partition(load(S.CASE2A, "case2a")))
    assert [ca.target for ca in order] == ["case2a.read_data2", "case2a.read_data"]


def test_comb_loop_case3():
    with pytest.raises(CombLoopError) as info:
        comb_dependency_order(partition(load(S.CASE3, "case3")))
    assert info.value.cycle == ["case3.read_data"]


def test_comb_latch():
    with pytest.raises(CombLatchError):
        comb_dependency_order(partition(load(S.LATCH, "latch")))


def test_comb_order_stable():
    src = "module m(input clk, input a, input b, output x, output y); assign x = a; assign y = b; endmodule"
    p = partition(load(src, "m"))
    first = [ca.target for ca in comb_dependency_order(p)]
    assert first == [ca.target for ca in comb_dependency_order(p)]


def test_module_order_chain():
    g = module_dependency_graph(load(S.CHAIN, "chain"))
    assert g.order.index("chain.C") < g.order.index("chain.B") < g.order.index("chain.A")
    assert ("chain.B", "chain.A") in g.edges and ("chain.C", "chain.B") in g.edges


def test_module_order_two_queue():
    g = module_dependency_graph(load(S.TWO_QUEUE, "top"))
    assert g.order.index("top.q1") < g.order.index("top.q2")


def test_topological_validity():
    for src, top in [(S.CHAIN, "chain"), (S.TWO_QUEUE, "top"), (S.CASE2A, "case2a")]:
        d = load(src, top)
        for g in (module_dependency_graph(d), comb_dependency_graph(partition(d))):
            if g.kind == "module":
                # register-sourced edges may be cyclic; comb-sourced ones are ordered
                edges = [e for e in g.edges if g.edge_attrs[e]["comb"]]
            else:
                # register sources are leaves and never need ordering
                edges = [(u, v) for u, v in g.edges if u in g.order]
            for u, v in edges:
                assert g.order.index(u) < g.order.index(v)


def test_loop_dot_is_red():
    g = comb_dependency_graph(partition(load(S.CASE3, "case3")))
    dot = to_dot(g)
    assert '"case3.read_data" -> "case3.read_data" [color=red];' in dot


def test_empty_graph_dot():
    src = "module m(input clk, input a, output reg r = 0); always @(posedge clk) r <= a; endmodule"
    dot = to_dot(comb_dependency_graph(partition(load(src, "m"))))
    assert dot.startswith("digraph") and "->" not in dot


def test_write_write():
    p = partition(load(S.WRITE_WRITE, "ww"))
    with pytest.raises(WriteWriteConflict) as info:
        check_write_write(p)
    assert info.value.signal == "ww.x"
    report = check_write_write(p, allow_races=True)
    assert report.races[0].winner == "ww#1"
    assert check_write_write(partition(load(S.TOY, "toy"))).ok


def test_blocking_in_sequential():
    with pytest.raises(BlockingInSequential):
        check_blocking_in_sequential(partition(load(S.BLOCKING, "blk")))
    check_blocking_in_sequential(partition(load(S.QUEUE, "queue")))
    mixed = "module m(input clk, input a, output reg x = 0, output reg y = 0); always @(posedge clk) begin y <= a; x = a; end endmodule"
    with pytest.raises(BlockingInSequential) as info:
        check_blocking_in_sequential(partition(load(mixed, "m")))
    assert "m.x" in str(info.value)


def test_coi_two_queue():
    d = load(S.TWO_QUEUE, "top")
    coi = cone_of_influence(d, parse_assertions("assert property (@(posedge clk) o_data != 0);"))
    assert coi.relevant("top.q1#0") and coi.relevant("top.q2#0")


def test_coi_prunes_unbound_queue():
    src = S.TWO_QUEUE_TOP.replace(".write_en(irdy)", ".write_en(extra_en)").replace(
        "input clk,", "input clk,\n    input extra_en,"
    ) + "\n" + S.QUEUE
    assert "extra_en" in src
    d = load(src, "top")
    coi = cone_of_influence(d, parse_assertions("assert property (@(posedge clk) !q2_is_empty);"))
    assert coi.relevant("top.q2#0")
    assert not coi.relevant("top.q1#0")


def test_coi_constant_assertion():
    coi = cone_of_influence(load(S.TOY, "toy"), parse_assertions("assert property (@(posedge clk) 1'b1);"))
    assert coi.closure == set() and coi.blocks == {"toy#0": False, "toy#1": False}


def test_coi_unknown_signal():
    with pytest.raises(UnknownSignal):
        cone_of_influence(load(S.TOY, "toy"), parse_assertions("assert property (@(posedge clk) nosuch);"))


def test_repeat_instances():
    assert detect_repeat_instances(load(S.TWO_QUEUE, "top")) == [["top"], ["top.q1", "top.q2"]]
    params = """
    module sub #(parameter W = 1) (input clk, input [3:0] d, output [3:0] q); reg [3:0] r = 0; always @(posedge clk) r <= d + W; assign q = r; endmodule
    module t(input clk, input [3:0] d, output [3:0] a, output [3:0] b);
        sub #(.W(1)) s1 (.clk(clk), .d(d), .q(a));
        sub #(.W(2)) s2 (.clk(clk), .d(d), .q(b));
    endmodule
    """
    classes = detect_repeat_instances(load(params, "t"))
    assert sorted(map(len, classes)) == [1, 1, 1]


def _enumerate_paths(block_layout) -> int:
    # brute-force census of the distinct outcome vectors of a block
    choices = [range(pt.arity) for pt in block_layout.points]
    return len(set(itertools.product(*choices)))


def test_upper_bound_paths():
    toy = upper_bound_paths(build_pathcode_layout(partition(load(S.TOY, "toy"))))
    assert (toy.per_block, toy.baseline_total, toy.piecewise_total) == ([2, 2], 4, 4)
    layout = build_pathcode_layout(partition(load(S.synthetic(3, 2), "synth")))
    b = upper_bound_paths(layout)
    assert (b.per_block, b.baseline_total, b.piecewise_total) == ([4, 4, 4], 64, 12)
    assert [_enumerate_paths(blk) for blk in layout.blocks.values()] == [4, 4, 4]
    flat = upper_bound_paths(build_pathcode_layout(partition(load(S.CHAIN, "chain"))))
    assert flat.baseline_total == 1 and flat.piecewise_total == 3
