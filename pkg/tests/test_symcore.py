from __future__ import annotations

import pytest

from piecewise import samples as S
from piecewise.errors import PathcodeExhausted
from piecewise.frontend import parse_expression
from piecewise.preprocess import bind_expr, build_pathcode_layout, partition
from piecewise.symcore import (
    FALSE,
    TRUE,
    BinOp,
    Const,
    ExecState,
    Ite,
    PathCondition,
    PathcodeCursor,
    Slice,
    Sym,
    SymbolPool,
    SymbolicStore,
    SymContext,
    UnOp,
    commit_cycle,
    eval_expr,
    evaluate,
    exec_statement,
    free_symbols,
    initial_store,
    mk_bin,
    mk_concat,
    mk_ite,
    mk_slice,
    mk_un,
    reevaluate_dirty_assigns,
    simplify,
    substitute,
    sync_hierarchy,
)
from support import load


def ctx_for(src, top, mode="ite"):
    d = load(src, top)
    return d, SymContext.from_design(d, mode)


def run_block(ctx, store, block_id, bits, mode="ite"):
    parts = partition(ctx.design)
    layout = build_pathcode_layout(parts, mode)
    blk = parts.block(block_id)
    st = ExecState(store.copy(), PathCondition(), {}, None)
    return exec_statement(blk.body, st, PathcodeCursor(layout.blocks[block_id], bits), ctx, block_id)


def test_fresh_symbols():
    pool = SymbolPool()
    a = pool.fresh_symbol("i_data", 0, 32)
    b = pool.fresh_symbol("i_data", 0, 32)
    assert a.width == 32 and a is not b and a.name != b.name
    g = pool.fresh_symbol("g0", 0, 1)
    assert g.width == 1 and pool.info[g.name].signal == "g0"
    with pytest.raises(ValueError):
        pool.fresh_symbol("z", 0, 0)


def test_hash_consing():
    a = Sym("a", 4)
    assert mk_bin("add", a, Const(1, 4)) is mk_bin("add", a, Const(1, 4))


def test_eval_ternary_becomes_ite():
    d, ctx = ctx_for(S.QUEUE, "queue")
    store = initial_store(ctx, SymbolPool())
    g, alpha = Sym("g", 1), Sym("alpha", 32)
    store.current["queue.read_en"] = g
    store.current["queue.content"] = alpha
    store.prev_regs["queue.content"] = alpha
    e = bind_expr(d, parse_expression("read_en ? content : 0"))
    out = eval_expr(e, store, "prev", ctx)
    assert isinstance(out, Ite) and out.c is g and out.t is alpha and out.f is Const(0, 32)


def test_eval_constant_fold_and_index():
    d, ctx = ctx_for(S.QUEUE, "queue")
    store = initial_store(ctx, SymbolPool())
    assert eval_expr(parse_expression("1'b1 && 1'b0"), store, "current", ctx) is Const(0, 1)
    store.current["queue.in_use"] = Const(1, 2)
    assert eval_expr(bind_expr(d, parse_expression("in_use[0]")), store, "current", ctx) is Const(1, 1)


def test_queue_block_pathcode_10():
    d, ctx = ctx_for(S.QUEUE, "queue")
    pool = SymbolPool()
    store = initial_store(ctx, pool)
    st = run_block(ctx, store, "queue#0", "10")
    we, re, wd = (pool.input_symbol(f"queue.{n}", 0, w) for n, w in (("write_en", 1), ("read_en", 1), ("write_data", 32)))
    assert list(st.pi) == [we, mk_un("not", re)]
    assert st.store.pending_nba == {"queue.content": wd, "queue.in_use": Const(1, 2)}


def test_toy_fragments():
    d, ctx = ctx_for(S.TOY, "toy")
    pool = SymbolPool()
    store = initial_store(ctx, pool)
    g0, a = pool.input_symbol("toy.g0", 0, 1), pool.input_symbol("toy.inpA", 0, 2)
    t = run_block(ctx, store, "toy#0", "1")
    assert t.store.pending_nba == {"toy.x": a} and list(t.pi) == [g0]
    f = run_block(ctx, store, "toy#0", "0")
    assert f.store.pending_nba == {"toy.x": Const(0, 2)} and list(f.pi) == [mk_un("not", g0)]


def test_pathcode_overrun():
    d, ctx = ctx_for(S.CASE_STMT, "casedemo")
    store = initial_store(ctx, SymbolPool())
    with pytest.raises(PathcodeExhausted):
        run_block(ctx, store, "casedemo#0", "110")


def test_reevaluation_order():
    d, ctx = ctx_for(S.QUEUE, "queue")
    store = initial_store(ctx, SymbolPool())
    store.current["queue.in_use"] = Sym("u", 2)
    store.dirty = {"queue.in_use"}
    reevaluate_dirty_assigns(store, ctx)
    assert {"queue.is_empty", "queue.is_full"} <= store.dirty
    env = {"u": 1}
    assert evaluate(store.current["queue.is_empty"], env) == 1
    assert evaluate(store.current["queue.is_full"], env) == 0


def test_reevaluation_noop():
    d, ctx = ctx_for(S.QUEUE, "queue")
    store = initial_store(ctx, SymbolPool())
    before = dict(store.current)
    reevaluate_dirty_assigns(store, ctx)
    assert store.current == before


def test_case2a_chain_reevaluates():
    d, ctx = ctx_for(S.CASE2A, "case2a")
    store = initial_store(ctx, SymbolPool())
    store.current["case2a.some_content"] = Sym("s", 4)
    store.current["case2a.content"] = Sym("c", 4)
    store.dirty = {"case2a.some_content"}
    reevaluate_dirty_assigns(store, ctx)
    assert evaluate(store.current["case2a.read_data"], {"s": 0b1100, "c": 0b1010}) == 0b1000


def test_commit_queue_write():
    d, ctx = ctx_for(S.QUEUE, "queue")
    pool = SymbolPool()
    store = initial_store(ctx, pool)
    st = run_block(ctx, store, "queue#0", "10")
    nxt = commit_cycle(st.store, ctx, pool, 0)
    assert nxt.current["queue.content"] is pool.input_symbol("queue.write_data", 0, 32)
    assert nxt.current["queue.is_empty"] is Const(1, 1)
    assert nxt.current["queue.write_en"] is pool.input_symbol("queue.write_en", 1, 1)
    assert nxt.pending_nba == {} and nxt.dirty == set()


def test_commit_swap():
    src = "module sw(input clk, output reg [1:0] a, output reg [1:0] b); always @(posedge clk) begin a <= b; b <= a; end endmodule"
    d, ctx = ctx_for(src, "sw")
    pool = SymbolPool()
    store = initial_store(ctx, pool)
    alpha, beta = pool.init_symbol("sw.a", 2), pool.init_symbol("sw.b", 2)
    st = run_block(ctx, store, "sw#0", "")
    nxt = commit_cycle(st.store, ctx, pool, 0)
    assert nxt.current["sw.a"] is beta and nxt.current["sw.b"] is alpha


def test_commit_carries_registers():
    d, ctx = ctx_for(S.TOY, "toy")
    pool = SymbolPool()
    store = initial_store(ctx, pool)
    nxt = commit_cycle(store, ctx, pool, 0)
    assert nxt.current["toy.x"] is store.current["toy.x"]


def test_prev_view_isolation():
    d, ctx = ctx_for(S.QUEUE, "queue")
    store = initial_store(ctx, SymbolPool())
    e = bind_expr(d, parse_expression("content"))
    before = eval_expr(e, store, "prev", ctx)
    store.pending_nba["queue.content"] = Sym("junk", 32)
    assert eval_expr(e, store, "prev", ctx) is before


def test_sync_hierarchy():
    d, ctx = ctx_for(S.TWO_QUEUE, "top")
    store = initial_store(ctx, SymbolPool())
    store.current["top.q1.read_data"] = Sym("rd", 32)
    sync_hierarchy(store, ctx, "top.q1")
    assert store.current["top.data"] is Sym("rd", 32) and "top.data" in store.dirty
    before = dict(store.current)
    sync_hierarchy(store, ctx, "top")
    assert store.current == before


def test_simplify_examples():
    a, b, g = Sym("a", 32), Sym("b", 32), Sym("g", 1)
    assert simplify(Ite(TRUE, a, b)) is a
    assert simplify(BinOp("and", a, Const(0, 32))) is Const(0, 32)
    assert simplify(UnOp("not", UnOp("not", g))) is g
    assert simplify(BinOp("xor", a, a)) is Const(0, 32)
    assert simplify(BinOp("or", a, Const(0xFFFFFFFF, 32))) is Const(0xFFFFFFFF, 32)


def test_smart_constructors():
    a = Sym("a", 8)
    assert mk_slice(a, 7, 0) is a
    assert mk_slice(mk_concat([Sym("h", 4), Sym("l", 4)]), 3, 0) is Sym("l", 4)
    assert mk_ite(Sym("c", 1), a, a) is a
    assert mk_bin("ult", a, Const(0, 8)) is FALSE
    assert mk_bin("add", Sym("n", 2), Sym("m", 4)).width == 4
    assert mk_bin("shl", Sym("n", 2), Sym("m", 4)).width == 2
    assert isinstance(mk_slice(a, 0, 0), Slice)


def test_substitute_and_free_symbols():
    e = mk_bin("add", Sym("a", 4), Sym("b", 4))
    assert free_symbols(e) == {"a": 4, "b": 4}
    out = substitute(e, {"a": Const(3, 4), "b": Const(4, 4)})
    assert simplify(out) is Const(7, 4)
