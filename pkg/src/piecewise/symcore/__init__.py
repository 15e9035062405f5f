"""Symbolic bit-vector semantics for the supported Verilog subset."""

from .evaluate import dag_size, evaluate, evaluate_vec, free_symbols, substitute, transform
from .execute import (
    Arm,
    ExecState,
    Fork,
    NeedDecision,
    PathcodeCursor,
    SymContext,
    apply_arm,
    case_conditions,
    commit_cycle,
    eval_comb_assign,
    eval_expr,
    exec_assign,
    exec_statement,
    initial_store,
    push_stmts,
    reevaluate_dirty_assigns,
    run_until_fork,
    splice,
    sync_hierarchy,
)
from .expr import (
    FALSE,
    TRUE,
    BinOp,
    Concat,
    Const,
    Extend,
    Ite,
    SExpr,
    Slice,
    Sym,
    UnOp,
    mk_and1,
    mk_bin,
    mk_concat,
    mk_eq,
    mk_ite,
    mk_not1,
    mk_or1,
    mk_slice,
    mk_un,
    resize,
    simplify,
    to_bool,
    zext,
)
from .printing import sexpr_str
from .state import PathCondition, SymbolicStore, SymbolInfo, SymbolPool

__all__ = [name for name in dir() if not name.startswith("_")]
