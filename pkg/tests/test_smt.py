from __future__ import annotations

import pytest

from piecewise.errors import SolverUnavailable
from piecewise.smt import (
    BOTH_FEASIBLE,
    IMPLIES_TRUE,
    EnumerationSolver,
    Sat,
    Solver,
    Unsat,
    literal,
    lower,
    lower_query,
    make_solver,
    parse_model,
)
from piecewise.smt.sexp import bv_value, parse_all
from piecewise.symcore import Const, Ite, Sym, evaluate, mk_and1, mk_bin, mk_eq, mk_not1, mk_slice
from support import HAS_Z3

g0, g1 = Sym("g0", 1), Sym("g1", 1)
needs_z3 = pytest.mark.skipif(not HAS_Z3, reason="z3 binary not on PATH")


def backends():
    out = [Solver(EnumerationSolver())]
    if HAS_Z3:
        out.append(make_solver("z3"))
    return out


def test_literals():
    assert lower(Const(5, 32)) == "#x00000005"
    assert literal(5, 3) == "#b101"
    assert lower(mk_slice(Sym("a", 8), 0, 0)) == "((_ extract 0 0) |a|)"


def test_ite_lowering():
    text = lower(Ite(g0, Sym("a", 32), Const(0, 32)))
    assert text.startswith("(ite (= |g0| #b1)")


def test_query_declarations_unique():
    a = Sym("a", 4)
    q = lower_query([mk_eq(a, Const(1, 4)), mk_not1(mk_eq(mk_bin("add", a, a), Const(3, 4)))])
    assert q.declarations == {"a": 4}
    assert len(q.assertions) == 2


def test_model_parsing():
    text = "(model (define-fun |x@0| () (_ BitVec 4) #b1010) (define-fun y () (_ BitVec 8) #x1f))"
    assert parse_model(text) == {"x@0": 10, "y": 31}
    assert bv_value(parse_all("(_ bv7 3)")[0]) == (7, 3)


@pytest.mark.parametrize("sol", backends(), ids=lambda s: s.name)
def test_check_sat_examples(sol):
    assert isinstance(sol.check_sat([g0, mk_not1(g0)]), Unsat)
    v = sol.check_sat([mk_not1(g0), g1])
    assert isinstance(v, Sat) and v.model == {"g0": 0, "g1": 1}
    assert isinstance(sol.check_sat([mk_eq(g0, g1), mk_not1(g0), g1]), Unsat)
    sol.close()


@pytest.mark.parametrize("sol", backends(), ids=lambda s: s.name)
def test_check_implied_examples(sol):
    assert sol.check_implied([g0], g0) == IMPLIES_TRUE
    assert sol.check_implied([], g0) == BOTH_FEASIBLE
    assert sol.check_implied([mk_bin("and", g0, g1)], g1) == IMPLIES_TRUE
    sol.close()


def test_trivial_queries_skip_backend():
    sol = Solver(EnumerationSolver())
    assert isinstance(sol.check_sat([]), Sat)
    assert sol.check_implied([], Const(1, 1)) == IMPLIES_TRUE
    assert sol.stats.queries == 0


def test_enumeration_limit():
    wide = Sym("w", 32)
    sol = Solver(EnumerationSolver())
    with pytest.raises(SolverUnavailable):
        sol.check_sat([mk_eq(wide, Const(7, 32))])


def test_enumeration_limit_is_per_component():
    # two independent 16-bit constraints: 32 bits in total but 16 per group
    a, b = Sym("a", 16), Sym("b", 16)
    sol = Solver(EnumerationSolver())
    v = sol.check_sat([mk_eq(a, Const(3, 16)), mk_eq(b, Const(9, 16))])
    assert isinstance(v, Sat) and v.model == {"a": 3, "b": 9}


def test_stats_by_phase():
    sol = Solver(EnumerationSolver())
    sol.check_sat([g0], "composition")
    sol.check_sat([g1], "assertion")
    stats = sol.stats.as_dict()
    assert stats["queries"] == 2 and stats["by_phase"] == {"composition": 1, "assertion": 1}


@needs_z3
def test_external_model_is_valid():
    a, b = Sym("a", 8), Sym("b", 8)
    conj = [mk_eq(mk_bin("add", a, b), Const(200, 8)), mk_bin("ult", a, b)]
    sol = make_solver("z3")
    v = sol.check_sat(conj)
    sol.close()
    assert isinstance(v, Sat)
    assert all(evaluate(c, v.model) == 1 for c in conj)


@needs_z3
def test_external_timeout_unknown():
    sol = make_solver("z3", timeout_ms=1)
    # a hard multiplication query; a 1 ms budget should not be enough
    x, y = Sym("x", 64), Sym("y", 64)
    q = [mk_eq(mk_bin("mul", x, y), Const(0xDEADBEEFCAFEBABF, 64)), mk_bin("ult", Const(1, 64), x), mk_bin("ult", Const(1, 64), y)]
    v = sol.check_sat(q)
    # either the solver was fast enough or it reported Unknown; never an exception
    assert type(v).__name__ in ("Sat", "Unsat", "Unknown")
    assert isinstance(sol.check_sat([g0]), Sat)
    sol.close()


def test_missing_solver_binary():
    with pytest.raises(SolverUnavailable):
        make_solver("/nonexistent/solver")
