"""Command-line driver: ``piecewise {check,graph,run,replay,bench}``.

Exit codes: 0 clean, 1 violations found (run) or replay mismatch (replay),
2 illegal input, 3 solver or I/O trouble, 4 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import bench as bench_mod
from .errors import (
    BudgetExceeded,
    EnvironmentError_,
    LegalityError,
    MalformedCounterExample,
    UnknownTop,
)
from .explorer import Explorer, ExploreOptions, Report
from .frontend import AssertionSpec, ElaboratedDesign, elaborate, parse_assertions, parse_design
from .frontend import ast as A
from .oracle import Simulator, replay
from .preprocess import (
    build_pathcode_layout,
    check_blocking_in_sequential,
    check_write_write,
    comb_dependency_graph,
    comb_dependency_order,
    module_dependency_graph,
    partition,
    to_dot,
)
from .smt import make_solver

log = logging.getLogger("piecewise")

EXIT_OK, EXIT_VIOLATION, EXIT_LEGALITY, EXIT_ENV, EXIT_BUDGET = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    sources: list[str]
    top: Optional[str] = None
    assertions: Optional[str] = None
    max_cycles: int = 1
    mode: str = "piecewise"
    coi: bool = True
    repeat_merge: bool = True
    ternary_mode: str = "ite"
    allow_races: bool = False
    uninit: str = "symbolic"
    solver: Optional[str] = None
    solver_timeout_ms: int = 5000
    out: Optional[str] = None
    trace_out: Optional[str] = None
    dataflow_graph: Optional[str] = None
    budget_s: Optional[float] = None
    max_states: Optional[int] = None
    replay: bool = False
    all_violations: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.max_cycles < 1:
            raise ValueError("--cycles must be at least 1")
        if self.mode not in ("piecewise", "baseline"):
            raise ValueError("--mode must be piecewise or baseline")

    def options(self) -> ExploreOptions:
        return ExploreOptions(
            mode=self.mode,
            max_cycles=self.max_cycles,
            coi=self.coi,
            repeat_merge=self.repeat_merge,
            ternary_mode=self.ternary_mode,
            allow_races=self.allow_races,
            uninit=self.uninit,
            all_violations=self.all_violations,
            budget_s=self.budget_s,
            max_states=self.max_states,
        )


# -- loading -----------------------------------------------------------------


def load_ast(sources: Sequence[str]) -> A.DesignAst:
    modules: list[A.ModuleDecl] = []
    for path in sources:
        modules.extend(parse_design(Path(path).read_text()).modules)
    return A.DesignAst(tuple(modules))


def infer_top(ast: A.DesignAst) -> str:
    used = {i.module for m in ast.modules for i in m.instances}
    roots = [m.name for m in ast.modules if m.name not in used]
    if len(roots) != 1:
        raise UnknownTop(f"cannot infer the top module (candidates: {', '.join(roots) or 'none'}); pass --top")
    return roots[0]


def load_design(cfg: RunConfig) -> ElaboratedDesign:
    ast = load_ast(cfg.sources)
    return elaborate(ast, cfg.top or infer_top(ast))


def load_assertions(cfg: RunConfig) -> list[AssertionSpec]:
    if not cfg.assertions:
        return []
    return parse_assertions(Path(cfg.assertions).read_text())


def _label(design: ElaboratedDesign, block_id: str) -> str:
    inst, idx = block_id.rsplit("#", 1)
    name = inst[len(design.top) + 1 :] if inst.startswith(design.top + ".") else inst
    if len(design.instances[inst].blocks) > 1:
        name += f"#{idx}"
    return name


def combined_dot(design: ElaboratedDesign) -> str:
    """Both dependency graphs as clusters of one digraph."""
    parts = partition(design)
    out = ["digraph dataflow {"]
    for tag, graph in (("modules", module_dependency_graph(design, check_comb=False)), ("comb", comb_dependency_graph(parts))):
        body = to_dot(graph, tag).splitlines()[1:-1]
        out.append(f'  subgraph "cluster_{tag}" {{')
        out.append(f'    label="{tag}";')
        for line in body:
            # node ids get a cluster prefix so that the two graphs stay disjoint
            out.append("  " + _prefix_ids(line, tag))
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"


def _prefix_ids(line: str, tag: str) -> str:
    pieces = line.split('"')
    for k in range(1, len(pieces), 2):
        pieces[k] = f"{tag}:{pieces[k]}"
    return '"'.join(pieces)


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise EnvironmentError_(f"cannot write {path}: {exc}") from None


# -- subcommands -------------------------------------------------------------


def cmd_check(cfg: RunConfig) -> int:
    design = load_design(cfg)
    parts = partition(design)
    check_blocking_in_sequential(parts)
    races = check_write_write(parts, cfg.allow_races)
    for race in races.races:
        print(f"warning: race on {race.signal} between {', '.join(race.blocks)}; {race.winner} wins", file=sys.stderr)
    comb_dependency_order(parts)
    module_dependency_graph(design)
    if cfg.assertions:
        from .preprocess import bind_assertions

        bind_assertions(design, load_assertions(cfg))
    layout = build_pathcode_layout(parts, cfg.ternary_mode)
    modules = {info.module for info in design.instances.values()}
    bits = " ".join(f"{_label(design, b.block_id)}:{layout.blocks[b.block_id].total_bits}" for b in design.blocks)
    print(f"{len(modules)} modules, {len(design.blocks)} always blocks, pathcode bits: {bits}".rstrip())
    return EXIT_OK


def cmd_graph(cfg: RunConfig) -> int:
    design = load_design(cfg)
    parts = partition(design)
    prefix = cfg.out or design.top
    comb = comb_dependency_graph(parts)
    _write(f"{prefix}.modules.dot", to_dot(module_dependency_graph(design, check_comb=False), "modules"))
    _write(f"{prefix}.comb.dot", to_dot(comb, "comb"))
    if comb.cycle:
        print("combinational loop: " + " -> ".join(comb.cycle + comb.cycle[:1]), file=sys.stderr)
    print(f"wrote {prefix}.modules.dot {prefix}.comb.dot")
    return EXIT_OK


def _replay_all(design, report: Report, assertions, cfg: RunConfig) -> list[str]:
    problems = []
    for cx in report.violations:
        res = replay(design, cx, assertions, cfg.ternary_mode, cfg.allow_races)
        why = []
        if not res.violated:
            why.append("replay does not violate")
        if not res.pathcode_match:
            why.append(f"pathcode mismatch {res.mismatches}")
        if why:
            problems.append(f"{cx.assertion}@{cx.cycle}: " + "; ".join(why))
    return problems


def cmd_run(cfg: RunConfig) -> int:
    ast = load_ast(cfg.sources)
    top = cfg.top or infer_top(ast)
    design = elaborate(ast, top)
    if cfg.dataflow_graph:
        # written before the legality checks so that a loop is still visible
        _write(cfg.dataflow_graph, combined_dot(design))
    assertions = load_assertions(cfg)
    solver = make_solver(cfg.solver, cfg.solver_timeout_ms)
    try:
        report = Explorer(design, assertions, cfg.options(), solver).run()
    finally:
        solver.close()
    if cfg.out:
        _write(cfg.out, report.dumps())
    else:
        print(report.dumps())
    if cfg.trace_out:
        sim = Simulator(design, cfg.ternary_mode, cfg.allow_races)
        if report.violations:
            cx = report.violations[0]
            init = {k: int(v, 16) for k, v in cx.initial_registers.items()}
            trace = sim.simulate(cx.input_table(), cx.cycle, init)
        else:
            trace = sim.simulate([], cfg.max_cycles)
        try:
            trace.write(cfg.trace_out)
        except OSError as exc:
            raise EnvironmentError_(f"cannot write {cfg.trace_out}: {exc}") from None
    for cx in report.violations:
        print(f"violation: {cx.assertion} at cycle {cx.cycle}", file=sys.stderr)
    if cfg.replay:
        problems = _replay_all(design, report, assertions, cfg)
        for p in problems:
            print(f"replay: {p}", file=sys.stderr)
        if problems:
            return EXIT_VIOLATION
    if not report.complete:
        print(f"budget exhausted: {report.stats.get('stopped', '')}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_VIOLATION if report.violations else EXIT_OK


def cmd_replay(cfg: RunConfig, report_path: str) -> int:
    design = load_design(cfg)
    assertions = load_assertions(cfg)
    try:
        data = json.loads(Path(report_path).read_text())
    except OSError as exc:
        raise EnvironmentError_(f"cannot read {report_path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise MalformedCounterExample(f"{report_path}: {exc}") from None
    report = Report.from_json(data)
    problems = _replay_all(design, report, assertions, cfg)
    for p in problems:
        print(p, file=sys.stderr)
    print(f"{len(report.violations) - len(problems)}/{len(report.violations)} counterexamples replayed")
    return EXIT_VIOLATION if problems else EXIT_OK


def _int_range(text: str) -> list[int]:
    if "-" in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def cmd_bench(cfg: RunConfig, ns: list[int], bs: list[int]) -> int:
    rows = bench_mod.sweep(ns, bs, lambda: make_solver(cfg.solver, cfg.solver_timeout_ms))
    print(bench_mod.format_table(rows))
    if cfg.out:
        _write(cfg.out, bench_mod.to_json(rows))
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def _common(p: argparse.ArgumentParser, sources: bool = True) -> None:
    if sources:
        p.add_argument("sources", nargs="+", help="Verilog source files")
        p.add_argument("--top", help="top module (inferred when unique)")
        p.add_argument("--assertions", help="file of SVA-subset assertions")
    p.add_argument("--ternary-mode", choices=("ite", "branch"), default="ite")
    p.add_argument("--allow-races", action="store_true")
    p.add_argument("--solver", help="solver binary, or 'fallback' for the built-in enumerator")
    p.add_argument("--solver-timeout-ms", type=int, default=5000)
    p.add_argument("--out", help="output path (report JSON, bench JSON, or DOT prefix)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="piecewise", description="Piecewise symbolic exploration of RTL designs")
    sub = ap.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("check", help="parse, elaborate and run the legality checks"))
    _common(sub.add_parser("graph", help="write module and combinational dependency graphs"))
    run = sub.add_parser("run", help="explore the design and check assertions")
    _common(run)
    run.add_argument("--cycles", type=int, default=1)
    run.add_argument("--mode", choices=("piecewise", "baseline"), default="piecewise")
    run.add_argument("--no-coi", action="store_true")
    run.add_argument("--no-repeat-merge", action="store_true")
    run.add_argument("--uninit", choices=("symbolic", "zero"), default="symbolic")
    run.add_argument("--budget-s", type=float)
    run.add_argument("--max-states", type=int)
    run.add_argument("--all", action="store_true", help="report every violation, not only the first per assertion")
    run.add_argument("--replay", action="store_true", help="replay counterexamples in the concrete simulator")
    run.add_argument("-G", "--dataflow-graph", metavar="DOT", help="write both dependency graphs to one DOT file")
    run.add_argument("--trace-out", help="JSON-lines trace of the first counterexample")
    rep = sub.add_parser("replay", help="replay the counterexamples of a report")
    rep.add_argument("report")
    _common(rep)
    b = sub.add_parser("bench", help="compare the two modes on a synthetic design family")
    _common(b, sources=False)
    b.add_argument("--blocks", default="1-5", help="N values, e.g. 1-5 or 2,4")
    b.add_argument("--branches", default="2", help="b values, e.g. 1-2")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        sources=list(getattr(ns, "sources", []) or []),
        top=getattr(ns, "top", None),
        assertions=getattr(ns, "assertions", None),
        max_cycles=getattr(ns, "cycles", 1),
        mode=getattr(ns, "mode", "piecewise"),
        coi=not getattr(ns, "no_coi", False),
        repeat_merge=not getattr(ns, "no_repeat_merge", False),
        ternary_mode=ns.ternary_mode,
        allow_races=ns.allow_races,
        uninit=getattr(ns, "uninit", "symbolic"),
        solver=ns.solver,
        solver_timeout_ms=ns.solver_timeout_ms,
        out=ns.out,
        trace_out=getattr(ns, "trace_out", None),
        dataflow_graph=getattr(ns, "dataflow_graph", None),
        budget_s=getattr(ns, "budget_s", None),
        max_states=getattr(ns, "max_states", None),
        replay=getattr(ns, "replay", False),
        all_violations=getattr(ns, "all", False),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LEGALITY
    try:
        if ns.command == "check":
            return cmd_check(cfg)
        if ns.command == "graph":
            return cmd_graph(cfg)
        if ns.command == "run":
            return cmd_run(cfg)
        if ns.command == "replay":
            return cmd_replay(cfg, ns.report)
        return cmd_bench(cfg, _int_range(ns.blocks), _int_range(ns.branches))
    except (LegalityError, MalformedCounterExample) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LEGALITY
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (EnvironmentError_, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV


if __name__ == "__main__":
    sys.exit(main())
