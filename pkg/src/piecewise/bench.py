"""Piecewise versus baseline on the synthetic N-blocks x b-branches family."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Optional

from .explorer import run
from .frontend import elaborate, parse_design
from .samples import synthetic
from .smt import Solver, make_solver

METRICS = (
    "statements_explored",
    "branch_points_explored",
    "fragments",
    "composed_paths",
    "paths_completed",
    "smt_queries",
    "solver_ms",
    "wall_ms",
)
# metrics that get a percent-decrease column
COMPARED = ("statements_explored", "branch_points_explored", "smt_queries", "solver_ms", "wall_ms")


@dataclass
class BenchRow:
    n_blocks: int
    branches: int
    baseline: dict[str, float]
    piecewise: dict[str, float]

    def decrease(self, metric: str) -> Optional[float]:
        base = self.baseline[metric]
        if not base:
            return None
        return 100.0 * (base - self.piecewise[metric]) / base

    def to_json(self) -> dict:
        out = asdict(self)
        out["percent_decrease"] = {m: self.decrease(m) for m in COMPARED}
        return out


def _metrics(stats: dict) -> dict[str, float]:
    return {
        "statements_explored": stats["statements_explored"],
        "branch_points_explored": stats["branch_points_explored"],
        "fragments": stats["fragments"],
        "composed_paths": stats["composed_paths"],
        "paths_completed": stats["paths_completed"],
        "smt_queries": stats["smt"]["queries"],
        "solver_ms": stats["smt"]["solver_ms"],
        "wall_ms": stats["wall_ms"],
    }


def bench_point(
    n_blocks: int,
    branches: int,
    solver_factory: Callable[[], Solver] = make_solver,
    data_width: int = 2,
) -> BenchRow:
    design = elaborate(parse_design(synthetic(n_blocks, branches, data_width)), "synth")
    results = {}
    for mode in ("baseline", "piecewise"):
        solver = solver_factory()
        try:
            # no assertions: the cone of influence would prune every block
            report = run(design, [], 1, mode=mode, solver=solver, coi=False)
        finally:
            solver.close()
        results[mode] = _metrics(report.stats)
    return BenchRow(n_blocks, branches, results["baseline"], results["piecewise"])


def sweep(
    ns: Iterable[int],
    bs: Iterable[int],
    solver_factory: Callable[[], Solver] = make_solver,
) -> list[BenchRow]:
    bs = list(bs)
    return [bench_point(n, b, solver_factory) for n in ns for b in bs]


def format_table(rows: list[BenchRow]) -> str:
    head = ["N", "b"]
    for m in ("branch_points_explored", "statements_explored", "smt_queries", "solver_ms"):
        short = {"branch_points_explored": "bp", "statements_explored": "stmts", "smt_queries": "queries", "solver_ms": "solver_ms"}[m]
        head += [f"base_{short}", f"pw_{short}", f"{short}_dec%"]
    head += ["base_paths", "pw_fragments", "pw_composed"]
    lines = ["  ".join(f"{h:>12}" for h in head)]
    for r in rows:
        cells: list[str] = [str(r.n_blocks), str(r.branches)]
        for m in ("branch_points_explored", "statements_explored", "smt_queries", "solver_ms"):
            fmt = "{:.1f}" if m == "solver_ms" else "{:.0f}"
            dec = r.decrease(m)
            cells += [fmt.format(r.baseline[m]), fmt.format(r.piecewise[m]), "-" if dec is None else f"{dec:.1f}"]
        cells += [f"{r.baseline['paths_completed']:.0f}", f"{r.piecewise['fragments']:.0f}", f"{r.piecewise['composed_paths']:.0f}"]
        lines.append("  ".join(f"{c:>12}" for c in cells))
    return "\n".join(lines)


def to_json(rows: list[BenchRow]) -> str:
    return json.dumps([r.to_json() for r in rows], indent=2)
