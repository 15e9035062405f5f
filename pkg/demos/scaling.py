"""Path counts as the number of independent blocks grows."""

# %% Sweep N blocks with two branches each.
from piecewise.bench import format_table, sweep
from piecewise.smt import make_solver

rows = sweep(range(1, 6), [2], lambda: make_solver("fallback"))
print(format_table(rows))

# %% Baseline paths grow as 4^N while piecewise fragments grow as 4N.
for r in rows:
    print(r.n_blocks, r.baseline["paths_completed"], r.piecewise["fragments"],
          f"{r.decrease('branch_points_explored'):.1f}% fewer branch-point visits")
