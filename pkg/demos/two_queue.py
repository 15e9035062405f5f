"""The two-queue pipeline: find a violation, then replay it concretely."""

# %% Elaborate the design; q1 and q2 are instances of the same queue.
from piecewise import samples as S
from piecewise.explorer import ExploreOptions, Explorer
from piecewise.frontend import elaborate, parse_assertions, parse_design
from piecewise.oracle import replay
from piecewise.smt import make_solver

design = elaborate(parse_design(S.TWO_QUEUE), "top")
specs = parse_assertions(S.ASSERT_TWO_QUEUE)
solver = make_solver()  # z3 when available
print(sorted(design.instances))

# %% Explore two cycles.  Repeat-merge explores q1's block once and reuses it for q2.
opts = ExploreOptions(max_cycles=2)
report = Explorer(design, specs, opts, solver).run()
print("statements per instance:", report.stats["statements_by_instance"])
cx = report.violations[0]
print("violated", cx.assertion, "at cycle", cx.cycle)
for row in cx.input_table():
    print("  inputs", row)
print("  pathcodes", cx.pathcodes)

# %% Replay the counterexample in the cycle simulator.
res = replay(design, cx, specs)
print("violated in simulation:", res.violated, "pathcodes match:", res.pathcode_match)
for k, state in enumerate(res.trace.states):
    print(k, {s: state[s] for s in ("top.q1.in_use", "top.q2.in_use", "top.o_data")})

# %% Turning the merge off visits q2's statements and reaches the same verdict.
plain = Explorer(design, specs, ExploreOptions(max_cycles=2, repeat_merge=False), solver).run()
print("merge off:", plain.stats["statements_by_instance"], [(v.assertion, v.cycle) for v in plain.violations])
solver.close()
