from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import pytest

from piecewise.cli import main

ROOT = Path(__file__).resolve().parent.parent
D = ROOT / "designs"
SCHEMA = json.loads((ROOT / "docs" / "report.schema.json").read_text())


def design(name):
    return str(D / name)


def run_report(tmp_path, *args):
    out = tmp_path / "report.json"
    code = main(["run", *args, "--out", str(out)])
    data = json.loads(out.read_text())
    jsonschema.validate(data, SCHEMA)
    return code, data, out


def test_check_two_queue(capsys):
    assert main(["check", design("two_queue.v"), "--top", "top"]) == 0
    assert "2 modules, 2 always blocks, pathcode bits: q1:2 q2:2" in capsys.readouterr().out


@pytest.mark.parametrize("name", ["case3_loop.v", "latch.v", "write_write.v", "blocking.v"])
def test_check_legality(name, capsys):
    assert main(["check", design(name)]) == 2
    assert "error" in capsys.readouterr().err


def test_check_loop_prints_cycle(capsys):
    main(["check", design("case3_loop.v")])
    assert "read_data" in capsys.readouterr().err


def test_check_write_write_names_signal(capsys):
    main(["check", design("write_write.v")])
    assert "ww.x" in capsys.readouterr().err


def test_run_toy_violation(tmp_path):
    code, data, _ = run_report(tmp_path, design("toy.v"), "--assertions", design("toy.sva"), "--solver", "fallback")
    assert code == 1 and len(data["violations"]) == 1 and data["complete"]


def test_run_tautology(tmp_path):
    sva = tmp_path / "t.sva"
    sva.write_text("assert property (@(posedge clk) 1'b1);\n")
    code, data, _ = run_report(tmp_path, design("toy.v"), "--assertions", str(sva), "--solver", "fallback")
    assert code == 0 and data["violations"] == []


def test_run_to_stdout(capsys):
    code = main(["run", design("toy.v"), "--assertions", design("toy.sva"), "--solver", "fallback"])
    assert code == 1
    assert json.loads(capsys.readouterr().out)["violations"]


def test_run_replay_and_trace(tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, _, _ = run_report(
        tmp_path, design("two_queue.v"), "--top", "top", "--assertions", design("two_queue.sva"),
        "--replay", "--trace-out", str(trace),
    )
    assert code == 1
    rows = [json.loads(x) for x in trace.read_text().splitlines()]
    assert rows and set(rows[0]) == {"cycle", "signal", "value_hex"}


def test_missing_solver_wide_symbols(tmp_path, capsys):
    # the 32-bit data word reaches o_data after three edges; enumeration cannot cover it
    sva = tmp_path / "w.sva"
    sva.write_text("assert property (@(posedge clk) o_data != 32'd7);\n")
    code = main(["run", design("two_queue.v"), "--top", "top", "--assertions", str(sva),
                 "--solver", "fallback", "--cycles", "3", "--out", str(tmp_path / "r.json")])
    assert code == 3
    assert "no external solver" in capsys.readouterr().err


def test_missing_solver_binary(tmp_path):
    code = main(["run", design("toy.v"), "--assertions", design("toy.sva"), "--solver", "/nonexistent/z3"])
    assert code == 3


def test_budget_exit(tmp_path):
    code, data, _ = run_report(tmp_path, design("toy.v"), "--solver", "fallback", "--cycles", "4", "--max-states", "3", "--no-coi")
    assert code == 4 and not data["complete"]


def test_run_legality_with_graph(tmp_path):
    dot = tmp_path / "g.dot"
    assert main(["run", design("case3_loop.v"), "-G", str(dot), "--solver", "fallback"]) == 2
    text = dot.read_text()
    assert "color=red" in text and "read_data" in text


def test_graph_chain(tmp_path):
    prefix = tmp_path / "chain"
    assert main(["graph", design("chain.v"), "--out", str(prefix)]) == 0
    module_dot = Path(str(prefix) + ".modules.dot")
    assert module_dot.exists() and "dashed" in module_dot.read_text()


def test_graph_loop_exit_zero(tmp_path):
    assert main(["graph", design("case3_loop.v"), "--out", str(tmp_path / "loop")]) == 0


def test_graph_io_error():
    assert main(["graph", design("chain.v"), "--out", "/nonexistent/dir/x"]) == 3


def test_replay_engine_report(tmp_path, capsys):
    _, _, out = run_report(tmp_path, design("toy.v"), "--assertions", design("toy.sva"), "--solver", "fallback")
    capsys.readouterr()
    assert main(["replay", str(out), design("toy.v"), "--assertions", design("toy.sva")]) == 0
    assert "1/1 counterexamples replayed" in capsys.readouterr().out


def test_replay_forged(tmp_path):
    _, data, out = run_report(tmp_path, design("toy.v"), "--assertions", design("toy.sva"), "--solver", "fallback")
    v = data["violations"][0]
    v["pathcodes"] = [{k: "0" if c == "1" else "1" for k, c in pc.items()} for pc in v["pathcodes"]]
    out.write_text(json.dumps(data))
    assert main(["replay", str(out), design("toy.v"), "--assertions", design("toy.sva")]) == 1


def test_replay_empty_report(tmp_path):
    out = tmp_path / "empty.json"
    out.write_text(json.dumps({"config": {}, "stats": {}, "violations": [], "complete": True}))
    assert main(["replay", str(out), design("toy.v"), "--assertions", design("toy.sva")]) == 0


def test_replay_malformed(tmp_path):
    out = tmp_path / "bad.json"
    out.write_text(json.dumps({"violations": [{"assertion": "a"}]}))
    assert main(["replay", str(out), design("toy.v"), "--assertions", design("toy.sva")]) == 2


def test_bench_output(tmp_path, capsys):
    out = tmp_path / "bench.json"
    assert main(["bench", "--blocks", "1-2", "--branches", "2", "--solver", "fallback", "--out", str(out)]) == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 2
    assert capsys.readouterr().out.strip()


def test_top_inference():
    # two_queue.v holds both top and queue; queue is instantiated so top is inferred
    assert main(["check", design("two_queue.v")]) == 0
