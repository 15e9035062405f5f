"""Seeded generator of small random designs for differential testing.

Designs stay small enough for exhaustive simulation: at most three always
blocks, at most two decision statements per block, signals of at most four
bits and at most three cycles.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

#: total top-level input bits allowed for a given cycle count, so that the
#: brute-force oracle sees at most 2^14 input sequences
INPUT_BITS = {1: 7, 2: 4, 3: 3}


@dataclass
class RandomCase:
    seed: int
    source: str
    assertions: str
    cycles: int
    top: str = "rnd"
    input_bits: int = 0
    meta: dict = field(default_factory=dict)


class _Gen:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.sigs: dict[str, int] = {}  # readable signals and their widths

    def lit(self, w: int) -> str:
        return f"{w}'d{self.rng.randrange(1 << w)}"

    def operand(self, pool: list[str]) -> tuple[str, int]:
        if self.rng.random() < 0.2:
            w = self.rng.randint(1, 4)
            return self.lit(w), w
        name = self.rng.choice(pool)
        return name, self.sigs[name]

    def cond(self, pool: list[str], depth: int = 0) -> str:
        r = self.rng.random()
        a, wa = self.operand(pool)
        if depth == 0 and r < 0.15:
            return f"({self.cond(pool, 1)} && {self.cond(pool, 1)})"
        if depth == 0 and r < 0.25:
            return f"!({self.cond(pool, 1)})"
        if wa > 1 and r < 0.4 and not a[0].isdigit():
            return f"{a}[{self.rng.randrange(wa)}]"
        if r < 0.55:
            return f"({a} == {self.lit(wa)})"
        b, _ = self.operand(pool)
        op = self.rng.choice(["==", "!=", "<", ">="])
        return f"({a} {op} {b})"

    def value(self, pool: list[str], depth: int = 0) -> str:
        r = self.rng.random()
        if depth >= 2 or r < 0.35:
            return self.operand(pool)[0]
        if r < 0.45:
            return f"~{self.value(pool, depth + 1)}"
        if r < 0.55:
            return f"({self.cond(pool, 1)} ? {self.value(pool, depth + 1)} : {self.value(pool, depth + 1)})"
        if r < 0.62:
            return f"{{{self.value(pool, depth + 1)}, {self.value(pool, depth + 1)}}}"
        op = self.rng.choice(["+", "-", "&", "|", "^"])
        return f"({self.value(pool, depth + 1)} {op} {self.value(pool, depth + 1)})"


def random_design(seed: int) -> RandomCase:
    g = _Gen(seed)
    rng = g.rng
    cycles = rng.choice([1, 1, 2, 2, 3])
    budget = INPUT_BITS[cycles]
    ports = ["input clk"]
    inputs = []
    used = 0
    for k in range(rng.randint(1, 3)):
        if used >= budget:
            break
        w = rng.randint(1, min(4, budget - used))
        used += w
        name = f"i{k}"
        inputs.append(name)
        g.sigs[name] = w
        ports.append(f"input [{w - 1}:0] {name}" if w > 1 else f"input {name}")

    decls = []
    n_blocks = rng.randint(1, 3)
    owned: list[list[str]] = []
    for b in range(n_blocks):
        regs = []
        for j in range(rng.randint(1, 2)):
            w = rng.randint(1, 4)
            name = f"r{b}_{j}"
            g.sigs[name] = w
            regs.append(name)
            rng_part = f"[{w - 1}:0] " if w > 1 else ""
            init = f" = {g.lit(w)}" if rng.random() < 0.8 else ""
            decls.append(f"    reg {rng_part}{name}{init};")
        owned.append(regs)
    all_regs = [r for rs in owned for r in rs]

    pool = inputs + all_regs
    for k in range(rng.randint(0, 2)):
        w = rng.randint(1, 4)
        name = f"w{k}"
        rhs = g.value(pool)
        g.sigs[name] = w
        decls.append(f"    wire {f'[{w - 1}:0] ' if w > 1 else ''}{name};")
        decls.append(f"    assign {name} = {rhs};")
        pool = pool + [name]

    blocks = []
    decisions = []
    for b, regs in enumerate(owned):
        n_dec = rng.randint(0, 2)
        decisions.append(n_dec)
        stmts = []

        def assign() -> str:
            return f"{rng.choice(regs)} <= {g.value(pool)};"

        if rng.random() < 0.5 or n_dec == 0:
            stmts.append(assign())
        for _ in range(n_dec):
            kind = rng.random()
            if kind < 0.35:
                stmts.append(f"if ({g.cond(pool)}) {assign()}")
            elif kind < 0.75:
                stmts.append(f"if ({g.cond(pool)}) {assign()} else {assign()}")
            else:
                sel, sw = g.operand([p for p in pool if g.sigs[p] > 1] or pool)
                labels = rng.sample(range(1 << sw), min(2, 1 << sw))
                arms = [f"{sw}'d{v}: {assign()}" for v in labels]
                if rng.random() < 0.6:
                    arms.append(f"default: {assign()}")
                stmts.append(f"case ({sel}) " + " ".join(arms) + " endcase")
        body = "\n".join(f"        {s}" for s in stmts)
        blocks.append(f"    always @(posedge clk) begin\n{body}\n    end")

    asserts = []
    for k in range(rng.randint(1, 2)):
        r = rng.choice(all_regs)
        w = g.sigs[r]
        form = rng.random()
        if form < 0.5:
            asserts.append(f"a{k}: assert property (@(posedge clk) {r} != {g.lit(w)});")
        elif form < 0.8:
            r2 = rng.choice(all_regs)
            asserts.append(
                f"a{k}: assert property (@(posedge clk) !({r} == {g.lit(w)} && {r2} == {g.lit(g.sigs[r2])}));"
            )
        else:
            asserts.append(f"a{k}: assert property (@(posedge clk) {g.cond(inputs or all_regs, 1)} |-> ({r} != {g.lit(w)}));")

    src = "module rnd (\n    " + ",\n    ".join(ports) + "\n);\n" + "\n".join(decls + blocks) + "\nendmodule\n"
    return RandomCase(seed, src, "\n".join(asserts) + "\n", cycles, input_bits=used, meta={"decisions": decisions})


def corpus(n: int, start: int = 0) -> list[RandomCase]:
    return [random_design(s) for s in range(start, start + n)]
