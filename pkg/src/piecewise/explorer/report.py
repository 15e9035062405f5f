from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from ..errors import MalformedCounterExample


@dataclass
class CounterExample:
    assertion: str
    cycle: int
    inputs: list[dict[str, Any]]  # {"cycle", "signal", "value_hex"}
    pathcodes: list[dict[str, str]]  # one {block_id: bits} per explored cycle
    initial_registers: dict[str, str] = field(default_factory=dict)
    unconfirmed: bool = False

    def input_table(self) -> list[dict[str, int]]:
        """Per-cycle ``{signal: value}`` maps for cycles 0..``cycle``."""
        table: list[dict[str, int]] = [{} for _ in range(self.cycle + 1)]
        for item in self.inputs:
            c = int(item["cycle"])
            if not 0 <= c <= self.cycle:
                raise MalformedCounterExample(f"input for cycle {c} outside 0..{self.cycle}")
            try:
                table[c][item["signal"]] = int(item["value_hex"], 16)
            except ValueError:
                raise MalformedCounterExample(f"bad hex value {item['value_hex']!r}") from None
        return table

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "assertion": self.assertion,
            "cycle": self.cycle,
            "inputs": self.inputs,
            "pathcodes": self.pathcodes,
        }
        if self.initial_registers:
            out["initial_registers"] = self.initial_registers
        if self.unconfirmed:
            out["unconfirmed"] = True
        return out

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "CounterExample":
        try:
            cex = cls(
                str(data["assertion"]),
                int(data["cycle"]),
                [
                    {"cycle": int(i["cycle"]), "signal": str(i["signal"]), "value_hex": str(i["value_hex"])}
                    for i in data["inputs"]
                ],
                [{str(k): str(v) for k, v in pc.items()} for pc in data["pathcodes"]],
                {str(k): str(v) for k, v in data.get("initial_registers", {}).items()},
                bool(data.get("unconfirmed", False)),
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise MalformedCounterExample(f"bad counterexample record: {exc}") from None
        if cex.cycle < 0 or len(cex.pathcodes) != cex.cycle:
            raise MalformedCounterExample("pathcodes must list one entry per cycle before the violation")
        cex.input_table()
        return cex


@dataclass
class Report:
    config: dict[str, Any]
    stats: dict[str, Any]
    violations: list[CounterExample]
    complete: bool = True

    def to_json(self) -> dict[str, Any]:
        return {
            "config": self.config,
            "stats": self.stats,
            "violations": [v.to_json() for v in self.violations],
            "complete": self.complete,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Report":
        return cls(
            dict(data.get("config", {})),
            dict(data.get("stats", {})),
            [CounterExample.from_json(v) for v in data.get("violations", [])],
            bool(data.get("complete", True)),
        )
