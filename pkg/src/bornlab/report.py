"""Machine-readable reports shared by every CLI command."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__

STATUSES = ("pass", "fail", "info")
_TOP_KEYS = {"tool_version", "command", "seed", "results", "wall_time_ms"}
_RESULT_KEYS = {"name", "status", "deviation", "payload"}


@dataclass
class Result:
    name: str
    status: str
    deviation: float | None = None
    payload: dict | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}, got {self.status!r}")

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "deviation": self.deviation, "payload": self.payload}


@dataclass
class Report:
    command: str
    seed: int | None = None
    results: list[Result] = field(default_factory=list)
    wall_time_ms: int = 0
    tool_version: str = __version__

    def add(self, name: str, status, deviation: float | None = None, payload: dict | None = None) -> Result:
        if not isinstance(status, str):
            status = "pass" if status else "fail"
        r = Result(name, status, None if deviation is None else float(deviation), payload)
        self.results.append(r)
        return r

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "command": self.command,
            "seed": self.seed,
            "results": [r.to_dict() for r in self.results],
            "wall_time_ms": int(self.wall_time_ms),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> Report:
        validate(data)
        return cls(
            command=data["command"],
            seed=data["seed"],
            results=[Result(r["name"], r["status"], r["deviation"], r["payload"]) for r in data["results"]],
            wall_time_ms=data["wall_time_ms"],
            tool_version=data["tool_version"],
        )

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls.from_dict(json.loads(text))

    def render(self) -> str:
        lines = [f"{self.command}  (bornlab {self.tool_version}, seed={self.seed}, {self.wall_time_ms} ms)"]
        for r in self.results:
            dev = "" if r.deviation is None else f"  [{r.deviation:.3e}]"
            lines.append(f"  {r.status.upper():4}  {r.name}{dev}")
        n_fail = sum(r.status == "fail" for r in self.results)
        lines.append("all checks passed" if n_fail == 0 else f"{n_fail} check(s) FAILED")
        return "\n".join(lines)


def validate(data: dict) -> None:
    """Raise ValueError unless ``data`` matches the report schema exactly."""
    if not isinstance(data, dict) or set(data) != _TOP_KEYS:
        raise ValueError(f"report keys must be exactly {sorted(_TOP_KEYS)}")
    if not isinstance(data["tool_version"], str) or not isinstance(data["command"], str):
        raise ValueError("tool_version and command must be strings")
    seed = data["seed"]
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ValueError("seed must be an integer or null")
    wt = data["wall_time_ms"]
    if isinstance(wt, bool) or not isinstance(wt, int):
        raise ValueError("wall_time_ms must be an integer")
    if not isinstance(data["results"], list):
        raise ValueError("results must be an array")
    for r in data["results"]:
        if not isinstance(r, dict) or set(r) != _RESULT_KEYS:
            raise ValueError(f"result keys must be exactly {sorted(_RESULT_KEYS)}")
        if not isinstance(r["name"], str) or r["status"] not in STATUSES:
            raise ValueError(f"bad result entry {r!r}")
        dev = r["deviation"]
        if dev is not None and (isinstance(dev, bool) or not isinstance(dev, (int, float))):
            raise ValueError("deviation must be a number or null")
        if r["payload"] is not None and not isinstance(r["payload"], dict):
            raise ValueError("payload must be an object or null")
