"""Machine-readable verification reports.

Reports are deterministic for a fixed input and seed.  Exit codes:
0 all checks pass, 1 some check failed, 2 input error (raised before a
report exists), 3 no failure but at least one Unknown verdict (boundary
parameter values), so CI can treat those specially.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .contact import CheckItem
from .scalar import Verdict

REPORT_SCHEMA = "econtact-report/1"
TOOL_VERSION = "0.1.0"

_VERDICT_TEXT = {Verdict.ZERO: "pass", Verdict.NONZERO: "fail",
                 Verdict.UNKNOWN: "unknown"}


def check_to_dict(item: CheckItem) -> dict:
    return {"name": item.name, "verdict": _VERDICT_TEXT[item.verdict],
            "witness": item.witness}


@dataclass
class Report:
    command: str
    inputs: list[str]
    seed: int
    orientation: str = "auto"
    checks: list[dict] = field(default_factory=list)
    findings: dict = field(default_factory=dict)
    provenance: list[str] = field(default_factory=list)

    def add_check(self, item: CheckItem, invert: bool = False) -> None:
        d = check_to_dict(item)
        if invert and d["verdict"] != "unknown":
            d["verdict"] = "fail" if d["verdict"] == "pass" else "pass"
        self.checks.append(d)

    def add_pass(self, name: str, ok: Optional[bool],
                 witness: Optional[str] = None) -> None:
        verdict = "unknown" if ok is None else ("pass" if ok else "fail")
        self.checks.append({"name": name, "verdict": verdict,
                            "witness": witness})

    @property
    def exit_code(self) -> int:
        verdicts = [c["verdict"] for c in self.checks]
        if "fail" in verdicts:
            return 1
        unknown_findings = any(v == "unknown" for v in self.findings.values()
                               if isinstance(v, str))
        if "unknown" in verdicts or unknown_findings:
            return 3
        return 0

    def to_dict(self) -> dict:
        return {"schema": REPORT_SCHEMA, "tool_version": TOOL_VERSION,
                "command": self.command, "inputs": self.inputs,
                "seed": self.seed, "orientation": self.orientation,
                "checks": self.checks, "findings": self.findings,
                "provenance": self.provenance, "exit_code": self.exit_code}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=str) + "\n"

    def to_text(self) -> str:
        lines = [f"== {self.command} {' '.join(self.inputs)} "
                 f"(seed {self.seed}, orientation {self.orientation})"]
        for c in self.checks:
            mark = {"pass": "ok  ", "fail": "FAIL", "unknown": "??? "}[c["verdict"]]
            wit = f"  [{c['witness']}]" if c.get("witness") else ""
            lines.append(f"  {mark} {c['name']}{wit}")
        if self.findings:
            lines.append("  findings:")
            for k, v in self.findings.items():
                lines.append(f"    {k}: {v}")
        for p in self.provenance:
            lines.append(f"  note: {p}")
        lines.append(f"  exit code: {self.exit_code}")
        return "\n".join(lines) + "\n"
