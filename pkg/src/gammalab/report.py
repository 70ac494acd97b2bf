"""Residual reports shared by the verification routines and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class Check:
    """One named residual compared against a tolerance.

    Attributes:
        name: short identifier of the checked identity.
        residual: observed residual (NaN counts as a failure).
        tol: acceptance threshold.
        anchor: the mathematical statement the check certifies.
    """

    name: str
    residual: float
    tol: float
    anchor: str = ""

    @property
    def passed(self) -> bool:
        return not math.isnan(self.residual) and self.residual <= self.tol

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "residual": self.residual,
            "tol": self.tol,
            "passed": self.passed,
        }

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<34s} residual={self.residual:.3e}  tol={self.tol:.1e}  [{self.anchor}]"


@dataclass
class Report:
    """Collection of checks; passes iff every check passes."""

    title: str
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name: str, residual: float, tol: float, anchor: str = "") -> Check:
        chk = Check(name, float(residual), float(tol), anchor)
        self.checks.append(chk)
        return chk

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.residual, c.tol, c.anchor))
        self.notes.extend(other.notes)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.checks)

    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "notes": list(self.notes),
            "data": self.data,
        }

    def format(self) -> str:
        lines = [self.title]
        lines += ["  " + c.line() for c in self.checks]
        lines += ["  note: " + n for n in self.notes]
        lines.append("  overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)
