"""Structured pass/fail records for numerical checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        # NaN never passes
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        residual = self.residual if math.isfinite(self.residual) else str(self.residual)
        return {
            "name": self.name,
            "residual": residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    """Ordered collection of named checks.

    ``passed`` is the conjunction of the individual checks; an empty report
    passes vacuously.
    """

    checks: list[Check] = field(default_factory=list)
    environment: dict = field(default_factory=dict)

    def add(self, name: str, residual: float, tolerance: float) -> Check:
        check = Check(name, float(residual), float(tolerance))
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.residual, c.tolerance))

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

    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def to_dict(self) -> dict:
        return {
            "overall_pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "environment": dict(self.environment),
        }

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            lines.append(f"{flag}  {c.name:<40s} {c.residual:10.3e} <= {c.tolerance:.1e}")
        return "\n".join(lines)
