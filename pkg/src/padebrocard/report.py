"""Structured pass/fail results shared by every checker and by the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import LemmaViolation

SCHEMA_VERSION = "1.0"


def jsonable(value: Any) -> Any:
    """Render exact and ball values as strings so JSON output stays lossless."""
    from .ball import Ball
    from .kernel import Poly

    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, int):
        # large integers become strings to keep consumers exact
        return value if abs(value) < 2**53 else str(value)
    if isinstance(value, float):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Ball):
        return value.to_json()
    if isinstance(value, Poly):
        return value.to_json()
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_json"):
        return value.to_json()
    return str(value)


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": jsonable(self.detail)}


@dataclass
class CheckReport:
    """An ordered collection of checks under one heading."""

    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, **detail) -> Check:
        c = Check(name, bool(passed), detail)
        self.checks.append(c)
        return c

    def extend(self, other: "CheckReport") -> None:
        self.checks.extend(other.checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)

    def raise_if_failed(self) -> "CheckReport":
        bad = self.first_failure()
        if bad is not None:
            raise LemmaViolation(f"{self.title}: check {bad.name!r} failed", witness=bad.to_json())
        return self

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "n_checks": len(self.checks),
            "first_failure": None if self.passed else self.first_failure().to_json(),
            "checks": [c.to_json() for c in self.checks],
        }
