"""Structured pass/fail results for the verification checks."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from retvisco.curves import atomic_write, format_value

__all__ = ["VerificationReport"]


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one verification check.

    Attributes
    ----------
    name
        Identifier of the check, used as the report file stem.
    passed
        Whether the check succeeded.
    worst
        The quantity compared against *tolerance* at its worst point. A
        check passes only if ``worst <= tolerance``.
    location
        Abscissa (time or stress) where *worst* occurs, if meaningful.
    tolerance
        Threshold applied to *worst*.
    details
        Extra diagnostics (margins, limits, parameters).
    """

    name: str
    passed: bool
    worst: float
    location: float | None
    tolerance: float
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.passed and not (self.worst <= self.tolerance):
            raise ValueError(
                f"report '{self.name}' marked passed with worst={self.worst!r} "
                f"above tolerance={self.tolerance!r}"
            )

    def __bool__(self) -> bool:
        return self.passed

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        loc = "" if self.location is None else f" at {self.location:.6g}"
        return (
            f"[{status}] {self.name}: worst={self.worst:.3e}{loc} "
            f"(tolerance {self.tolerance:.3e})"
        )

    def to_text(self) -> str:
        lines = [self.summary()]
        lines.extend(f"    {k}: {format_value(v)}" for k, v in self.details.items())
        return "\n".join(lines) + "\n"

    def to_kv(self) -> str:
        items: dict[str, Any] = {
            "name": self.name,
            "passed": str(self.passed).lower(),
            "worst": self.worst,
            "location": "none" if self.location is None else self.location,
            "tolerance": self.tolerance,
        }
        items.update(self.details)
        return "".join(f"{k}={format_value(v)}\n" for k, v in items.items())

    def write(self, directory: str | os.PathLike[str]) -> tuple[Path, Path]:
        directory = Path(directory)
        return (
            atomic_write(directory / f"{self.name}.txt", self.to_text()),
            atomic_write(directory / f"{self.name}.kv", self.to_kv()),
        )

    @classmethod
    def from_kv(cls, text: str) -> VerificationReport:
        items = dict(line.split("=", 1) for line in text.splitlines() if "=" in line)
        base = {"name", "passed", "worst", "location", "tolerance"}
        location = items["location"]
        return cls(
            name=items["name"],
            passed=items["passed"] == "true",
            worst=float(items["worst"]),
            location=None if location == "none" else float(location),
            tolerance=float(items["tolerance"]),
            details={k: v for k, v in items.items() if k not in base},
        )


def worst_of(values, locations) -> tuple[float, float | None]:
    """Largest entry of *values* and the matching location; NaN-safe."""
    best, where = -math.inf, None
    for v, t in zip(values, locations):
        if v > best or math.isnan(v):
            best, where = float(v), float(t)
            if math.isnan(v):
                break
    return best, where
