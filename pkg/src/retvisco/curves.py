"""Sampled curves and their CSV serialization.

CSV layout::

    # key=value, key=value, ...          provenance line (exact round-trip)
    x_name,y_name[,...]                   column header
    0.36787944117144233,...               data, 17 significant digits (%.17g)

Lines starting with ``#`` are comments. Files are written to a temporary
name and renamed into place, so a reader never sees a partial file.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, ClassVar, Mapping

import numpy as np

__all__ = ["SampledCurve", "format_value", "write_csv", "read_csv", "atomic_write"]


def format_value(value: Any) -> str:
    """Shortest text that reads back as the same float; ``str`` otherwise."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def atomic_write(path: str | os.PathLike[str], text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_csv(
    path: str | os.PathLike[str],
    header: Mapping[str, Any],
    columns: Mapping[str, np.ndarray],
) -> Path:
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=np.float64) for n in names])

    lines = ["# " + ", ".join(f"{k}={format_value(v)}" for k, v in header.items())]
    lines.append(",".join(names))
    lines.extend(",".join(f"{v:.17g}" for v in row) for row in data)
    return atomic_write(path, "\n".join(lines) + "\n")


def read_csv(path: str | os.PathLike[str]) -> tuple[dict[str, str], dict[str, np.ndarray]]:
    header: dict[str, str] = {}
    names: list[str] | None = None
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for item in line[1:].split(","):
                    if "=" in item:
                        key, value = item.split("=", 1)
                        header[key.strip()] = value.strip()
                continue
            if names is None:
                names = line.split(",")
            else:
                rows.append([float(v) for v in line.split(",")])

    data = np.array(rows, dtype=np.float64).reshape(-1, len(names or []))
    return header, {n: data[:, i] for i, n in enumerate(names or [])}


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Ordered abscissa/ordinate pairs with a provenance header."""

    x: np.ndarray
    y: np.ndarray
    quantity: str
    meta: dict[str, Any] = field(default_factory=dict)

    x_name: ClassVar[str] = "x"
    y_name: ClassVar[str] = "value"

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError(f"abscissa and ordinate shapes differ: {x.shape} vs {y.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.x.size

    def header(self) -> dict[str, Any]:
        return {"quantity": self.quantity, **self.meta}

    def to_csv(self, path: str | os.PathLike[str]) -> Path:
        return write_csv(path, self.header(), {self.x_name: self.x, self.y_name: self.y})
