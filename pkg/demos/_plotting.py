"""Optional plotting shared by the demos: figures are skipped without matplotlib."""

from __future__ import annotations

from pathlib import Path

OUT = Path(__file__).resolve().parent / "output"


def figure():
    """Return ``(fig, ax)`` or ``None`` when matplotlib is unavailable."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return None
    return plt.subplots(figsize=(6, 4))


def save(fig, name: str) -> None:
    OUT.mkdir(exist_ok=True)
    path = OUT / name
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    print(f"wrote {path}")
