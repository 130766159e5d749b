"""Run configuration for the command-line interface.

Configuration files use the INI format read by :mod:`configparser`. Every
key is optional; missing keys keep the defaults, which reproduce both
figures without any file. See ``retvisco.example.ini`` in the source tree
for an annotated file listing every key.
"""

from __future__ import annotations

import configparser
import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from retvisco.constitutive import MaterialParams, QuadratureConfig
from retvisco.errors import DomainError
from retvisco.mittag_leffler import MLConfig
from retvisco.relaxation import OdeConfig

__all__ = ["GridConfig", "VerifyConfig", "RunConfig", "load_config"]


def _increasing(values: tuple[float, ...], what: str) -> None:
    if not values:
        raise DomainError(f"{what} must not be empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise DomainError(f"{what} must be strictly increasing: {values}")


@dataclass(frozen=True)
class GridConfig:
    """Sample counts and ranges of the generated curves."""

    figure1_points: int = 200
    figure1_min: float = 0.005
    figure2_points: int = 400
    figure2_t_end: float = 10.0
    relax_points: int = 401
    relax_t_end: float = 10.0
    bounds_points: int = 400
    bounds_t_end: float = 100.0
    dissipation_log_points: int = 300
    dissipation_t_min: float = 1.0e-8

    def __post_init__(self) -> None:
        for name in ("figure1_points", "figure2_points", "relax_points", "bounds_points"):
            if getattr(self, name) < 2:
                raise DomainError(f"{name} must be at least 2")
        if self.dissipation_log_points < 5:
            raise DomainError("dissipation_log_points must be at least 5")
        if not (0.0 < self.figure1_min < 1.0):
            raise DomainError(f"figure1_min must lie in (0, 1): {self.figure1_min}")
        for name in ("figure2_t_end", "relax_t_end", "bounds_t_end"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be positive")
        if not (0.0 < self.dissipation_t_min < 1.0):
            raise DomainError("dissipation_t_min must lie in (0, 1)")

    def figure1(self) -> np.ndarray:
        return np.linspace(self.figure1_min, 1.0, self.figure1_points)

    def figure2(self) -> np.ndarray:
        return np.linspace(0.0, self.figure2_t_end, self.figure2_points)

    def relax(self) -> np.ndarray:
        return np.linspace(0.0, self.relax_t_end, self.relax_points)

    def bounds(self) -> np.ndarray:
        """Strictly positive grid ending at ``bounds_t_end``."""
        return np.linspace(0.0, self.bounds_t_end, self.bounds_points + 1)[1:]

    def dissipation(self) -> np.ndarray:
        """Zero, a geometric run up to ``tau0``, then the uniform relax grid."""
        t_end = self.relax_t_end
        head = np.geomspace(self.dissipation_t_min, min(1.0, t_end), self.dissipation_log_points)
        tail = self.relax()
        return np.concatenate([[0.0], head, tail[tail > head[-1]]])


@dataclass(frozen=True)
class VerifyConfig:
    """Parameter matrix of ``retvisco verify``."""

    alphas: tuple[float, ...] = (0.5, 0.6, 0.75, 0.9, 1.0)
    sigma0_over_k0: tuple[float, ...] = (0.25, 0.5, 1.0)

    def __post_init__(self) -> None:
        _increasing(self.alphas, "verify alphas")
        _increasing(self.sigma0_over_k0, "verify sigma0_over_k0")
        if not all(0.0 < a <= 1.0 for a in self.alphas):
            raise DomainError(f"verify alphas must lie in (0, 1]: {self.alphas}")
        if not all(0.0 < s <= 1.0 for s in self.sigma0_over_k0):
            raise DomainError(
                f"verify sigma0_over_k0 must lie in (0, 1]: {self.sigma0_over_k0}"
            )


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI command needs."""

    material: MaterialParams = field(default_factory=MaterialParams)
    ml: MLConfig = field(default_factory=MLConfig)
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    ode: OdeConfig = field(default_factory=OdeConfig)
    grids: GridConfig = field(default_factory=GridConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    sigma0: float = 0.5
    output_dir: Path = Path("out")

    def provenance(self) -> dict[str, Any]:
        """Configuration values recorded in CSV headers."""
        m = self.material
        return {
            "rho_star": m.rho_star,
            "mu0": m.mu0,
            "series_tol": self.ml.series_tol,
            "crossover": self.ml.crossover,
            "quad_rel_tol": self.quad.rel_tol,
            "tail_start": self.quad.tail_start,
        }


# {{{ INI parsing

# section name -> (attribute of RunConfig, dataclass type)
_SECTIONS = {
    "material": ("material", MaterialParams),
    "mittag_leffler": ("ml", MLConfig),
    "quadrature": ("quad", QuadratureConfig),
    "ode": ("ode", OdeConfig),
    "grids": ("grids", GridConfig),
    "verify": ("verify", VerifyConfig),
}


def _convert(raw: str, like: Any, key: str) -> Any:
    try:
        if isinstance(like, bool):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(like, int):
            return int(raw)
        if isinstance(like, float):
            return float(raw)
        if isinstance(like, tuple):
            return tuple(float(v) for v in raw.replace(",", " ").split())
    except ValueError as exc:
        raise DomainError(f"bad value for '{key}': {raw!r}") from exc
    return raw


def _section(parser: configparser.ConfigParser, name: str, cls: type, base: Any) -> Any:
    if not parser.has_section(name):
        return base
    known = {f.name for f in dataclasses.fields(cls) if f.init}
    updates: dict[str, Any] = {}
    for key, raw in parser.items(name):
        if name == "material" and key == "rho_mu":
            updates["rho_star"], updates["mu0"] = float(raw), 1.0
            continue
        if key not in known:
            raise DomainError(f"unknown key '{key}' in section [{name}]")
        updates[key] = _convert(raw, getattr(base, key), f"{name}.{key}")
    return dataclasses.replace(base, **updates)


def load_config(path: str | os.PathLike[str] | None = None) -> RunConfig:
    """Read a :class:`RunConfig` from an INI file, or return the defaults.

    Raises
    ------
    DomainError
        For unknown sections or keys, unparsable values, or values that
        violate an invariant.
    """
    cfg = RunConfig()
    if path is None:
        return cfg

    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise DomainError(f"cannot read configuration {path}: {exc}") from exc
    except configparser.Error as exc:
        raise DomainError(f"malformed configuration {path}: {exc}") from exc

    updates: dict[str, Any] = {}
    for name in parser.sections():
        if name == "run":
            continue
        if name not in _SECTIONS:
            raise DomainError(f"unknown section [{name}] in {path}")
        attr, cls = _SECTIONS[name]
        updates[attr] = _section(parser, name, cls, getattr(cfg, attr))

    if parser.has_section("run"):
        for key, raw in parser.items("run"):
            if key == "sigma0":
                updates["sigma0"] = _convert(raw, 0.0, "run.sigma0")
            elif key == "output_dir":
                updates["output_dir"] = Path(raw)
            else:
                raise DomainError(f"unknown key '{key}' in section [run]")

    return dataclasses.replace(cfg, **updates)


# }}}
