"""Command-line interface: ``retvisco <command> [options]``.

Commands
--------
``ml-eval``   Mittag-Leffler values as a ``z,value`` table on standard output.
``figure1``   ``fig1_tau.csv`` and ``fig1_energy.csv``.
``figure2``   ``fig2.csv`` with the nonlinear, fractional and upper-bound curves.
``relax``     One relaxation curve per requested kind.
``energy``    Normalized viscous energy against stress.
``tau``       Normalized relaxation time against stress.
``verify``    The verification suite; one report pair per check.

Exit status is 0 on success, 1 when a verification check fails and 2 for
usage, configuration or domain errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from retvisco.config import RunConfig, load_config
from retvisco.constitutive import sample_energy_and_tau
from retvisco.curves import write_csv
from retvisco.errors import RetViscoError
from retvisco.mittag_leffler import ml_two
from retvisco.relaxation import KINDS, relaxation_curve, sigma_ret_ode
from retvisco.suite import run_suite

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise _UsageError(message)


# {{{ configuration


def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("model parameters (override the config file)")
    g.add_argument("--alpha", type=float, help="fractional order in (0, 1]")
    g.add_argument("--tau0", type=float, help="relaxation time constant")
    g.add_argument("--k0", type=float, help="structural stress constant")
    g.add_argument("--rho-mu", type=float, help="product rho_star * mu0")
    g.add_argument("--sigma0", type=float, help="initial stress")
    g.add_argument("--out-dir", type=Path, help="output directory")
    g.add_argument("--config", type=Path, help="INI configuration file")


def _resolve(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config)
    material = {}
    for key in ("alpha", "tau0", "k0"):
        if getattr(args, key) is not None:
            material[key] = getattr(args, key)
    if args.rho_mu is not None:
        material.update(rho_star=args.rho_mu, mu0=1.0)
    updates: dict = {}
    if material:
        updates["material"] = dataclasses.replace(cfg.material, **material)
    if args.sigma0 is not None:
        updates["sigma0"] = args.sigma0
    if args.out_dir is not None:
        updates["output_dir"] = args.out_dir
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _params_header(cfg: RunConfig, **extra) -> dict:
    m = cfg.material
    return {"alpha": m.alpha, "tau0": m.tau0, "k0": m.k0, **extra, **cfg.provenance()}


# }}}


# {{{ commands


def cmd_ml_eval(args: argparse.Namespace, cfg: RunConfig) -> int:
    alpha = cfg.material.alpha if args.alpha is None else args.alpha
    z = np.asarray(args.z, dtype=np.float64)
    values = np.atleast_1d(ml_two(alpha, args.beta, z, cfg.ml))
    out = ["z,value"]
    out.extend(f"{zi:.17g},{v:.17g}" for zi, v in zip(z, values))
    print("\n".join(out))
    return EXIT_OK


def cmd_figure1(args: argparse.Namespace, cfg: RunConfig) -> int:
    energy, tau = sample_energy_and_tau(cfg.material, cfg.grids.figure1(), cfg.quad, ml=cfg.ml)
    extra = cfg.provenance()
    out = cfg.output_dir
    paths = [
        dataclasses.replace(tau, meta=extra).to_csv(out / "fig1_tau.csv"),
        dataclasses.replace(energy, meta=extra).to_csv(out / "fig1_energy.csv"),
    ]
    for path in paths:
        print(path)
    return EXIT_OK


def cmd_figure2(args: argparse.Namespace, cfg: RunConfig) -> int:
    p, sigma0 = cfg.material, cfg.sigma0
    if not (0.0 < sigma0 < p.k0):
        raise RetViscoError(f"figure2 needs 0 < sigma0 < k0 = {p.k0}, got sigma0 = {sigma0}")
    grid = cfg.grids.figure2()
    curves = {
        "sigma_R": relaxation_curve("ret_closed", grid, sigma0, p, ml=cfg.ml),
        "sigma_F": relaxation_curve("fractional", grid, sigma0, p, ml=cfg.ml),
        "sigma_ub": relaxation_curve("upper_bound", grid, sigma0, p, ml=cfg.ml),
    }
    columns = {"t_over_tau0": grid, **{k: c.y for k, c in curves.items()}}
    header = _params_header(cfg, sigma0=sigma0, normalization="sigma/k0; sigma_ub=sigma_F/sigma0")
    print(write_csv(cfg.output_dir / "fig2.csv", header, columns))
    return EXIT_OK


def cmd_relax(args: argparse.Namespace, cfg: RunConfig) -> int:
    p, sigma0 = cfg.material, cfg.sigma0
    grid = cfg.grids.relax()
    for kind in args.kind:
        if kind == "ret_ode":
            curve = sigma_ret_ode(grid, sigma0, p, cfg.ode, ml=cfg.ml)
        else:
            curve = relaxation_curve(kind, grid, sigma0, p, ml=cfg.ml)
        curve = dataclasses.replace(curve, meta=cfg.provenance())
        print(curve.to_csv(cfg.output_dir / f"relax_{kind}.csv"))
    return EXIT_OK


def _stress_grid(args: argparse.Namespace, cfg: RunConfig) -> np.ndarray:
    if args.sigma is not None:
        return np.asarray(args.sigma, dtype=np.float64) / cfg.material.k0
    return cfg.grids.figure1()


def _sampled(args: argparse.Namespace, cfg: RunConfig, which: int, name: str) -> int:
    grid = _stress_grid(args, cfg)
    curve = sample_energy_and_tau(cfg.material, grid, cfg.quad, ml=cfg.ml)[which]
    if args.sigma is not None:
        print(f"sigma,{curve.y_name}")
        for s, v in zip(args.sigma, curve.y):
            print(f"{s:.17g},{v:.17g}")
        return EXIT_OK
    curve = dataclasses.replace(curve, meta=cfg.provenance())
    print(curve.to_csv(cfg.output_dir / f"{name}.csv"))
    return EXIT_OK


def cmd_energy(args: argparse.Namespace, cfg: RunConfig) -> int:
    return _sampled(args, cfg, 0, "energy")


def cmd_tau(args: argparse.Namespace, cfg: RunConfig) -> int:
    return _sampled(args, cfg, 1, "tau")


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.alpha is not None:
        cfg = dataclasses.replace(
            cfg, verify=dataclasses.replace(cfg.verify, alphas=(args.alpha,))
        )
    if args.sigma0 is not None:
        frac = args.sigma0 / cfg.material.k0
        cfg = dataclasses.replace(
            cfg, verify=dataclasses.replace(cfg.verify, sigma0_over_k0=(frac,))
        )

    directory = cfg.output_dir / "reports"
    failures = 0
    for report in run_suite(cfg):
        report.write(directory)
        print(report.summary())
        failures += not report.passed
    print(f"{failures} failed check(s); reports in {directory}")
    return EXIT_FAILED if failures else EXIT_OK


# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="retvisco", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ml-eval", help="evaluate E_{alpha,beta}(z) for z <= 0")
    _common(p)
    p.add_argument("--beta", type=float, default=1.0, help="second parameter (default 1)")
    p.add_argument("--z", type=float, nargs="+", required=True, help="nonpositive arguments")
    p.set_defaults(func=cmd_ml_eval)

    for name, func, text in (
        ("figure1", cmd_figure1, "relaxation time and viscous energy curves"),
        ("figure2", cmd_figure2, "nonlinear and fractional relaxation with the upper bound"),
        ("verify", cmd_verify, "run the verification suite"),
    ):
        p = sub.add_parser(name, help=text)
        _common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("relax", help="relaxation curves")
    _common(p)
    p.add_argument(
        "--kind", nargs="+", choices=KINDS, default=["ret_closed"], help="curve kinds"
    )
    p.set_defaults(func=cmd_relax)

    for name, func, text in (
        ("energy", cmd_energy, "normalized viscous energy"),
        ("tau", cmd_tau, "normalized relaxation time"),
    ):
        p = sub.add_parser(name, help=text)
        _common(p)
        p.add_argument(
            "--sigma", type=float, nargs="+", help="print values at these stresses instead"
        )
        p.set_defaults(func=func)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve(args)
        return args.func(args, cfg)
    except _UsageError as exc:
        print(f"retvisco: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RetViscoError, ValueError) as exc:
        print(f"retvisco: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
