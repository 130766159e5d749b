"""The verification suite run by ``retvisco verify``.

Each check returns a :class:`~retvisco.report.VerificationReport`.
:func:`run_suite` runs them over a matrix of orders and initial stresses.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from typing import Iterator

import numpy as np

from retvisco.config import RunConfig
from retvisco.constitutive import (
    DEFAULT_QUAD,
    SIGMA_FLOOR,
    MaterialParams,
    QuadratureConfig,
    e0_constant,
    relaxation_time_of_sigma,
)
from retvisco.errors import DivergenceWarning, NonIntegrableError, RetViscoError
from retvisco.mittag_leffler import DEFAULT_ML, MLConfig
from retvisco.relaxation import (
    DEFAULT_ODE,
    OdeConfig,
    RelaxationCurve,
    dissipation_check,
    relaxation_curve,
    sigma_fractional,
    sigma_ret_closed,
    sigma_ret_ode,
    verify_theorem2_bounds,
)
from retvisco.report import VerificationReport, worst_of

__all__ = [
    "check_boundedness",
    "check_relaxation_time",
    "check_coincidence",
    "check_ode_agreement",
    "run_suite",
]


def check_boundedness(
    p: MaterialParams,
    q: QuadratureConfig = DEFAULT_QUAD,
    tol: float = 1.0e-6,
    ml: MLConfig = DEFAULT_ML,
) -> VerificationReport:
    """The energy constant is finite exactly when ``alpha > 1/2``.

    For ``alpha > 1/2`` the constant must be stable, within *tol* relative,
    when the tail start is doubled. For ``alpha <= 1/2`` the check passes
    when the computation is refused as non-integrable.
    """
    if p.alpha <= 0.5:
        try:
            value = e0_constant(p, q, ml)
        except NonIntegrableError:
            return VerificationReport(
                "boundedness", True, 0.0, None, 0.0,
                {"alpha": p.alpha, "expected": "non_integrable", "observed": "non_integrable"},
            )
        return VerificationReport(
            "boundedness", False, math.inf, None, 0.0,
            {"alpha": p.alpha, "expected": "non_integrable", "observed": value},
        )

    doubled = dataclasses.replace(q, tail_start=2.0 * q.tail_start)
    try:
        value = e0_constant(p, q, ml)
        check = e0_constant(p, doubled, ml)
    except RetViscoError as exc:
        return VerificationReport(
            "boundedness", False, math.inf, None, tol,
            {"alpha": p.alpha, "expected": "finite", "observed": type(exc).__name__},
        )
    change = abs(check - value) / abs(value)
    return VerificationReport(
        "boundedness", change <= tol, change, None, tol,
        {"alpha": p.alpha, "e0": value, "e0_doubled_tail": check},
    )


def check_relaxation_time(
    p: MaterialParams, n: int = 200, ml: MLConfig = DEFAULT_ML
) -> VerificationReport:
    """Relaxation time positive and decreasing on ``(floor, k0)``, zero at ``k0``.

    For ``alpha = 1`` it must equal ``tau0`` everywhere instead. The
    reported ``worst`` is the largest violation, in units of ``tau0``.
    """
    levels = np.geomspace(1.0e3 * SIGMA_FLOOR, 1.0 - 1.0e-9, n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DivergenceWarning)
        tau = np.asarray(relaxation_time_of_sigma(levels * p.k0, p, ml=ml)) / p.tau0
    at_k0 = float(relaxation_time_of_sigma(p.k0, p, ml=ml)) / p.tau0

    if p.alpha == 1.0:
        dev = np.abs(tau - 1.0)
        worst, loc = worst_of(np.append(dev, abs(at_k0 - 1.0)), np.append(levels, 1.0))
        return VerificationReport(
            "relaxation_time", worst <= 1.0e-10, worst, loc, 1.0e-10, {"alpha": p.alpha}
        )

    # positivity, then monotone decrease between neighbours
    violation = np.concatenate([-tau, np.diff(tau), [abs(at_k0)]])
    where = np.concatenate([levels, levels[1:], [1.0]])
    worst, loc = worst_of(violation, where)
    passed = bool(np.all(tau > 0.0) and np.all(np.diff(tau) < 0.0) and at_k0 == 0.0)
    return VerificationReport(
        "relaxation_time",
        passed,
        worst,
        loc,
        0.0,
        {"alpha": p.alpha, "tau_at_k0": at_k0, "tau_max": float(tau[0])},
    )


def check_coincidence(
    sigma0: float,
    p: MaterialParams,
    t_over_tau0: np.ndarray,
    tol: float = 1.0e-12,
    ml: MLConfig = DEFAULT_ML,
) -> VerificationReport:
    """Nonlinear and fractional responses coincide iff ``sigma0 = k0``.

    For ``sigma0 = k0`` the maximal relative difference must be at most
    *tol*. Otherwise the curves must differ at every ``t > 0``: the report
    passes when the smallest relative difference there exceeds *tol*, and
    ``worst`` is the negated smallest difference.
    """
    t = np.asarray(t_over_tau0) * p.tau0
    sf = np.asarray(sigma_fractional(t, sigma0, p, ml))
    sr = np.asarray(sigma_ret_closed(t, sigma0, p, ml=ml))
    rel = np.abs(sr - sf) / sf
    if sigma0 == p.k0:
        worst, loc = worst_of(rel, t_over_tau0)
        return VerificationReport(
            "coincidence", worst <= tol, worst, loc, tol,
            {"alpha": p.alpha, "sigma0": sigma0, "expected": "coincide"},
        )

    pos = t > 0.0
    smallest = float(np.min(rel[pos]))
    loc = float(np.asarray(t_over_tau0)[pos][np.argmin(rel[pos])])
    if p.alpha == 1.0:
        # sigma_R = sigma_F for the exponential, whatever sigma0
        return VerificationReport(
            "coincidence", float(np.max(rel)) <= tol, float(np.max(rel)), loc, tol,
            {"alpha": p.alpha, "sigma0": sigma0, "expected": "coincide_alpha_one"},
        )
    return VerificationReport(
        "coincidence", smallest > tol, -smallest, loc, -tol,
        {"alpha": p.alpha, "sigma0": sigma0, "expected": "differ"},
    )


def check_ode_agreement(
    ode_curve: RelaxationCurve,
    ode: OdeConfig = DEFAULT_ODE,
    ml: MLConfig = DEFAULT_ML,
) -> VerificationReport:
    """Integrated and closed-form nonlinear responses agree.

    Compares on nodes ``t >= t_start_offset * tau0`` with tolerance
    ``max(10 * ode.rel_tol, 1e-6)`` relative.
    """
    p = ode_curve.params
    grid = ode_curve.t_over_tau0
    closed = np.asarray(sigma_ret_closed(grid * p.tau0, ode_curve.sigma0, p, ml=ml)) / p.k0
    mask = grid >= ode.t_start_offset
    rel = np.abs(ode_curve.y[mask] - closed[mask]) / closed[mask]
    tol = max(10.0 * ode.rel_tol, 1.0e-6)
    worst, loc = worst_of(rel, grid[mask])
    return VerificationReport(
        "ode_agreement", worst <= tol, worst, loc, tol,
        {"alpha": p.alpha, "sigma0": ode_curve.sigma0, "nodes": int(mask.sum())},
    )


def _tagged(report: VerificationReport, tag: str) -> VerificationReport:
    return dataclasses.replace(report, name=f"{report.name}_{tag}")


def _failed(name: str, exc: Exception) -> VerificationReport:
    return VerificationReport(name, False, math.inf, None, 0.0, {"error": repr(exc)})


def run_suite(cfg: RunConfig) -> Iterator[VerificationReport]:
    """Yield every report of the configured ``(alpha, sigma0)`` matrix.

    Exceptions inside a check become failed reports, so one bad cell does
    not hide the rest.
    """
    base = cfg.material
    grids = cfg.grids
    for alpha in cfg.verify.alphas:
        p = dataclasses.replace(base, alpha=alpha)
        atag = f"a{alpha:g}"
        yield _tagged(check_boundedness(p, cfg.quad, ml=cfg.ml), atag)
        if alpha <= 0.5:
            continue

        try:
            yield _tagged(check_relaxation_time(p, ml=cfg.ml), atag)
        except (RetViscoError, ValueError) as exc:
            yield _failed(f"relaxation_time_{atag}", exc)

        for frac in cfg.verify.sigma0_over_k0:
            sigma0 = frac * p.k0
            tag = f"{atag}_s{frac:g}"
            try:
                yield _tagged(
                    check_coincidence(sigma0, p, np.linspace(0.0, 100.0, 401), ml=cfg.ml), tag
                )
                if frac < 1.0:
                    yield _tagged(
                        verify_theorem2_bounds(sigma0, p, grids.bounds(), ml=cfg.ml), tag
                    )
                grid = grids.dissipation()
                ode_curve = sigma_ret_ode(grid, sigma0, p, cfg.ode, ml=cfg.ml)
                yield _tagged(check_ode_agreement(ode_curve, cfg.ode, cfg.ml), tag)
                closed = relaxation_curve("ret_closed", grid, sigma0, p, ml=cfg.ml)
                yield _tagged(dissipation_check(closed, p, cfg.quad, ml=cfg.ml), tag)
                yield _tagged(
                    dissipation_check(ode_curve, p, cfg.quad, ml=cfg.ml), f"{tag}_ode"
                )
            except (RetViscoError, ValueError) as exc:
                yield _failed(f"cell_{tag}", exc)
