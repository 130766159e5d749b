r"""Relaxation under a constant applied strain.

Two stress histories start from the same initial stress :math:`\sigma_0`:

* the fractional Maxwell response
  :math:`\sigma_F(t) = \sigma_0 E_\alpha[-(t/\tau_0)^\alpha]`;
* the nonlinear response :math:`\dot\sigma = -\sigma / \tau(\sigma)`, whose
  solution is the shifted curve
  :math:`\sigma_R(t) = k_0 E_\alpha[-((t + c)/\tau_0)^\alpha]` with
  :math:`E_\alpha[-(c/\tau_0)^\alpha] = \sigma_0 / k_0`.

:func:`sigma_ret_ode` integrates the nonlinear equation directly in
:math:`\sigma`, inverting the constitutive curve inside the right-hand side,
so that it is an independent check of the closed form.

For ``alpha < 1`` and ``0 < sigma0 < k0`` the two responses are ordered as
:math:`\sigma_F < \sigma_R < (k_0/\sigma_0) \sigma_F` for every ``t > 0``.
:func:`verify_theorem2_bounds` checks this ordering, and
:func:`dissipation_check` checks the energy balance
:math:`\frac{d}{dt} e^{(V)}(\sigma(t)) = -\sigma^2 / (\rho^* \mu_0)` along a
computed curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
from scipy import integrate

from retvisco.constitutive import (
    DEFAULT_QUAD,
    SIGMA_FLOOR,
    MaterialParams,
    QuadratureConfig,
    relaxation_time,
    s_of_sigma,
    viscous_energy,
)
from retvisco.curves import SampledCurve
from retvisco.errors import ConvergenceError, DomainError, OutOfRangeError
from retvisco.mittag_leffler import DEFAULT_ML, MLConfig, ml_relax
from retvisco.report import VerificationReport, worst_of

__all__ = [
    "KINDS",
    "OdeConfig",
    "RelaxationCurve",
    "sigma_fractional",
    "offset_c",
    "sigma_ret_closed",
    "sigma_upper_bound",
    "relaxation_curve",
    "sigma_ret_ode",
    "verify_theorem2_bounds",
    "dissipation_check",
]

#: curve kinds accepted by :class:`RelaxationCurve`
KINDS = ("fractional", "ret_closed", "ret_ode", "upper_bound")

#: strictness margin of the ordering checks, in units of ``k0``
BOUND_MARGIN = 1.0e-12


@dataclass(frozen=True)
class OdeConfig:
    """Step control for :func:`sigma_ret_ode`.

    Attributes
    ----------
    rel_tol, abs_tol
        Local error tolerances of the Runge-Kutta pair. ``abs_tol`` is in
        units of ``k0``.
    t_start_offset
        Start time, as a fraction of ``tau0``, used when ``sigma0 = k0``
        and the initial slope is infinite.
    max_steps
        Upper bound on accepted plus rejected steps.
    """

    rel_tol: float = 1.0e-10
    abs_tol: float = 1.0e-13
    t_start_offset: float = 1.0e-4
    max_steps: int = 100_000

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise DomainError("rel_tol and abs_tol must be positive")
        if not (0.0 < self.t_start_offset <= 1.0e-3):
            raise DomainError(
                f"t_start_offset must lie in (0, 1e-3]: {self.t_start_offset}"
            )
        if self.max_steps <= 0:
            raise DomainError(f"max_steps must be positive: {self.max_steps}")


DEFAULT_ODE = OdeConfig()


@dataclass(frozen=True, eq=False)
class RelaxationCurve(SampledCurve):
    """Normalized stress ``sigma / k0`` against ``t / tau0``.

    For the ``upper_bound`` kind the ordinate is ``sigma_F / sigma0``, the
    upper bound ``(k0 / sigma0) sigma_F`` in units of ``k0``.
    """

    sigma0: float = 1.0
    params: MaterialParams = MaterialParams()

    x_name: ClassVar[str] = "t_over_tau0"
    y_name: ClassVar[str] = "sigma_over_k0"

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.quantity not in KINDS:
            raise ValueError(f"unknown curve kind {self.quantity!r}; expected one of {KINDS}")
        if self.x.size and (np.any(np.diff(self.x) <= 0.0) or self.x[0] < 0.0):
            raise ValueError("time grid must be nonnegative and strictly increasing")
        if np.any(self.y <= 0.0) or np.any(self.y > 1.0):
            raise ValueError("normalized stress must lie in (0, 1]")
        if np.any(np.diff(self.y) >= 0.0):
            raise ValueError("stress must be strictly decreasing in time")

    @property
    def kind(self) -> str:
        return self.quantity

    @property
    def t_over_tau0(self) -> np.ndarray:
        return self.x

    @property
    def sigma_over_k0(self) -> np.ndarray:
        return self.y

    def stress(self) -> np.ndarray:
        """Stress values in physical units."""
        scale = self.sigma0 / self.params.k0 if self.kind == "upper_bound" else 1.0
        return self.y * self.params.k0 * scale

    def times(self) -> np.ndarray:
        return self.x * self.params.tau0

    def header(self) -> dict[str, Any]:
        p = self.params
        return {
            "kind": self.kind,
            "alpha": p.alpha,
            "tau0": p.tau0,
            "k0": p.k0,
            "sigma0": self.sigma0,
            **self.meta,
        }


# {{{ closed forms


def _as_time(t: Any) -> np.ndarray:
    tt = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(tt)):
        raise DomainError("time must be finite")
    if np.any(tt < 0.0):
        raise DomainError("time must be nonnegative")
    return tt


def _wrap(result: np.ndarray, like: Any) -> Any:
    return float(result) if np.ndim(like) == 0 else result


def _check_sigma0(sigma0: float, p: MaterialParams, sigma_floor: float) -> None:
    if not math.isfinite(sigma0):
        raise DomainError(f"initial stress must be finite: {sigma0}")
    if sigma0 > p.k0:
        raise OutOfRangeError(
            f"initial stress {sigma0} exceeds k0 = {p.k0}: no real offset exists "
            "since E_alpha(-x^alpha) <= 1"
        )
    if sigma0 <= sigma_floor * p.k0:
        raise OutOfRangeError(
            f"initial stress {sigma0} at or below the floor {sigma_floor:g} * k0"
        )


def sigma_fractional(
    t: Any, sigma0: float, p: MaterialParams, ml: MLConfig = DEFAULT_ML
) -> Any:
    """Fractional Maxwell relaxation ``sigma0 * E_alpha(-(t/tau0)^alpha)``."""
    if not (math.isfinite(sigma0) and sigma0 > 0.0):
        raise DomainError(f"initial stress must be positive: {sigma0}")
    tt = _as_time(t)
    return _wrap(sigma0 * np.asarray(ml_relax(p.alpha, tt / p.tau0, ml)), t)


def offset_c(
    sigma0: float,
    p: MaterialParams,
    tol: float = 1.0e-13,
    *,
    sigma_floor: float = SIGMA_FLOOR,
    ml: MLConfig = DEFAULT_ML,
) -> float:
    """Time shift ``c`` with ``E_alpha(-(c/tau0)^alpha) = sigma0 / k0``.

    Zero exactly when ``sigma0 = k0``.

    Raises
    ------
    OutOfRangeError
        If ``sigma0 > k0`` or ``sigma0`` does not exceed the stress floor.
    """
    _check_sigma0(sigma0, p, sigma_floor)
    return float(s_of_sigma(sigma0, p, tol, sigma_floor=sigma_floor, ml=ml))


def sigma_ret_closed(
    t: Any,
    sigma0: float,
    p: MaterialParams,
    tol: float = 1.0e-13,
    *,
    sigma_floor: float = SIGMA_FLOOR,
    ml: MLConfig = DEFAULT_ML,
) -> Any:
    """Nonlinear relaxation ``k0 * E_alpha(-((t + c)/tau0)^alpha)`` in closed form."""
    tt = _as_time(t)
    c = offset_c(sigma0, p, tol, sigma_floor=sigma_floor, ml=ml)
    return _wrap(p.k0 * np.asarray(ml_relax(p.alpha, (tt + c) / p.tau0, ml)), t)


def sigma_upper_bound(
    t: Any, sigma0: float, p: MaterialParams, ml: MLConfig = DEFAULT_ML
) -> Any:
    """Upper bound ``(k0 / sigma0) * sigma_F(t) = k0 * E_alpha(-(t/tau0)^alpha)``."""
    return sigma_fractional(t, p.k0, p, ml)


def relaxation_curve(
    kind: str,
    t_over_tau0: Any,
    sigma0: float,
    p: MaterialParams,
    tol: float = 1.0e-13,
    ml: MLConfig = DEFAULT_ML,
) -> RelaxationCurve:
    """Sample a closed-form relaxation curve of the given *kind*.

    *kind* is ``"fractional"``, ``"ret_closed"`` or ``"upper_bound"``; use
    :func:`sigma_ret_ode` for ``"ret_ode"``.
    """
    grid = np.asarray(t_over_tau0, dtype=np.float64)
    t = grid * p.tau0
    if kind == "fractional":
        y = np.asarray(sigma_fractional(t, sigma0, p, ml)) / p.k0
    elif kind == "ret_closed":
        y = np.asarray(sigma_ret_closed(t, sigma0, p, tol, ml=ml)) / p.k0
    elif kind == "upper_bound":
        _check_sigma0(sigma0, p, 0.0)
        y = np.asarray(sigma_upper_bound(t, sigma0, p, ml)) / p.k0
    else:
        raise DomainError(f"closed-form curves are {KINDS[:2] + KINDS[3:]}, got {kind!r}")
    return RelaxationCurve(grid, y, quantity=kind, sigma0=sigma0, params=p)


# }}}


# {{{ direct integration


def sigma_ret_ode(
    t_over_tau0: Any,
    sigma0: float,
    p: MaterialParams,
    ode: OdeConfig = DEFAULT_ODE,
    tol: float = 1.0e-13,
    *,
    sigma_floor: float = SIGMA_FLOOR,
    ml: MLConfig = DEFAULT_ML,
) -> RelaxationCurve:
    r"""Integrate :math:`\dot\sigma = -\sigma / \tau(\sigma)` with an adaptive 8(5,3) pair.

    The relaxation time is evaluated from the stress at every stage by
    inverting the constitutive curve. When ``sigma0 = k0`` and ``alpha < 1``
    the slope at ``t = 0`` is infinite, so integration starts at
    ``ode.t_start_offset * tau0`` from the closed-form value there, and grid
    points before that time are filled with the closed form.

    Raises
    ------
    ConvergenceError
        On step-size underflow, when the step budget is exhausted, or when
        the stress leaves ``(0, k0]`` by more than ``ode.abs_tol * k0``.
    """
    _check_sigma0(sigma0, p, sigma_floor)
    grid = np.asarray(t_over_tau0, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0 or grid[0] != 0.0:
        raise DomainError("time grid must be a nonempty 1d array starting at 0")
    if np.any(np.diff(grid) <= 0.0):
        raise DomainError("time grid must be strictly increasing")

    alpha, k0 = p.alpha, p.k0
    singular = alpha < 1.0 and sigma0 == k0
    t0 = ode.t_start_offset if singular else 0.0
    y0 = float(ml_relax(alpha, t0, ml)) if singular else sigma0 / k0

    def rhs(_t: float, y: np.ndarray) -> np.ndarray:
        # work in t / tau0 and sigma / k0
        level = float(y[0])
        if not (sigma_floor < level <= 1.0) or (level == 1.0 and alpha < 1.0):
            # a trial stage outside the range; NaN makes the step rejected
            return np.array([np.nan])
        s = float(s_of_sigma(level * k0, p, tol, sigma_floor=sigma_floor, ml=ml))
        tau = float(relaxation_time(s, p, ml)) / p.tau0
        return np.array([-level / tau])

    result = np.empty_like(grid)
    before = grid < t0
    result[before] = np.asarray(ml_relax(alpha, grid[before], ml))

    t_eval = grid[~before]
    if t_eval.size:
        t_end = float(t_eval[-1])
        if not np.all(np.isfinite(rhs(t0, np.array([y0])))):
            raise ConvergenceError(f"slope not finite at the start value {y0!r}")
        sol = integrate.solve_ivp(
            rhs,
            (t0, max(t_end, t0)),
            [y0],
            method="DOP853",
            t_eval=t_eval,
            rtol=ode.rel_tol,
            atol=ode.abs_tol,
            # near the singular start the automatic first step is far too long
            first_step=1.0e-3 * t0 if singular else None,
        )
        if sol.status != 0:
            where = float(sol.t[-1]) if sol.t.size else t0
            raise ConvergenceError(f"integration failed at t/tau0 = {where:.6g}: {sol.message}")
        # DOP853 uses 12 stages per step
        if sol.nfev > 12 * ode.max_steps:
            raise ConvergenceError(
                f"integration needed {sol.nfev} evaluations, more than "
                f"{ode.max_steps} steps allow"
            )
        values = sol.y[0]
        bad = (values <= -ode.abs_tol) | (values > 1.0 + ode.abs_tol)
        if np.any(bad):
            where = float(t_eval[np.argmax(bad)])
            raise ConvergenceError(f"stress left (0, k0] at t/tau0 = {where:.6g}")
        result[~before] = values

    return RelaxationCurve(grid, result, quantity="ret_ode", sigma0=sigma0, params=p)


# }}}


# {{{ verification


def verify_theorem2_bounds(
    sigma0: float,
    p: MaterialParams,
    t_over_tau0: Any,
    tol: float = 1.0e-12,
    ml: MLConfig = DEFAULT_ML,
) -> VerificationReport:
    r"""Check :math:`\sigma_F < \sigma_R < (k_0/\sigma_0)\sigma_F` on a positive time grid.

    The reported ``worst`` is the largest of ``(sigma_F - sigma_R) / k0`` and
    ``(sigma_R - sigma_ub) / k0`` over the grid; the check passes when it is
    at most ``-1e-12`` (strict inequality with margin) and the ratio
    ``sigma_R / sigma_F`` is nondecreasing.

    For ``alpha = 1`` the lower bound holds with equality and the ratio is
    constant. The report then checks ``|sigma_R - sigma_F| <= tol * sigma_F``
    and the upper bound relative to ``sigma_F``, and records
    ``boundary_case=alpha_one`` and ``strict_lower=false``.
    """
    if not (0.0 < sigma0 < p.k0):
        raise OutOfRangeError(f"initial stress must lie in (0, k0 = {p.k0}): {sigma0}")
    grid = np.asarray(t_over_tau0, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0 or np.any(grid <= 0.0):
        raise DomainError("time grid must be a nonempty 1d array of positive values")

    t = grid * p.tau0
    sf = np.asarray(sigma_fractional(t, sigma0, p, ml))
    sr = np.asarray(sigma_ret_closed(t, sigma0, p, ml=ml))
    ub = np.asarray(sigma_upper_bound(t, sigma0, p, ml))
    k0 = p.k0

    lower_gap = (sr - sf) / k0
    upper_gap = (ub - sr) / k0
    ratio = sr / sf
    limit = k0 / sigma0
    # ratio increases; allow rounding in the quotient of two nearly equal values
    ratio_step = np.diff(ratio)
    ratio_ok = bool(np.all(ratio_step >= -4.0 * np.finfo(float).eps * ratio[1:]))

    details: dict[str, Any] = {
        "alpha": p.alpha,
        "sigma0": sigma0,
        "k0": k0,
        "min_lower_margin": float(np.min(lower_gap)),
        "min_upper_margin": float(np.min(upper_gap)),
        "bound_gap": float(np.max(ub - sf) / k0),
        "ratio_monotone": str(ratio_ok).lower(),
        "ratio_at_end": float(ratio[-1]),
        "ratio_limit": limit,
        "t_end_over_tau0": float(grid[-1]),
    }

    if p.alpha == 1.0:
        # sigma_R = sigma_F exactly; compare relative to sigma_F since both
        # fall below any fixed multiple of k0 at late times
        w_eq, loc_eq = worst_of(np.abs(sr - sf) / sf, grid)
        w_up, _ = worst_of(-(ub - sr) / sf, grid)
        passed = w_eq <= tol and w_up <= -BOUND_MARGIN
        details.update(
            boundary_case="alpha_one",
            strict_lower="false",
            relative_upper_worst=w_up,
        )
        return VerificationReport(
            name="ordering_bounds",
            passed=passed,
            worst=w_eq,
            location=loc_eq,
            tolerance=tol,
            details=details,
        )

    violation = np.maximum(-lower_gap, -upper_gap)
    worst, loc = worst_of(violation, grid)
    passed = worst <= -BOUND_MARGIN and ratio_ok
    details.update(strict_lower="true")
    return VerificationReport(
        name="ordering_bounds",
        passed=passed,
        worst=worst,
        location=loc,
        tolerance=-BOUND_MARGIN,
        details=details,
    )


def _fd_weights(nodes: np.ndarray, x0: float) -> np.ndarray:
    """First-derivative finite-difference weights on arbitrary *nodes* at *x0*."""
    # solve the Vandermonde moment system in scaled coordinates
    h = np.max(np.abs(nodes - x0))
    d = (nodes - x0) / h
    n = d.size
    vander = np.vander(d, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[1] = 1.0
    return np.linalg.solve(vander, rhs) / h


def dissipation_check(
    curve: RelaxationCurve,
    p: MaterialParams | None = None,
    q: QuadratureConfig = DEFAULT_QUAD,
    tol: float = 1.0e-4,
    ml: MLConfig = DEFAULT_ML,
) -> VerificationReport:
    r"""Check :math:`\frac{d}{dt} e^{(V)} = -\sigma^2/(\rho^*\mu_0)` along *curve*.

    The energy is evaluated at every node and differentiated with 5-point
    finite differences on the possibly nonuniform grid, so only interior
    nodes (two away from each end) enter the relative error. The check also
    requires the derivative and the production ``-sigma^2 / (rho_star mu0)``
    to be nonpositive at every interior node.
    """
    if curve.kind not in ("ret_closed", "ret_ode"):
        raise DomainError(f"dissipation check needs a nonlinear relaxation curve, got {curve.kind}")
    p = curve.params if p is None else p
    if curve.x.size < 5:
        raise DomainError("dissipation check needs at least 5 grid points")

    t = curve.times()
    sigma = np.minimum(curve.stress(), p.k0)
    energy = np.asarray(viscous_energy(sigma, p, q, ml=ml))

    idx = np.arange(2, t.size - 2)
    rate = np.array([_fd_weights(t[i - 2 : i + 3], t[i]) @ energy[i - 2 : i + 3] for i in idx])
    production = -sigma[idx] ** 2 / p.rho_mu
    rel = np.abs(rate - production) / np.abs(production)

    worst, loc = worst_of(rel, curve.x[idx])
    sign_ok = bool(np.all(rate <= 0.0) and np.all(production <= 0.0))
    return VerificationReport(
        name="dissipation",
        passed=bool(worst <= tol and sign_ok),
        worst=worst,
        location=loc,
        tolerance=tol,
        details={
            "kind": curve.kind,
            "alpha": p.alpha,
            "sigma0": curve.sigma0,
            "interior_nodes": int(idx.size),
            "max_rate": float(np.max(rate)),
            "max_production": float(np.max(production)),
            "sign_ok": str(sign_ok).lower(),
        },
    )


# }}}
