r"""Viscous energy and nonlinear relaxation time of the fractional-compatible law.

The constitutive law is given parametrically in :math:`s \ge 0`:

.. math::

    \sigma(s) = k_0 E_\alpha[-(s/\tau_0)^\alpha], \qquad
    e^{(V)}(s) = e_0 - \frac{k_0^2}{\rho^* \mu_0}
        \int_0^s E_\alpha[-(\bar s/\tau_0)^\alpha]^2 \, d\bar s,

with :math:`e_0` chosen so that :math:`e^{(V)} \to 0` as :math:`\sigma \to 0`.
In terms of :math:`x = s/\tau_0` the normalized energy is

.. math::

    \bar e(x) = \frac{\rho^* \mu_0}{\tau_0 k_0^2} e^{(V)} =
        \int_x^\infty E_\alpha(-t^\alpha)^2 \, dt,

which is finite exactly when :math:`\alpha > 1/2`. It is evaluated directly
in this complementary form. The head ``[x, tail_start]`` uses adaptive Gauss
quadrature. The tail uses the algebraic expansion
:math:`E_\alpha(-t^\alpha) \sim \sum_k (-1)^{k+1} t^{-\alpha k} / \Gamma(1 - \alpha k)`,
squared and integrated term by term. The expansion is truncated where its
terms stop decreasing.

The nonlinear relaxation time along the curve is

.. math::

    \tau(s) = \tau_0 \frac{E_\alpha(-x^\alpha)}{x^{\alpha-1} E_{\alpha,\alpha}(-x^\alpha)}.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
from scipy import special

from retvisco._gauss import interval_integrals
from retvisco.curves import SampledCurve
from retvisco.errors import (
    ConvergenceError,
    DivergenceWarning,
    DomainError,
    NonIntegrableError,
    OutOfRangeError,
)
from retvisco.mittag_leffler import DEFAULT_ML, MLConfig, ml_relax, ml_relax_deriv

__all__ = [
    "MaterialParams",
    "QuadratureConfig",
    "EnergyCurve",
    "TauCurve",
    "SIGMA_FLOOR",
    "sigma_of_s",
    "s_of_sigma",
    "e0_constant",
    "viscous_energy_param",
    "viscous_energy",
    "relaxation_time",
    "relaxation_time_of_sigma",
    "sample_energy_and_tau",
]

#: default minimum normalized stress accepted by the inversion
SIGMA_FLOOR = 1.0e-6

# relaxation_time_of_sigma warns below this multiple of the floor
_NEAR_FLOOR = 1.0e3


@dataclass(frozen=True)
class MaterialParams:
    """Material constants of the relaxation experiment.

    Attributes
    ----------
    alpha
        Fractional order in ``(0, 1]``.
    tau0
        Relaxation time constant.
    k0
        Structural stress constant. Admissible stresses lie in ``[0, k0]``.
    rho_star
        Reference mass density.
    mu0
        Viscous coefficient at the applied strain.
    eps0
        Applied constant strain. Only used to label output.
    """

    alpha: float = 0.6
    tau0: float = 1.0
    k0: float = 1.0
    rho_star: float = 1.0
    mu0: float = 1.0
    eps0: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and 0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1]: {self.alpha}")
        for name in ("tau0", "k0", "rho_star", "mu0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be positive and finite: {value}")

    @property
    def rho_mu(self) -> float:
        """The product ``rho_star * mu0``."""
        return self.rho_star * self.mu0

    @property
    def energy_scale(self) -> float:
        """``tau0 * k0**2 / (rho_star * mu0)``, the unit of the normalized energy."""
        return self.tau0 * self.k0**2 / self.rho_mu


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the energy integrals.

    ``tail_start`` is measured in units of ``tau0``; beyond it the algebraic
    tail expansion replaces numerical quadrature.
    """

    rel_tol: float = 1.0e-12
    abs_tol: float = 1.0e-18
    tail_start: float = 40.0
    max_subdivisions: int = 5000

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise DomainError("rel_tol and abs_tol must be positive")
        if not self.tail_start >= 10.0:
            raise DomainError(f"tail_start must be at least 10: {self.tail_start}")
        if self.max_subdivisions < 100:
            raise DomainError(
                f"max_subdivisions must be at least 100: {self.max_subdivisions}"
            )


DEFAULT_QUAD = QuadratureConfig()


@dataclass(frozen=True, eq=False)
class EnergyCurve(SampledCurve):
    """Normalized viscous energy against ``sigma / k0``."""

    params: MaterialParams = MaterialParams()
    normalization: str = "rho_star*mu0/(tau0*k0^2)"

    x_name: ClassVar[str] = "sigma_over_k0"
    y_name: ClassVar[str] = "value"

    @property
    def sigma_over_k0(self) -> np.ndarray:
        return self.x

    @property
    def ebar(self) -> np.ndarray:
        return self.y

    def header(self) -> dict[str, Any]:
        p = self.params
        return {
            "quantity": self.quantity,
            "alpha": p.alpha,
            "tau0": p.tau0,
            "k0": p.k0,
            "normalization": self.normalization,
            **self.meta,
        }


@dataclass(frozen=True, eq=False)
class TauCurve(EnergyCurve):
    """Normalized relaxation time ``tau / tau0`` against ``sigma / k0``."""

    normalization: str = "1/tau0"

    @property
    def tau_bar(self) -> np.ndarray:
        return self.y


# {{{ helpers


def _wrap(result: np.ndarray, like: Any) -> Any:
    return float(result) if np.ndim(like) == 0 else result


def _require_integrable(alpha: float) -> None:
    if alpha <= 0.5:
        raise NonIntegrableError(
            f"E_alpha(-t^alpha)^2 decays like t^(-2 alpha) and is not integrable "
            f"on [0, inf) for alpha = {alpha} <= 1/2; the viscous energy is unbounded"
        )


def _as_times(s: Any, what: str = "parameter s") -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if not np.all(np.isfinite(s)):
        raise DomainError(f"{what} must be finite")
    if np.any(s < 0.0):
        raise DomainError(f"{what} must be nonnegative")
    return s


# }}}


# {{{ parametrization and inversion


def sigma_of_s(s: Any, p: MaterialParams, ml: MLConfig = DEFAULT_ML) -> Any:
    """Stress ``k0 * E_alpha(-(s/tau0)^alpha)`` on the constitutive curve."""
    ss = _as_times(s)
    return _wrap(p.k0 * np.asarray(ml_relax(p.alpha, ss / p.tau0, ml)), s)


def _initial_guess(alpha: float, level: np.ndarray) -> np.ndarray:
    """Leading-order inverse from the small- and large-time asymptotics."""
    if alpha == 1.0:
        return -np.log(level)
    near = (math.gamma(1.0 + alpha) * (1.0 - level)) ** (1.0 / alpha)
    far = (level * math.gamma(1.0 - alpha)) ** (-1.0 / alpha)
    return np.where(level > 0.5, near, far)


def _invert(level: np.ndarray, alpha: float, tol: float, ml: MLConfig) -> np.ndarray:
    """Solve ``E_alpha(-x^alpha) = level`` for ``x`` at every entry of *level*.

    Safeguarded Newton iteration in ``u = log x``: the update falls back to
    bisection whenever it would leave the current bracket.
    """
    out = np.zeros_like(level)
    active = level < 1.0
    lv = level[active]
    if not lv.size:
        return out

    def f(u: np.ndarray) -> np.ndarray:
        return np.asarray(ml_relax(alpha, np.exp(u), ml)) - lv

    u = np.log(np.maximum(_initial_guess(alpha, lv), 1.0e-300))
    lo, hi = u - math.log(2.0), u + math.log(2.0)
    for _ in range(200):
        low = f(lo) < 0.0
        high = f(hi) > 0.0
        if not (np.any(low) or np.any(high)):
            break
        lo = np.where(low, lo - math.log(4.0), lo)
        hi = np.where(high, hi + math.log(4.0), hi)
    else:
        raise ConvergenceError("no bracket found for the stress inversion")

    eps = np.finfo(float).eps
    pending = np.arange(lv.size)
    for _ in range(200):
        ui, li, hi_ = u[pending], lo[pending], hi[pending]
        x = np.exp(ui)
        val = np.asarray(ml_relax(alpha, x, ml)) - lv[pending]
        slope = x * np.asarray(ml_relax_deriv(alpha, x, ml))
        li = np.where(val > 0.0, ui, li)
        hi_ = np.where(val < 0.0, ui, hi_)

        with np.errstate(divide="ignore", invalid="ignore"):
            new = ui - val / slope
        outside = ~((new > li) & (new < hi_))
        new = np.where(outside, 0.5 * (li + hi_), new)

        # stop on a rounding-level residual or a rounding-level step
        at_noise = np.abs(val) <= 4.0 * eps * lv[pending]
        new = np.where(at_noise, ui, new)
        done = at_noise | (np.abs(new - ui) <= 4.0 * eps * np.maximum(1.0, np.abs(ui)))
        u[pending], lo[pending], hi[pending] = new, li, hi_
        pending = pending[~done]
        if not pending.size:
            break
    else:
        raise ConvergenceError("stress inversion did not converge in 200 iterations")

    x = np.exp(u)
    residual = np.abs(np.asarray(ml_relax(alpha, x, ml)) - lv)
    if np.any(residual > tol):
        i = int(np.argmax(residual))
        raise ConvergenceError(
            f"inversion residual {residual[i]:.3e} exceeds {tol:.3e} at level {lv[i]}"
        )
    out[active] = x
    return out


def s_of_sigma(
    sigma: Any,
    p: MaterialParams,
    tol: float = 1.0e-13,
    *,
    sigma_floor: float = SIGMA_FLOOR,
    ml: MLConfig = DEFAULT_ML,
) -> Any:
    """Invert :func:`sigma_of_s`.

    The relaxation function is strictly decreasing, so the root is bracketed
    around an asymptotic initial guess and refined by safeguarded Newton
    steps in ``log s``. Array input is solved in one vectorized iteration.

    Parameters
    ----------
    sigma
        Stress in ``(sigma_floor * k0, k0]``.
    tol
        Accepted residual ``|sigma_of_s(s) - sigma| / k0``.

    Raises
    ------
    OutOfRangeError
        If *sigma* exceeds ``k0`` or does not exceed ``sigma_floor * k0``.
    """
    sig = np.asarray(sigma, dtype=np.float64)
    level = sig / p.k0
    if not np.all(np.isfinite(level)):
        raise DomainError("stress must be finite")
    if np.any(level > 1.0 + tol):
        raise OutOfRangeError(
            f"stress above k0 = {p.k0} lies outside the constitutive range"
        )
    if np.any(level <= sigma_floor):
        raise OutOfRangeError(
            f"stress at or below {sigma_floor:g} * k0 maps to s -> infinity"
        )

    flat = np.minimum(level.ravel(), 1.0)
    out = _invert(flat, p.alpha, tol, ml)
    return _wrap(p.tau0 * out.reshape(level.shape), sigma)


# }}}


# {{{ energy integrals


def _tail_square_integral(alpha: float, x0: float) -> float:
    """Integral of ``E_alpha(-t^alpha)^2`` over ``[x0, inf)`` from the expansion."""
    if alpha == 1.0:
        return 0.5 * math.exp(-2.0 * x0)

    k = np.arange(1, 400)
    ak = alpha * k
    # |1/Gamma(1 - a k)| <= Gamma(a k) / pi bounds every term
    log_envelope = special.gammaln(ak) - ak * math.log(x0)
    # optimal truncation, or earlier once terms are negligible
    stop = int(np.argmin(log_envelope))
    negligible = np.flatnonzero(log_envelope < log_envelope[0] + math.log(1.0e-18))
    if negligible.size:
        stop = min(stop, int(negligible[0]))
    k, ak = k[:stop], ak[:stop]

    terms = (-1.0) ** (k + 1) * special.rgamma(1.0 - ak) * x0 ** (-ak)
    expo = ak[:, None] + ak[None, :]
    return float(x0 * np.sum(np.outer(terms, terms) / (expo - 1.0)))


def _relax_squared(alpha: float, ml: MLConfig):
    def f(t: np.ndarray) -> np.ndarray:
        return np.asarray(ml_relax(alpha, t, ml)) ** 2

    return f


def _breakpoints(lower: float, upper: float) -> np.ndarray:
    # dyadic grading toward the t^alpha singularity at 0, unit panels after 1
    dyadic = 2.0 ** -np.arange(60, 0, -1)
    units = np.arange(1.0, math.floor(upper) + 1.0)
    pts = np.concatenate([[lower, upper], dyadic, units])
    return np.unique(pts[(pts >= lower) & (pts <= upper)])


def _normalized_energy(
    alpha: float, x: np.ndarray, q: QuadratureConfig, ml: MLConfig
) -> np.ndarray:
    r"""Normalized energy :math:`\int_x^\infty E_\alpha(-t^\alpha)^2 dt` at each *x*."""
    x = np.asarray(x, dtype=np.float64)
    flat = x.ravel()
    out = np.empty_like(flat)
    T = q.tail_start

    far = flat >= T
    for i in np.flatnonzero(far):
        out[i] = _tail_square_integral(alpha, float(flat[i]))

    near = ~far
    if np.any(near):
        targets = np.unique(flat[near])
        edges = np.unique(np.concatenate([_breakpoints(float(targets[0]), T), targets]))
        pieces = interval_integrals(
            _relax_squared(alpha, ml),
            edges,
            rel_tol=q.rel_tol,
            abs_tol=q.abs_tol,
            max_subdivisions=q.max_subdivisions,
        )
        # suffix sums: integral from each edge up to T
        suffix = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
        tail = _tail_square_integral(alpha, T)
        idx = np.searchsorted(edges, flat[near])
        out[near] = suffix[idx] + tail

    return out.reshape(x.shape)


@functools.lru_cache(maxsize=64)
def _square_integral_total(alpha: float, q: QuadratureConfig, ml: MLConfig) -> float:
    value = float(_normalized_energy(alpha, np.zeros(1), q, ml)[0])

    doubled = QuadratureConfig(
        rel_tol=q.rel_tol,
        abs_tol=q.abs_tol,
        tail_start=2.0 * q.tail_start,
        max_subdivisions=q.max_subdivisions,
    )
    check = float(_normalized_energy(alpha, np.zeros(1), doubled, ml)[0])
    if abs(check - value) > q.rel_tol * abs(value):
        raise ConvergenceError(
            f"tail model unstable: tail_start={q.tail_start} gives {value!r}, "
            f"tail_start={doubled.tail_start} gives {check!r}"
        )
    return value


def e0_constant(
    p: MaterialParams, q: QuadratureConfig = DEFAULT_QUAD, ml: MLConfig = DEFAULT_ML
) -> float:
    """Energy constant making the viscous energy vanish as ``sigma -> 0``.

    Equals ``k0**2 / (rho_star * mu0)`` times the integral of
    ``E_alpha(-(s/tau0)^alpha)**2`` over ``[0, inf)``. For ``alpha = 1`` this
    is ``tau0 * k0**2 / (2 * rho_star * mu0)``.

    Raises
    ------
    NonIntegrableError
        For ``alpha <= 1/2``.
    ConvergenceError
        If the result changes by more than ``q.rel_tol`` when the tail start
        is doubled, or the quadrature does not converge.
    """
    _require_integrable(p.alpha)
    return p.energy_scale * _square_integral_total(p.alpha, q, ml)


def viscous_energy_param(
    s: Any,
    p: MaterialParams,
    q: QuadratureConfig = DEFAULT_QUAD,
    ml: MLConfig = DEFAULT_ML,
) -> Any:
    """Viscous energy at parameter value(s) *s* along the constitutive curve.

    Array input is integrated once over the sorted union of the requested
    points, so sampling a curve costs a single pass.
    """
    _require_integrable(p.alpha)
    ss = _as_times(s)
    if np.all(ss == 0.0):
        return _wrap(np.full(ss.shape, e0_constant(p, q, ml)), s)
    return _wrap(p.energy_scale * _normalized_energy(p.alpha, ss / p.tau0, q, ml), s)


def viscous_energy(
    sigma: Any,
    p: MaterialParams,
    q: QuadratureConfig = DEFAULT_QUAD,
    tol: float = 1.0e-13,
    ml: MLConfig = DEFAULT_ML,
) -> Any:
    """Viscous energy as a function of stress in ``[0, k0]``.

    ``viscous_energy(0)`` is exactly zero, the limit value for the chosen
    energy constant. Positive stresses are mapped to *s* with
    :func:`s_of_sigma`, so they must exceed the inversion floor.
    """
    _require_integrable(p.alpha)
    sig = np.asarray(sigma, dtype=np.float64)
    if np.any(sig < 0.0) or np.any(sig > p.k0 * (1.0 + tol)):
        raise OutOfRangeError(f"stress must lie in [0, k0 = {p.k0}]")

    flat = sig.ravel()
    out = np.zeros_like(flat)
    pos = flat > 0.0
    if np.any(pos):
        s = np.atleast_1d(s_of_sigma(flat[pos], p, tol, ml=ml))
        out[pos] = viscous_energy_param(s, p, q, ml)
    return _wrap(out.reshape(sig.shape), sigma)


# }}}


# {{{ relaxation time


def relaxation_time(s: Any, p: MaterialParams, ml: MLConfig = DEFAULT_ML) -> Any:
    """Nonlinear relaxation time along the curve, as a function of *s*.

    Vanishes at ``s = 0`` for ``alpha < 1``, equals ``tau0`` identically for
    ``alpha = 1``, and grows like ``s / alpha`` as ``s -> inf``.
    """
    ss = _as_times(s)
    x = ss.ravel() / p.tau0
    out = np.empty_like(x)

    if p.alpha == 1.0:
        out[:] = p.tau0
        return _wrap(out.reshape(ss.shape), s)

    zero = x == 0.0
    out[zero] = 0.0
    pos = ~zero
    if np.any(pos):
        xp = x[pos]
        out[pos] = -p.tau0 * np.asarray(ml_relax(p.alpha, xp, ml)) / np.asarray(
            ml_relax_deriv(p.alpha, xp, ml)
        )
    return _wrap(out.reshape(ss.shape), s)


def relaxation_time_of_sigma(
    sigma: Any,
    p: MaterialParams,
    tol: float = 1.0e-13,
    *,
    sigma_floor: float = SIGMA_FLOOR,
    ml: MLConfig = DEFAULT_ML,
) -> Any:
    """Nonlinear relaxation time as a function of stress.

    Positive on ``(0, k0)``, zero at ``k0`` (for ``alpha < 1``) and divergent
    as ``sigma -> 0``. Stresses within a factor 1000 of the inversion floor
    return a large finite value and emit a :class:`DivergenceWarning`.
    """
    sig = np.asarray(sigma, dtype=np.float64)
    s = s_of_sigma(sig, p, tol, sigma_floor=sigma_floor, ml=ml)
    if np.any(sig <= _NEAR_FLOOR * sigma_floor * p.k0):
        warnings.warn(
            f"relaxation time evaluated within {_NEAR_FLOOR:g}x of the stress floor; "
            "it diverges as sigma -> 0",
            DivergenceWarning,
            stacklevel=2,
        )
    return _wrap(np.asarray(relaxation_time(s, p, ml)), sigma)


# }}}


def sample_energy_and_tau(
    p: MaterialParams,
    sigma_over_k0: Any,
    q: QuadratureConfig = DEFAULT_QUAD,
    tol: float = 1.0e-13,
    ml: MLConfig = DEFAULT_ML,
) -> tuple[EnergyCurve, TauCurve]:
    """Sample the normalized viscous energy and relaxation time.

    Returns curves of ``ebar = rho_star * mu0 / (tau0 * k0**2) * e_V`` and
    ``tau / tau0`` on the given grid of ``sigma / k0`` values in ``(0, 1]``.
    """
    _require_integrable(p.alpha)
    grid = np.asarray(sigma_over_k0, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("stress grid must be a nonempty 1d array")
    if np.any(grid <= 0.0) or np.any(grid > 1.0):
        raise OutOfRangeError("stress grid must lie in (0, 1]")

    s = np.atleast_1d(s_of_sigma(grid * p.k0, p, tol, ml=ml))
    x = s / p.tau0
    ebar = _normalized_energy(p.alpha, x, q, ml)
    tau_bar = np.asarray(relaxation_time(s, p, ml)) / p.tau0

    energy = EnergyCurve(grid, ebar, quantity="viscous_energy", params=p)
    tau = TauCurve(grid, tau_bar, quantity="relaxation_time", params=p)
    return energy, tau
