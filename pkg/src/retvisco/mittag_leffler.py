r"""Mittag-Leffler functions on the nonpositive real axis.

Evaluates

.. math::

    E_{\alpha,\beta}(z) = \sum_{k=0}^\infty \frac{z^k}{\Gamma(\alpha k + \beta)},
    \qquad 0 < \alpha \le 1, \quad \beta > 0, \quad z \le 0,

together with the relaxation function :math:`E_\alpha(-x^\alpha)` and its
derivative :math:`-x^{\alpha - 1} E_{\alpha,\alpha}(-x^\alpha)`.

Two evaluation regimes are used:

* ``|z| <= crossover``: the power series, summed in double precision. For
  ``|z| <= 1`` the terms never exceed the first one, so there is no
  cancellation.
* ``|z| > crossover``: the integral representation (valid for
  ``|arg z| > alpha * pi`` and ``beta < 1 + alpha``)

  .. math::

      E_{\alpha,\beta}(-x) = \frac{1}{\alpha\pi} \int_0^\infty
          \chi^{(1-\beta)/\alpha} e^{-\chi^{1/\alpha}}
          \frac{\chi \sin\pi(1-\beta) + x \sin\pi(1-\beta+\alpha)}
               {\chi^2 + 2\chi x \cos\alpha\pi + x^2} \, d\chi,

  discretized by the trapezoidal rule in :math:`y = \log\chi`. The
  integrand has poles at :math:`y = \log x \pm i\pi(1-\alpha)` and is
  bounded for :math:`|\mathrm{Im}\, y| \le \alpha\pi/2`, so the rule
  converges geometrically with a step chosen from the width of the
  pole-free strip. As ``alpha -> 1`` the poles approach the real axis; for
  ``alpha > 12/13`` the line of integration is moved above the pole and its
  residue added, which keeps the step independent of ``alpha``. Larger
  ``beta`` is brought into range with
  :math:`E_{\alpha,\beta}(z) = (E_{\alpha,\beta-\alpha}(z) - 1/\Gamma(\beta-\alpha))/z`.

For ``alpha = 1`` the function is the exponential (``beta = 1``) or an
incomplete-gamma type integral, handled separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import integrate, special

from retvisco.errors import ConvergenceError, DomainError, SingularPointError

__all__ = [
    "MLConfig",
    "MLPoint",
    "DEFAULT_ML",
    "ml_one",
    "ml_two",
    "ml_relax",
    "ml_relax_deriv",
]

# elements per (x, y) block in the trapezoidal sum
_BLOCK = 1 << 21
# above this order the shifted contour beats the cost of complex arithmetic
_SHIFT_ABOVE = 12.0 / 13.0


@dataclass(frozen=True)
class MLConfig:
    """Accuracy and regime controls for Mittag-Leffler evaluation.

    Attributes
    ----------
    series_tol
        Relative truncation tolerance. Also sets the target accuracy of the
        integral representation.
    crossover
        ``|z|`` above which the integral representation replaces the series.
    max_terms
        Maximum number of series terms before giving up.
    """

    series_tol: float = 1.0e-15
    crossover: float = 1.0
    max_terms: int = 500

    def __post_init__(self) -> None:
        if not (0.0 < self.series_tol < 1.0e-6):
            raise DomainError(f"series_tol must lie in (0, 1e-6): {self.series_tol}")
        if not self.crossover > 0.0:
            raise DomainError(f"crossover must be positive: {self.crossover}")
        if self.max_terms < 50:
            raise DomainError(f"max_terms must be at least 50: {self.max_terms}")


DEFAULT_ML = MLConfig()


@dataclass(frozen=True)
class MLPoint:
    """A validated evaluation point ``(alpha, beta, z)``."""

    alpha: float
    beta: float
    z: float

    def __post_init__(self) -> None:
        _check_order(self.alpha)
        _check_beta(self.beta)
        if not math.isfinite(self.z):
            raise DomainError(f"argument must be finite: {self.z}")
        if self.z > 0.0:
            raise DomainError(f"argument must be nonpositive: {self.z}")

    def evaluate(self, cfg: MLConfig = DEFAULT_ML) -> float:
        return float(ml_two(self.alpha, self.beta, self.z, cfg))


# {{{ validation


def _check_order(alpha: float) -> None:
    if not (math.isfinite(alpha) and 0.0 < alpha <= 1.0):
        raise DomainError(f"order alpha must lie in (0, 1]: {alpha}")


def _check_beta(beta: float) -> None:
    if not (math.isfinite(beta) and beta > 0.0):
        raise DomainError(f"parameter beta must be positive: {beta}")


def _as_argument(z: Any) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise DomainError("argument must be finite")
    if np.any(z > 0.0):
        raise DomainError("argument must be nonpositive")
    return z


def _wrap(result: np.ndarray, like: Any) -> Any:
    return float(result) if np.ndim(like) == 0 else result


# }}}


# {{{ series


def _series(alpha: float, beta: float, z: np.ndarray, cfg: MLConfig) -> np.ndarray:
    zmax = float(np.max(-z)) if z.size else 0.0
    if zmax == 0.0:
        return np.full(z.shape, special.rgamma(beta))

    # pick the truncation from term magnitudes at the largest |z|
    k = np.arange(cfg.max_terms)
    arg = alpha * k + beta
    logmag = k * math.log(zmax) - special.gammaln(arg)
    peak = int(np.argmax(logmag))
    small = np.flatnonzero(logmag[peak:] < logmag[0] + math.log(cfg.series_tol) - 7.0)
    if not small.size:
        raise ConvergenceError(
            f"Mittag-Leffler series did not converge in {cfg.max_terms} terms "
            f"for |z| up to {zmax:.3e}; lower MLConfig.crossover"
        )
    n = peak + int(small[0]) + 1
    k, arg = k[:n], arg[:n]

    direct = arg < 150.0
    terms = np.empty((z.size, n))
    terms[:, direct] = z[:, None] ** k[direct] * special.rgamma(arg[direct])
    if not np.all(direct):
        logx = np.log(np.where(z == 0.0, 1.0, -z))[:, None]
        kk = k[~direct]
        big = (-1.0) ** kk * np.exp(kk * logx - special.gammaln(arg[~direct]))
        terms[:, ~direct] = np.where(z[:, None] == 0.0, 0.0, big)

    return np.sum(terms, axis=1)


# }}}


# {{{ integral representation


def _trapezoid(alpha: float, beta: float, x: np.ndarray, cfg: MLConfig) -> np.ndarray:
    """Integral representation for ``0 < alpha < 1``, ``0 < beta <= 1``, ``x > 0``."""
    eps = 0.1 * cfg.series_tol
    # the denominator vanishes at y = log(x) +- i theta; exp(-chi^(1/alpha))
    # stays bounded only for |Im y| <= alpha pi / 2
    theta = math.pi * (1.0 - alpha)
    top = 0.5 * math.pi * alpha
    # sin and cos with arguments formed exactly, so nothing degrades as alpha -> 1
    s1 = math.sin(math.pi * (1.0 - beta))
    s2 = math.sin(math.pi * (beta - alpha))
    c = -math.cos(theta)

    if alpha > _SHIFT_ABOVE:
        # poles close to the real axis: integrate along Im y = shift, midway
        # between the pole and the growth limit, and add the pole residue
        shift = 0.5 * (theta + top)
        strip = 0.5 * (top - theta)
        budget = math.log(1.0 / eps) + 2.0
    else:
        shift = 0.0
        strip = min(theta, top)
        # the pole residue grows like 1/sin(alpha pi) relative to the value
        budget = math.log(1.0 / eps) + math.log(1.0 / math.sin(theta)) + 2.0
    h = 2.0 * math.pi * (0.9 * strip) / budget

    p = (1.0 - beta) / alpha
    decay = math.log(1.0 / eps) + 10.0
    ymax = alpha * math.log(decay / math.cos(shift / alpha))
    ymin = min(math.log(np.min(x)), 0.0) - (math.log(1.0 / eps) + 5.0) / (p + 1.0)
    # np.arange drifts by ~1e-11 over long ranges, spoiling the equal spacing
    y = ymin + h * np.arange(int(math.ceil((ymax - ymin) / h)) + 1)

    w = y + 1j * shift if shift else y
    chi = np.exp(w)
    weight = np.exp((p + 1.0) * w - np.exp(w / alpha))

    out = np.empty_like(x)
    rows = max(1, _BLOCK // y.size)
    for i in range(0, x.size, rows):
        xi = x[i : i + rows, None]
        num = chi * s1 + xi * s2
        den = chi * chi + 2.0 * c * chi * xi + xi * xi
        out[i : i + rows] = (h * np.sum(weight * num / den, axis=1)).real

    if shift:
        # residue in y at log(x) + i theta of
        # G(chi) / ((chi - x e^{i theta}) (chi - x e^{-i theta}))
        wp = np.log(x) + 1j * theta
        residue = (
            np.exp(p * wp - np.exp(wp / alpha))
            * (np.exp(wp) * s1 + x * s2)
            / (2j * x * math.sin(theta))
        )
        out -= 2.0 * math.pi * residue.imag

    return out / (alpha * math.pi)


def _alpha_one(beta: float, x: np.ndarray, cfg: MLConfig) -> np.ndarray:
    if beta == 1.0:
        return np.exp(-x)

    if beta < 1.0:
        return special.rgamma(beta) - x * _alpha_one(beta + 1.0, x, cfg)

    # E_{1,b}(-x) = int_0^1 exp(-x u) (1 - u)^(b - 2) du / Gamma(b - 1)
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        val, _ = integrate.quad(
            lambda u, xi=xi: math.exp(-xi * u),
            0.0,
            1.0,
            weight="alg",
            wvar=(0.0, beta - 2.0),
            epsabs=0.0,
            epsrel=max(cfg.series_tol, 2.0e-14),
        )
        out[i] = val * special.rgamma(beta - 1.0)
    return out


def _large(alpha: float, beta: float, x: np.ndarray, cfg: MLConfig) -> np.ndarray:
    if alpha == 1.0:
        return _alpha_one(beta, x, cfg)

    if beta > 1.0:
        lower = _large(alpha, beta - alpha, x, cfg)
        return (special.rgamma(beta - alpha) - lower) / x

    return _trapezoid(alpha, beta, x, cfg)


# }}}


# {{{ public interface


def _evaluate(alpha: float, beta: float, z: np.ndarray, cfg: MLConfig) -> np.ndarray:
    if alpha == 1.0 and beta == 1.0:
        return np.exp(z)

    flat = z.ravel()
    out = np.empty_like(flat)
    small = -flat <= cfg.crossover
    if np.any(small):
        out[small] = _series(alpha, beta, flat[small], cfg)
    if not np.all(small):
        out[~small] = _large(alpha, beta, -flat[~small], cfg)

    return out.reshape(z.shape)


def ml_two(alpha: float, beta: float, z: Any, cfg: MLConfig = DEFAULT_ML) -> Any:
    """Two-parameter Mittag-Leffler function :math:`E_{\\alpha,\\beta}(z)`.

    Parameters
    ----------
    alpha
        Order in ``(0, 1]``.
    beta
        Second parameter, positive.
    z
        Nonpositive finite argument, scalar or array.

    Returns
    -------
    float or numpy.ndarray
        Values with the same shape as *z*.
    """
    _check_order(alpha)
    _check_beta(beta)
    zz = _as_argument(z)
    return _wrap(_evaluate(alpha, beta, zz, cfg), z)


def ml_one(alpha: float, z: Any, cfg: MLConfig = DEFAULT_ML) -> Any:
    """One-parameter Mittag-Leffler function :math:`E_\\alpha(z)`."""
    return ml_two(alpha, 1.0, z, cfg)


def _as_scaled_time(x: Any) -> np.ndarray:
    xx = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(xx)):
        raise DomainError("scaled time must be finite")
    if np.any(xx < 0.0):
        raise DomainError("scaled time must be nonnegative")
    return xx


def ml_relax(alpha: float, x: Any, cfg: MLConfig = DEFAULT_ML) -> Any:
    """Relaxation function :math:`E_\\alpha(-x^\\alpha)` for ``x >= 0``.

    Positive, completely monotone, equal to one at ``x = 0``.
    """
    _check_order(alpha)
    xx = _as_scaled_time(x)
    return _wrap(_evaluate(alpha, 1.0, -(xx**alpha), cfg), x)


def ml_relax_deriv(alpha: float, x: Any, cfg: MLConfig = DEFAULT_ML) -> Any:
    """Derivative of :func:`ml_relax` with respect to *x*.

    Computed as :math:`-x^{\\alpha-1} E_{\\alpha,\\alpha}(-x^\\alpha)`. The
    derivative is unbounded at ``x = 0`` when ``alpha < 1``, which raises
    :class:`~retvisco.errors.SingularPointError`.
    """
    _check_order(alpha)
    xx = _as_scaled_time(x)
    if alpha < 1.0 and np.any(xx == 0.0):
        raise SingularPointError(
            f"derivative of E_alpha(-x^alpha) diverges at x = 0 for alpha = {alpha}"
        )

    if alpha == 1.0:
        return _wrap(-np.exp(-xx), x)

    val = _evaluate(alpha, alpha, -(xx**alpha), cfg)
    return _wrap(-(xx ** (alpha - 1.0)) * val, x)


# }}}
