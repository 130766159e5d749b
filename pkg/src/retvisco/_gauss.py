"""Vectorized adaptive composite Gauss-Legendre quadrature."""

from __future__ import annotations

from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from retvisco.errors import ConvergenceError

_LO = leggauss(10)
_HI = leggauss(20)


def _rule(a: np.ndarray, b: np.ndarray, rule: tuple[np.ndarray, np.ndarray]):
    nodes, weights = rule
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    return mid + half * nodes, half * weights


def interval_integrals(
    f: Callable[[np.ndarray], np.ndarray],
    breakpoints: np.ndarray,
    *,
    rel_tol: float,
    abs_tol: float,
    max_subdivisions: int,
) -> np.ndarray:
    """Integrate *f* over each interval between consecutive *breakpoints*.

    Each panel is estimated with 10- and 20-point Gauss-Legendre rules and
    bisected until the two agree to ``max(rel_tol * |I|, abs_tol * width /
    total_width)``. All pending panels are evaluated in one call to *f*.

    Returns
    -------
    numpy.ndarray
        One integral per interval, ``len(breakpoints) - 1`` entries.
    """
    edges = np.asarray(breakpoints, dtype=np.float64)
    if edges.size < 2:
        return np.zeros(0)

    total_width = edges[-1] - edges[0]
    result = np.zeros(edges.size - 1)

    a, b = edges[:-1], edges[1:]
    owner = np.arange(edges.size - 1)
    npanels = a.size
    while a.size:
        x_lo, w_lo = _rule(a, b, _LO)
        x_hi, w_hi = _rule(a, b, _HI)
        values = f(np.concatenate([x_lo.ravel(), x_hi.ravel()]))
        f_lo = values[: x_lo.size].reshape(x_lo.shape)
        f_hi = values[x_lo.size :].reshape(x_hi.shape)

        i_lo = np.sum(w_lo * f_lo, axis=1)
        i_hi = np.sum(w_hi * f_hi, axis=1)
        bound = np.maximum(rel_tol * np.abs(i_hi), abs_tol * (b - a) / total_width)
        done = np.abs(i_hi - i_lo) <= bound

        np.add.at(result, owner[done], i_hi[done])

        a, b, owner = a[~done], b[~done], owner[~done]
        if not a.size:
            break

        npanels += a.size
        if npanels > max_subdivisions:
            raise ConvergenceError(
                f"quadrature exceeded {max_subdivisions} subdivisions; "
                f"{a.size} panels unresolved near x = {a[0]:.6e}"
            )

        mid = 0.5 * (a + b)
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
        owner = np.concatenate([owner, owner])

    return result
