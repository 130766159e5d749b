r"""Caputo derivatives by the L1 scheme and the fractional Maxwell residual.

The L1 scheme replaces the sampled function by its piecewise linear
interpolant and differentiates that exactly:

.. math::

    D^\alpha f(t_n) \approx \frac{1}{\Gamma(2 - \alpha)} \sum_{j=1}^n
        \frac{f_j - f_{j-1}}{t_j - t_{j-1}}
        \left[(t_n - t_{j-1})^{1-\alpha} - (t_n - t_j)^{1-\alpha}\right].

The relaxation function has a :math:`t^{\alpha-1}` derivative singularity at
the origin, so the default mesh is graded, :math:`t_j = T (j/N)^r`.

On such a mesh the local truncation error at node ``j`` depends on ``j``
rather than on ``N`` near the origin: the first few nodes carry an
``O(1)`` relative error that refinement does not remove. Besides the
maximum over interior nodes, :func:`residual_fractional` therefore reports
the maximum over a fixed time window ``t >= window * tau0``, which converges
as ``N`` grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import special

from retvisco.constitutive import MaterialParams
from retvisco.errors import DomainError
from retvisco.relaxation import RelaxationCurve
from retvisco.report import VerificationReport, worst_of

__all__ = ["CaputoMesh", "caputo_l1", "residual_fractional"]

# matrix entries per block in the L1 history sum
_BLOCK = 1 << 22


@dataclass(frozen=True, eq=False)
class CaputoMesh:
    """Strictly increasing time nodes starting at zero.

    Attributes
    ----------
    nodes
        Time grid ``t_0 = 0 < t_1 < ... < t_N``.
    grading
        Exponent ``r >= 1`` of the graded construction; ``1`` is uniform.
    """

    nodes: np.ndarray
    grading: float = 1.0
    _steps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=np.float64)
        if nodes.ndim != 1 or nodes.size < 2:
            raise DomainError("a mesh needs at least 2 nodes")
        if nodes[0] != 0.0:
            raise DomainError(f"mesh must start at t = 0, not {nodes[0]}")
        steps = np.diff(nodes)
        if not np.all(steps > 0.0) or not np.all(np.isfinite(nodes)):
            raise DomainError("mesh nodes must be finite and strictly increasing")
        if not self.grading >= 1.0:
            raise DomainError(f"grading must be at least 1: {self.grading}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "_steps", steps)

    @classmethod
    def graded(cls, t_end: float, n: int, grading: float = 2.0) -> CaputoMesh:
        """Mesh ``t_j = t_end * (j / n)**grading`` for ``j = 0, ..., n``."""
        if not (t_end > 0.0 and n >= 1):
            raise DomainError("graded mesh needs t_end > 0 and n >= 1")
        j = np.arange(n + 1, dtype=np.float64)
        return cls(t_end * (j / n) ** grading, grading)

    @classmethod
    def uniform(cls, t_end: float, n: int) -> CaputoMesh:
        return cls.graded(t_end, n, 1.0)

    @property
    def size(self) -> int:
        """Number of intervals ``N``."""
        return self.nodes.size - 1

    @property
    def steps(self) -> np.ndarray:
        return self._steps


def _check_values(values: Any, mesh: CaputoMesh) -> np.ndarray:
    f = np.asarray(values, dtype=np.float64)
    if f.shape != mesh.nodes.shape:
        raise DomainError(
            f"values have shape {f.shape} but the mesh has {mesh.nodes.size} nodes"
        )
    return f


def caputo_l1(values: Any, mesh: CaputoMesh, alpha: float) -> np.ndarray:
    """L1 approximation of the Caputo derivative of order *alpha*.

    Parameters
    ----------
    values
        Samples ``f(t_j)`` at every mesh node.
    alpha
        Order in ``(0, 1)``.

    Returns
    -------
    numpy.ndarray
        Approximations at nodes ``t_1, ..., t_N`` (length ``N``).
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"L1 order must lie in (0, 1): {alpha}")
    f = _check_values(values, mesh)
    t = mesh.nodes
    slopes = np.diff(f) / mesh.steps
    expo = 1.0 - alpha

    n = mesh.size
    out = np.empty(n)
    rows = max(1, _BLOCK // t.size)
    for start in range(1, n + 1, rows):
        tn = t[start : start + rows, None]
        # (t_n - t_j)^(1 - alpha), zero for j >= n
        powers = np.maximum(tn - t[None, :], 0.0) ** expo
        out[start - 1 : start - 1 + tn.shape[0]] = (powers[:, :-1] - powers[:, 1:]) @ slopes

    return out / special.gamma(2.0 - alpha)


def residual_fractional(
    curve: RelaxationCurve,
    p: MaterialParams | None = None,
    mesh: CaputoMesh | None = None,
    tol: float = 1.0e-2,
    window: float = 1.0e-2,
) -> VerificationReport:
    r"""Residual of :math:`\sigma + \tau_0^\alpha D^\alpha \sigma = 0` along *curve*.

    The normalized residual ``|sigma + tau0^alpha D sigma| / sigma0`` is
    formed at every node ``t_1, ..., t_N`` with the L1 derivative (a
    backward difference for ``alpha = 1``). The check passes when its
    maximum over ``t_2, ..., t_N`` is at most *tol*. The first node, where
    the derivative of the exact solution is unbounded, is reported
    separately as ``first_node_residual``.

    Details also record ``window_residual``, the maximum over nodes with
    ``t >= window * tau0``, and ``min_residual`` over ``t_2, ..., t_N``.
    """
    if curve.kind == "upper_bound":
        raise DomainError("the residual applies to stress curves, not the upper bound")
    p = curve.params if p is None else p
    t = curve.times()
    if mesh is None:
        mesh = CaputoMesh(t)
    if mesh.nodes.shape != t.shape or not np.allclose(
        mesh.nodes, t, rtol=1.0e-12, atol=1.0e-15 * float(t[-1])
    ):
        raise DomainError("curve is not sampled on the given mesh")
    if mesh.size < 2:
        raise DomainError("the residual needs at least 2 interior nodes")

    sigma = curve.stress()
    alpha = p.alpha
    if alpha == 1.0:
        deriv = np.diff(sigma) / mesh.steps
    else:
        deriv = caputo_l1(sigma, mesh, alpha)
    res = np.abs(sigma[1:] + p.tau0**alpha * deriv) / curve.sigma0

    tn = mesh.nodes[1:] / p.tau0
    worst, loc = worst_of(res[1:], tn[1:])
    in_window = tn >= window
    window_res = float(np.max(res[in_window])) if np.any(in_window) else math.nan
    return VerificationReport(
        name=f"fractional_residual_{curve.kind}",
        passed=bool(worst <= tol),
        worst=worst,
        location=loc,
        tolerance=tol,
        details={
            "kind": curve.kind,
            "alpha": alpha,
            "sigma0": curve.sigma0,
            "intervals": mesh.size,
            "grading": mesh.grading,
            "first_node_residual": float(res[0]),
            "min_residual": float(np.min(res[1:])),
            "window_start_over_tau0": window,
            "window_residual": window_res,
        },
    )
