"""Nonlinear and fractional viscoelastic relaxation.

Mittag-Leffler evaluation, the viscous-energy constitutive law with its
nonlinear relaxation time, closed-form and integrated relaxation curves, and
checks of the relations between them.
"""

from __future__ import annotations

from retvisco.constitutive import (
    SIGMA_FLOOR,
    EnergyCurve,
    MaterialParams,
    QuadratureConfig,
    TauCurve,
    e0_constant,
    relaxation_time,
    relaxation_time_of_sigma,
    s_of_sigma,
    sample_energy_and_tau,
    sigma_of_s,
    viscous_energy,
    viscous_energy_param,
)
from retvisco.curves import SampledCurve, read_csv
from retvisco.errors import (
    ConvergenceError,
    DivergenceWarning,
    DomainError,
    NonIntegrableError,
    OutOfRangeError,
    RetViscoError,
    SingularPointError,
)
from retvisco.fractional_check import CaputoMesh, caputo_l1, residual_fractional
from retvisco.mittag_leffler import MLConfig, MLPoint, ml_one, ml_relax, ml_relax_deriv, ml_two
from retvisco.relaxation import (
    OdeConfig,
    RelaxationCurve,
    dissipation_check,
    offset_c,
    relaxation_curve,
    sigma_fractional,
    sigma_ret_closed,
    sigma_ret_ode,
    sigma_upper_bound,
    verify_theorem2_bounds,
)
from retvisco.report import VerificationReport

__all__ = [
    "SIGMA_FLOOR",
    "CaputoMesh",
    "ConvergenceError",
    "DivergenceWarning",
    "DomainError",
    "EnergyCurve",
    "MLConfig",
    "MLPoint",
    "MaterialParams",
    "NonIntegrableError",
    "OdeConfig",
    "OutOfRangeError",
    "QuadratureConfig",
    "RelaxationCurve",
    "RetViscoError",
    "SampledCurve",
    "SingularPointError",
    "TauCurve",
    "VerificationReport",
    "caputo_l1",
    "dissipation_check",
    "e0_constant",
    "ml_one",
    "ml_relax",
    "ml_relax_deriv",
    "ml_two",
    "offset_c",
    "read_csv",
    "relaxation_curve",
    "relaxation_time",
    "relaxation_time_of_sigma",
    "residual_fractional",
    "s_of_sigma",
    "sample_energy_and_tau",
    "sigma_fractional",
    "sigma_of_s",
    "sigma_ret_closed",
    "sigma_ret_ode",
    "sigma_upper_bound",
    "verify_theorem2_bounds",
    "viscous_energy",
    "viscous_energy_param",
]
