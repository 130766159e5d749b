from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

import oracles
from retvisco import mittag_leffler
from retvisco.errors import ConvergenceError, DomainError, SingularPointError
from retvisco.mittag_leffler import (
    MLConfig,
    MLPoint,
    ml_one,
    ml_relax,
    ml_relax_deriv,
    ml_two,
)

# values from tests/oracles.py (mpmath series, 40+ digits)
E_06_AT_M1 = 0.4133273409431063
E_06_06_AT_M1 = 0.17110228338391675
RELAX_06_AT_10 = 0.12011304499569668
DERIV_06_AT_50 = -0.0005481552909584976


def rel_err(a, b):
    return abs(a - b) / abs(b)


# {{{ examples


def test_exponential_cases():
    assert ml_one(1.0, -1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert ml_two(1.0, 1.0, -2.0) == pytest.approx(math.exp(-2.0), rel=1e-15)
    assert ml_relax(1.0, math.log(2.0)) == pytest.approx(0.5, rel=1e-15)
    assert ml_relax_deriv(1.0, 1.0) == pytest.approx(-math.exp(-1.0), rel=1e-15)


@pytest.mark.parametrize("alpha", [0.3, 0.6, 1.0])
def test_value_at_origin(alpha):
    assert ml_one(alpha, 0.0) == 1.0
    assert ml_relax(alpha, 0.0) == 1.0


def test_two_parameter_origin():
    assert ml_two(0.5, 0.5, 0.0) == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-15)


def test_frozen_oracle_values():
    assert rel_err(ml_one(0.6, -1.0), E_06_AT_M1) <= 1e-14
    assert rel_err(ml_two(0.6, 0.6, -1.0), E_06_06_AT_M1) <= 1e-14
    assert rel_err(ml_relax(0.6, 10.0), RELAX_06_AT_10) <= 1e-13
    assert rel_err(ml_relax_deriv(0.6, 50.0), DERIV_06_AT_50) <= 1e-13


def test_large_argument_leading_terms():
    x = 10.0
    lead = x**-0.6 / math.gamma(0.4)
    assert rel_err(RELAX_06_AT_10, lead) <= 0.15
    assert rel_err(ml_relax(0.6, x), lead) <= 0.15

    x = 50.0
    lead = -math.sin(0.6 * math.pi) * math.gamma(1.6) / math.pi * x**-1.6
    assert rel_err(ml_relax_deriv(0.6, x), lead) <= 0.10


def test_derivative_diverges_at_origin():
    assert abs(ml_relax_deriv(0.6, 1e-8)) > 1e3
    assert ml_relax_deriv(0.6, 1e-8) < 0.0
    with pytest.raises(SingularPointError):
        ml_relax_deriv(0.6, 0.0)
    assert ml_relax_deriv(1.0, 0.0) == -1.0


# }}}


# {{{ domain and configuration errors


@pytest.mark.parametrize("z", [math.nan, math.inf, -math.inf, 0.5])
def test_rejects_bad_argument(z):
    with pytest.raises(DomainError):
        ml_one(0.6, z)


@pytest.mark.parametrize("alpha", [0.0, -0.5, 1.5, math.nan])
def test_rejects_bad_order(alpha):
    with pytest.raises(DomainError):
        ml_one(alpha, -1.0)


def test_rejects_bad_beta_and_negative_time():
    with pytest.raises(DomainError):
        ml_two(0.6, 0.0, -1.0)
    with pytest.raises(DomainError):
        ml_relax(0.6, -1.0)
    with pytest.raises(DomainError):
        ml_relax_deriv(0.6, -1.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"series_tol": 0.0},
        {"series_tol": 1e-6},
        {"crossover": 0.0},
        {"max_terms": 49},
    ],
)
def test_config_invariants(kwargs):
    with pytest.raises(DomainError):
        MLConfig(**kwargs)


def test_series_misconfiguration_is_reported():
    cfg = MLConfig(crossover=1000.0, max_terms=50)
    with pytest.raises(ConvergenceError, match="crossover"):
        ml_one(0.6, -200.0, cfg)


def test_point_type():
    assert MLPoint(0.6, 1.0, -1.0).evaluate() == pytest.approx(E_06_AT_M1, rel=1e-14)
    with pytest.raises(DomainError):
        MLPoint(0.6, 1.0, 1.0)
    with pytest.raises(DomainError):
        MLPoint(0.6, -1.0, -1.0)


def test_shapes():
    z = -np.linspace(0.0, 8.0, 12).reshape(3, 4)
    out = ml_one(0.7, z)
    assert isinstance(out, np.ndarray) and out.shape == (3, 4)
    assert isinstance(ml_one(0.7, -2.0), float)
    assert np.allclose(out.ravel(), [ml_one(0.7, v) for v in z.ravel()], rtol=1e-15, atol=0)


# }}}


# {{{ accuracy against the extended-precision series


Z_GRID = [0.0, -0.01, -0.3, -0.99, -1.0, -1.01, -2.0, -3.3, -4.0, -5.0]


@pytest.mark.parametrize("alpha", [0.51, 0.6, 0.75, 0.9, 0.95, 1.0])
@pytest.mark.parametrize("beta", [1.0, "alpha", 0.3, 1.7, 2.5])
def test_against_series_oracle(alpha, beta):
    beta = alpha if beta == "alpha" else beta
    values = np.asarray(ml_two(alpha, beta, np.array(Z_GRID)))
    for z, v in zip(Z_GRID, values):
        ref = float(oracles.ml_series(alpha, beta, z))
        assert rel_err(v, ref) <= 1e-10, (alpha, beta, z)


@pytest.mark.parametrize("alpha", [0.3, 0.55, 0.8])
@pytest.mark.parametrize("x", [20.0, 1e2, 1e3, 1e5])
def test_large_argument_against_laplace_oracle(alpha, x):
    assert rel_err(ml_relax(alpha, x), oracles.ml_relax_laplace(alpha, x)) <= 1e-12


@pytest.mark.parametrize("alpha", [0.75, 0.9, 0.95])
def test_regimes_agree_in_overlap_band(alpha):
    # the series is well conditioned on |z| in [4, 6] only for larger alpha
    z = -np.linspace(4.0, 6.0, 9)
    series = np.asarray(ml_one(alpha, z, MLConfig(crossover=10.0)))
    integral = np.asarray(ml_one(alpha, z, MLConfig(crossover=0.5)))
    assert np.max(np.abs(series - integral) / np.abs(integral)) <= 1e-9


@pytest.mark.parametrize("alpha", [0.51, 0.6, 0.75, 0.9, 0.99])
@pytest.mark.parametrize("beta", [1.0, "alpha"])
def test_regimes_agree_at_default_seam(alpha, beta):
    beta = alpha if beta == "alpha" else beta
    z = -np.linspace(0.5, 1.5, 11)
    series = np.asarray(ml_two(alpha, beta, z, MLConfig(crossover=10.0)))
    integral = np.asarray(ml_two(alpha, beta, z, MLConfig(crossover=0.1)))
    assert np.max(np.abs(series - integral) / np.abs(integral)) <= 1e-12


@pytest.mark.parametrize("alpha", [0.93, 0.97, 0.99, 0.999, 0.99999])
@pytest.mark.parametrize("beta", [1.0, "alpha", 0.3, 1.7])
def test_orders_near_one_against_series_oracle(alpha, beta):
    beta = alpha if beta == "alpha" else beta
    z = np.array([-1.01, -2.0, -3.3, -5.0])
    values = np.asarray(ml_two(alpha, beta, z))
    for zi, v in zip(z, values):
        ref = float(oracles.ml_series(alpha, beta, zi))
        assert rel_err(v, ref) <= 1e-10, (alpha, beta, zi)


@pytest.mark.parametrize("alpha", [0.9, 0.95])
@pytest.mark.parametrize("beta", [1.0, "alpha"])
def test_shifted_contour_matches_real_line(monkeypatch, alpha, beta):
    beta = alpha if beta == "alpha" else beta
    x = np.geomspace(1.01, 1e4, 40)
    monkeypatch.setattr(mittag_leffler, "_SHIFT_ABOVE", 0.0)
    shifted = np.asarray(ml_two(alpha, beta, -x))
    monkeypatch.setattr(mittag_leffler, "_SHIFT_ABOVE", 1.0)
    real_line = np.asarray(ml_two(alpha, beta, -x))
    assert np.max(np.abs(shifted - real_line) / np.abs(real_line)) <= 1e-13


def test_beta_one_matches_one_parameter_function():
    z = -np.linspace(0.0, 30.0, 50)
    assert np.array_equal(ml_two(0.6, 1.0, z), ml_one(0.6, z))


@pytest.mark.parametrize("z", [0.0, -0.5, -1.0, -7.5, -20.0])
def test_exponential_reduction(z):
    assert rel_err(ml_one(1.0, z), math.exp(z)) <= 1e-12


def test_exponential_reduction_dense():
    z = -np.linspace(0.0, 20.0, 401)
    assert np.max(np.abs(ml_one(1.0, z) - np.exp(z)) / np.exp(z)) <= 1e-12


# }}}


# {{{ qualitative properties


@pytest.mark.parametrize("alpha", [0.55, 0.6, 0.75, 0.9, 1.0])
def test_complete_monotonicity_sample(alpha):
    x = np.geomspace(1e-4, 1e4, 161)
    f = np.asarray(ml_relax(alpha, x))
    if alpha == 1.0:
        # exp(-x) underflows past x ~ 745
        keep = f > 1e-280
        x, f = x[keep], f[keep]
    assert np.all(f > 0.0) and np.all(f <= 1.0)

    d1 = np.diff(f) / np.diff(x)
    mid = 0.5 * (x[1:] + x[:-1])
    d2 = np.diff(d1) / np.diff(mid)
    assert np.all(d1 < 0.0)
    assert np.all(d2 > 0.0)


@pytest.mark.parametrize("alpha", [0.55, 0.6, 0.75, 0.9, 1.0])
def test_derivative_matches_finite_differences(alpha):
    x = np.geomspace(0.1, 10.0, 41)
    h = x * np.cbrt(np.finfo(float).eps)
    fd = (np.asarray(ml_relax(alpha, x + h)) - np.asarray(ml_relax(alpha, x - h))) / (2 * h)
    exact = np.asarray(ml_relax_deriv(alpha, x))
    assert np.all(exact < 0.0)
    assert np.max(np.abs(fd - exact) / np.abs(exact)) <= 1e-6


@pytest.mark.parametrize("alpha", [0.75, 0.9, 1.0])
def test_small_argument_branch(alpha):
    x = 1e-3
    approx = 1.0 - x**alpha / special.gamma(1.0 + alpha)
    assert rel_err(ml_relax(alpha, x), approx) <= 1e-4


@pytest.mark.parametrize("alpha", [0.51, 0.6, 0.75, 0.9])
def test_small_argument_remainder_is_next_term(alpha):
    # below alpha ~ 0.7 the remainder x^(2 alpha) / Gamma(2 alpha + 1) alone
    # exceeds 1e-4 at x = 1e-3, so compare against it instead
    x = 1e-3
    approx = 1.0 - x**alpha / special.gamma(1.0 + alpha)
    remainder = ml_relax(alpha, x) - approx
    next_term = x ** (2 * alpha) / special.gamma(1.0 + 2 * alpha)
    assert rel_err(remainder, next_term) <= 0.05


@pytest.mark.parametrize("alpha", [0.51, 0.6, 0.75, 0.9])
def test_large_argument_branch_improves(alpha):
    xs = [1e2, 1e3, 1e4]
    dev = [rel_err(ml_relax(alpha, x), x**-alpha / special.gamma(1.0 - alpha)) for x in xs]
    assert dev[0] > dev[1] > dev[2]


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.floats(0.3, 1.0),
    x1=st.floats(0.0, 1e4, allow_subnormal=False),
    x2=st.floats(0.0, 1e4, allow_subnormal=False),
)
def test_property_bounded_and_monotone(alpha, x1, x2):
    lo, hi = sorted((x1, x2))
    f_lo, f_hi = ml_relax(alpha, lo), ml_relax(alpha, hi)
    assert 0.0 <= f_hi <= f_lo <= 1.0


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(0.3, 0.99), z=st.floats(-5.0, 0.0))
def test_property_matches_oracle(alpha, z):
    assert rel_err(ml_one(alpha, z), float(oracles.ml_series(alpha, 1.0, z))) <= 1e-10


# }}}
