"""Acceptance criteria, one test per criterion.

Each test carries ``@pytest.mark.acceptance(number, title, limit)``; the hook
in ``conftest.py`` prints a PASS/FAIL line per criterion and fails a test
whose body exceeds the wall-clock limit. Reference values come from
fixtures so that their cost is not charged to the library.

Criterion 7 and the first-value bound of criterion 8 have a part that does
not hold for the exact solution at the stated tolerance. Those parts are
kept as strict xfails with the numbers that show the gap, next to the parts
that do hold.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import special

import oracles
from retvisco import constitutive
from retvisco.cli import main
from retvisco.config import GridConfig
from retvisco.constitutive import (
    MaterialParams,
    QuadratureConfig,
    e0_constant,
    relaxation_time_of_sigma,
    viscous_energy,
)
from retvisco.curves import read_csv
from retvisco.errors import NonIntegrableError
from retvisco.fractional_check import CaputoMesh, residual_fractional
from retvisco.mittag_leffler import ml_one, ml_relax
from retvisco.relaxation import (
    dissipation_check,
    offset_c,
    relaxation_curve,
    sigma_fractional,
    sigma_ret_closed,
    sigma_ret_ode,
    verify_theorem2_bounds,
)

ALPHAS = (0.6, 0.75, 0.9)
SCALED = dict(tau0=2.0, k0=3.0, rho_star=0.5, mu0=4.0)

# normalized e0 for alpha = 0.6, from the series oracle (tests/test_constitutive.py)
E0_NORMALIZED_06 = 1.3982317470720214


def rel_err(a, b):
    return np.abs(np.asarray(a) - np.asarray(b)) / np.abs(np.asarray(b))


@pytest.fixture
def cold_energy_cache():
    constitutive._square_integral_total.cache_clear()


# {{{ 1. Mittag-Leffler accuracy

ML_ALPHAS = tuple(round(0.51 + 0.01 * k, 2) for k in range(50))
ML_Z = np.linspace(-5.0, 0.0, 26)


@pytest.fixture(scope="module")
def series_reference():
    return {
        a: np.array([float(oracles.ml_series(a, 1.0, z)) for z in ML_Z]) for a in ML_ALPHAS
    }


@pytest.mark.acceptance(1, "Mittag-Leffler accuracy and large-argument branch", 5.0)
def test_criterion_1_mittag_leffler(series_reference):
    worst = max(float(np.max(rel_err(ml_one(a, ML_Z), series_reference[a]))) for a in ML_ALPHAS)
    print(f"worst relative error on z in [-5, 0]: {worst:.3e}")
    assert worst <= 1e-10

    xs = np.array([1e2, 1e3, 1e4])
    for alpha in (0.51, 0.6, 0.75, 0.9, 0.99):
        dev = rel_err(ml_relax(alpha, xs), xs**-alpha / special.gamma(1.0 - alpha))
        assert np.all(np.diff(dev) < 0.0), (alpha, dev)


# }}}


# {{{ 2. ordinary Maxwell limit


@pytest.mark.acceptance(2, "reduction to the ordinary Maxwell model at order one", 5.0)
def test_criterion_2_maxwell_reduction(cold_energy_cache):
    p = MaterialParams(alpha=1.0, **SCALED)
    sigma = np.linspace(0.01, 1.0, 100) * p.k0

    tau = relaxation_time_of_sigma(sigma, p)
    assert np.max(rel_err(tau, p.tau0)) <= 1e-10

    energy = viscous_energy(sigma, p)
    assert np.max(rel_err(energy, p.tau0 * sigma**2 / (2.0 * p.rho_mu))) <= 1e-8

    e0 = p.tau0 * p.k0**2 / (2.0 * p.rho_mu)
    assert rel_err(e0_constant(p), e0) <= 1e-8


# }}}


# {{{ 3. boundedness dichotomy


@pytest.mark.acceptance(3, "energy bounded exactly for orders above one half", 30.0)
def test_criterion_3_boundedness(cold_energy_cache):
    for alpha in (0.51, 0.6, 0.75, 0.9):
        p = MaterialParams(alpha=alpha)
        base = QuadratureConfig()
        doubled = QuadratureConfig(tail_start=2.0 * base.tail_start)
        e0 = e0_constant(p, base)
        assert math.isfinite(e0) and e0 > 0.0
        change = rel_err(e0_constant(p, doubled), e0)
        print(f"alpha={alpha}: e0={e0!r}, change under tail doubling {change:.2e}")
        assert change <= 1e-6

    for alpha in (0.3, 0.5):
        with pytest.raises(NonIntegrableError):
            e0_constant(MaterialParams(alpha=alpha))


# }}}


# {{{ 4. coincident solution


@pytest.mark.acceptance(4, "coincident solutions at full initial stress", 10.0)
def test_criterion_4_coincidence():
    grid = np.linspace(0.0, 100.0, 1001)
    for alpha in (*ALPHAS, 1.0):
        p = MaterialParams(alpha=alpha, **SCALED)
        t = grid * p.tau0
        closed = np.asarray(sigma_ret_closed(t, p.k0, p))
        frac = np.asarray(sigma_fractional(t, p.k0, p))
        assert np.max(rel_err(closed, frac)) <= 1e-12

    # the integrated equation for alpha < 1, started at the offset time
    for alpha in ALPHAS:
        p = MaterialParams(alpha=alpha)
        ode = sigma_ret_ode(grid, p.k0, p).stress()
        closed = np.asarray(sigma_ret_closed(grid * p.tau0, p.k0, p))
        frac = np.asarray(sigma_fractional(grid * p.tau0, p.k0, p))
        worst = max(float(np.max(rel_err(ode, closed))), float(np.max(rel_err(ode, frac))))
        print(f"alpha={alpha}: ODE against closed forms {worst:.2e}")
        assert worst <= 1e-6


# }}}


# {{{ 5. ordering of the two responses


@pytest.fixture(scope="module")
def ratio_estimate():
    # first-order estimate of sigma_R / sigma_F at t = 100 tau0 from the
    # oracle offset: (k0 / sigma0) (1 + c / t)^(-alpha)
    c = oracles.invert_relax(0.6, 0.5)
    return 2.0 * (1.0 + c / 100.0) ** -0.6


@pytest.mark.acceptance(5, "strict ordering of the fractional and nonlinear responses", 10.0)
def test_criterion_5_bounds(ratio_estimate):
    grid = GridConfig().bounds()
    assert grid.size == 400
    for alpha in ALPHAS:
        p = MaterialParams(alpha=alpha)
        for frac in (0.25, 0.5, 0.9):
            report = verify_theorem2_bounds(frac * p.k0, p, grid)
            assert report.passed, report.to_text()
            assert report.details["min_lower_margin"] > 0.0
            assert report.details["min_upper_margin"] > 0.0
            assert report.details["ratio_monotone"] == "true"

    report = verify_theorem2_bounds(0.5, MaterialParams(alpha=0.6), grid)
    ratio = report.details["ratio_at_end"]
    print(f"ratio at t = 100 tau0: {ratio!r} (estimate {ratio_estimate!r})")
    assert rel_err(ratio, 2.0) <= 0.02
    assert rel_err(ratio, ratio_estimate) <= 0.01


# }}}


# {{{ 6. energy balance


@pytest.mark.acceptance(6, "energy balance along the nonlinear relaxation curves", 10.0)
def test_criterion_6_dissipation(cold_energy_cache):
    grid = GridConfig().dissipation()
    reports = []
    for alpha in (*ALPHAS, 1.0):
        p = MaterialParams(alpha=alpha)
        for frac in (0.25, 0.5, 0.9, 1.0):
            curve = relaxation_curve("ret_closed", grid, frac * p.k0, p)
            reports.append(dissipation_check(curve))
        # one integrated curve per order; the full matrix runs in `retvisco verify`
        reports.append(dissipation_check(sigma_ret_ode(grid, 0.5 * p.k0, p)))
    for report in reports:
        assert report.passed, report.to_text()
        assert report.details["sign_ok"] == "true"
    print(f"{len(reports)} curves, worst relative error {max(r.worst for r in reports):.2e}")


# }}}


# {{{ 7. fractional residual


def residuals(alpha, n, sigma0=0.5, kind="fractional"):
    mesh = CaputoMesh.graded(10.0, n, grading=2.0)
    p = MaterialParams(alpha=alpha)
    curve = relaxation_curve(kind, mesh.nodes, sigma0, p)
    return residual_fractional(curve, mesh=mesh)


@pytest.mark.acceptance(7, "fractional residual: convergence and separation of the curves", 60.0)
def test_criterion_7_attainable_parts():
    for alpha in ALPHAS:
        runs = [residuals(alpha, n) for n in (500, 1000, 2000, 4000)]
        worst = np.array([r.worst for r in runs])
        window = np.array([r.details["window_residual"] for r in runs])
        assert np.all(np.diff(worst) < 0.0), worst
        assert np.all(np.diff(window) < 0.0), window
        assert window[2] <= 1e-2

        ret = residuals(alpha, 2000, kind="ret_closed")
        frac = runs[2]
        assert not ret.passed
        assert ret.worst > 10.0 * frac.worst
        assert ret.details["min_residual"] > 10.0 * frac.details["window_residual"]
        print(
            f"alpha={alpha}: sigma_F worst {frac.worst:.3e}, window "
            f"{frac.details['window_residual']:.3e}; sigma_R lower bound "
            f"{ret.details['min_residual']:.3e}"
        )


@pytest.mark.xfail(
    strict=True,
    reason="the L1 truncation error at the first few graded nodes is independent of N "
    "and stays near 0.05 to 0.09, above 1e-2",
)
@pytest.mark.acceptance(7, "fractional residual at most 1e-2 over all nodes, N = 2000", 60.0)
@pytest.mark.parametrize("alpha", ALPHAS)
def test_criterion_7_all_nodes_within_tolerance(alpha):
    report = residuals(alpha, 2000)
    print(f"alpha={alpha}: worst {report.worst:.3e} at t/tau0 = {report.location:.3e}")
    assert report.passed


# }}}


# {{{ 8. figure data


@pytest.mark.acceptance(8, "figure CSV shape constraints", 10.0)
def test_criterion_8_figures(tmp_path, capsys, cold_energy_cache):
    assert main(["figure1", "--out-dir", str(tmp_path)]) == 0
    assert main(["figure2", "--out-dir", str(tmp_path)]) == 0
    assert main(["figure1", "--alpha", "1", "--out-dir", str(tmp_path / "maxwell")]) == 0
    capsys.readouterr()

    _, tau = read_csv(tmp_path / "fig1_tau.csv")
    _, energy = read_csv(tmp_path / "fig1_energy.csv")
    sigma = tau["sigma_over_k0"]
    assert np.array_equal(sigma, energy["sigma_over_k0"])
    assert sigma.size == 200 and sigma[0] == 0.005 and sigma[-1] == 1.0
    t, e = tau["value"], energy["value"]
    assert np.all(np.diff(t) < 0.0) and t[-1] == 0.0 and np.all(t[:-1] > 0.0)
    assert np.all(np.diff(e) > 0.0) and np.all(e > 0.0)
    assert rel_err(e[-1], E0_NORMALIZED_06) <= 1e-9

    _, maxwell = read_csv(tmp_path / "maxwell" / "fig1_energy.csv")
    assert maxwell["value"][0] <= 1e-3 * maxwell["value"][-1]
    assert rel_err(maxwell["value"][-1], 0.5) <= 1e-8

    header, cols = read_csv(tmp_path / "fig2.csv")
    assert (header["alpha"], header["k0"], header["sigma0"]) == ("0.6", "1.0", "0.5")
    t2 = cols["t_over_tau0"]
    assert t2.size == 400 and t2[0] == 0.0 and t2[-1] == 10.0
    r, f, ub = cols["sigma_R"], cols["sigma_F"], cols["sigma_ub"]
    assert r[0] == pytest.approx(0.5, rel=1e-13) and f[0] == 0.5 and ub[0] == 1.0
    assert np.all(f[1:] < r[1:]) and np.all(r[1:] < ub[1:])
    for col in (r, f, ub):
        assert np.all(np.diff(col) < 0.0)
    assert np.all(np.diff(r[1:] / f[1:]) >= 0.0)


@pytest.mark.xfail(
    strict=True,
    reason="at alpha = 0.6 the energy vanishes like sigma^(2 - 1/alpha) near zero, "
    "so its value at sigma = 0.005 k0 is about 0.16 of the end value, not 1e-3",
)
@pytest.mark.acceptance(8, "figure 1 first energy value at most 1e-3 of the last, alpha = 0.6", 10.0)
def test_criterion_8_first_energy_value_default_order(tmp_path, capsys):
    assert main(["figure1", "--out-dir", str(tmp_path)]) == 0
    capsys.readouterr()
    _, energy = read_csv(tmp_path / "fig1_energy.csv")
    e = energy["value"]
    print(f"first/last = {e[0] / e[-1]:.3e}")
    assert e[0] <= 1e-3 * e[-1]


# }}}


def test_offset_of_fixture_matches_library():
    # the ratio estimate above uses the oracle offset; the library agrees
    p = MaterialParams(alpha=0.6)
    assert offset_c(0.5, p) == pytest.approx(oracles.invert_relax(0.6, 0.5), rel=1e-10)
