"""
Fractional and nonlinear relaxation from the same initial stress
================================================================

The nonlinear response is a time-shifted Mittag-Leffler curve. It lies
between the fractional response and that response scaled by k0 / sigma0,
and the ratio of the two climbs towards k0 / sigma0. Only at sigma0 = k0 do
the two curves coincide.
"""

from __future__ import annotations

import numpy as np

from _plotting import figure, save
from retvisco import MaterialParams, offset_c, relaxation_curve, sigma_ret_ode

p = MaterialParams(alpha=0.6)
sigma0 = 0.5
t = np.linspace(0.0, 10.0, 400)

frac = relaxation_curve("fractional", t, sigma0, p)
ret = relaxation_curve("ret_closed", t, sigma0, p)
upper = relaxation_curve("upper_bound", t, sigma0, p)
print(f"time offset of the nonlinear curve: c / tau0 = {offset_c(sigma0, p) / p.tau0:.6f}")

# {{{ ordering and ratio

inside = np.all(frac.y[1:] < ret.y[1:]) and np.all(ret.y[1:] < upper.y[1:])
print(f"sigma_F < sigma_R < (k0/sigma0) sigma_F on (0, 10]: {bool(inside)}")
for tt in (1.0, 10.0, 100.0, 1000.0):
    f = relaxation_curve("fractional", [0.0, tt], sigma0, p).y[-1]
    r = relaxation_curve("ret_closed", [0.0, tt], sigma0, p).y[-1]
    print(f"t / tau0 = {tt:6g}: sigma_R / sigma_F = {r / f:.6f}")

# }}}

# {{{ the closed form against direct integration

ode = sigma_ret_ode(t, sigma0, p)
print(f"closed form against the integrated equation: {np.max(np.abs(ode.y / ret.y - 1.0)):.2e}")

# }}}

plot = figure()
if plot:
    fig, ax = plot
    ax.plot(t, ret.y, label="nonlinear")
    ax.plot(t, frac.y, label="fractional")
    ax.plot(t, upper.y, label="upper bound")
    ax.set_xlabel("t / tau0")
    ax.set_ylabel("normalized stress")
    ax.legend()
    save(fig, "relaxation_curves.png")
