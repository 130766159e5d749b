"""
Mittag-Leffler relaxation function: accuracy and asymptotics
=============================================================

Compare ``E_alpha(-x^alpha)`` against an extended-precision series on short
times, then watch it approach the power law ``x^-alpha / Gamma(1 - alpha)``
at long times.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np
from scipy import special

from _plotting import figure, save
from retvisco import ml_one, ml_relax

# {{{ short times against a 50-digit series

z = np.linspace(-5.0, 0.0, 11)
print("alpha   worst relative error on z in [-5, 0]")
for alpha in (0.51, 0.6, 0.75, 0.9, 0.99):
    with mp.workdps(50):
        ref = np.array(
            [float(mp.nsum(lambda k: mp.mpf(zz) ** k * mp.rgamma(alpha * k + 1), [0, mp.inf]))
             for zz in z]
        )
    err = np.max(np.abs(ml_one(alpha, z) - ref) / np.abs(ref))
    print(f"{alpha:5}   {err:.2e}")

# }}}

# {{{ long times against the leading power law

x = np.geomspace(1e-2, 1e4, 200)
plot = figure()
print("\nalpha   relative gap to the power law at x = 1e2, 1e3, 1e4")
for alpha in (0.6, 0.75, 0.9):
    f = ml_relax(alpha, x)
    tail = x**-alpha / special.gamma(1.0 - alpha)
    far = np.array([1e2, 1e3, 1e4])
    gaps = np.abs(ml_relax(alpha, far) * far**alpha * special.gamma(1.0 - alpha) - 1.0)
    print(f"{alpha:5}   " + "  ".join(f"{g:.2e}" for g in gaps))
    if plot:
        plot[1].loglog(x, f, label=f"alpha = {alpha}")
        plot[1].loglog(x[x > 10], tail[x > 10], "k:", lw=0.8)

if plot:
    fig, ax = plot
    ax.set_xlabel("t / tau0")
    ax.set_ylabel("E_alpha(-(t/tau0)^alpha)")
    ax.legend()
    save(fig, "ml_relax.png")

# }}}
