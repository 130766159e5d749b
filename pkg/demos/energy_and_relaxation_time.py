"""
Viscous energy and nonlinear relaxation time
============================================

Sample the normalized viscous energy and relaxation time against stress for
several orders. The energy is finite only for orders above one half; at
order one both reduce to the ordinary Maxwell model.
"""

from __future__ import annotations

import numpy as np

from _plotting import figure, save
from retvisco import MaterialParams, NonIntegrableError, sample_energy_and_tau

sigma = np.linspace(0.005, 1.0, 200)

# the energy at sigma = 0 diverges for alpha <= 1/2
try:
    sample_energy_and_tau(MaterialParams(alpha=0.5), sigma)
except NonIntegrableError as exc:
    print(f"alpha = 0.5: {exc}")

curves = {}
print("\nalpha   e(k0)      tau at sigma = 0.3 k0, 0.5 k0, 0.9 k0")
for alpha in (0.6, 0.75, 0.9, 1.0):
    energy, tau = sample_energy_and_tau(MaterialParams(alpha=alpha), sigma)
    curves[alpha] = energy, tau
    at = [np.interp(s, sigma, tau.tau_bar) for s in (0.3, 0.5, 0.9)]
    print(f"{alpha:5}   {energy.ebar[-1]:.6f}   " + "  ".join(f"{v:.4f}" for v in at))

plot = figure()
if plot:
    fig, ax = plot
    twin = ax.twinx()
    for alpha, (energy, tau) in curves.items():
        (line,) = ax.plot(sigma, tau.tau_bar, label=f"alpha = {alpha}")
        twin.plot(sigma, energy.ebar, "--", color=line.get_color())
    ax.set_xlabel("sigma / k0")
    ax.set_ylabel("tau / tau0 (solid)")
    twin.set_ylabel("normalized energy (dashed)")
    ax.set_ylim(0.0, 5.0)
    ax.legend()
    save(fig, "energy_and_tau.png")
