"""
Verification matrix
===================

Run the checks behind ``retvisco verify`` over a small matrix of orders and
initial stresses and print one line per report. Reports are also written
as text and key-value files under ``demos/output/reports``.
"""

from __future__ import annotations

from _plotting import OUT
from retvisco.config import GridConfig, RunConfig, VerifyConfig
from retvisco.suite import run_suite

cfg = RunConfig(
    verify=VerifyConfig(alphas=(0.5, 0.6, 0.9, 1.0), sigma0_over_k0=(0.5, 1.0)),
    grids=GridConfig(relax_t_end=5.0, relax_points=201),
)

failed = 0
for report in run_suite(cfg):
    print(report.summary())
    report.write(OUT / "reports")
    failed += not report.passed
print(f"\n{failed} failed check(s)")
