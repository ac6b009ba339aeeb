"""
Bandwidth selection on hard-edged data
======================================

A kernel density is only as good as its bandwidth.  Closest-approach
distances pile up against zero, and on that kind of data the usual
Gaussian rule of thumb oversmooths badly.  Compare Silverman's rule, the
DCT fixed-point plug-in selector, and cross-validated grid search on the
head-on placement's DCPA sample.
"""

import numpy as np

from colreg_risk import (
    Topology,
    bandwidth_grid_cv,
    bandwidth_isj,
    bandwidth_silverman,
    evaluate,
    fit,
    integrate,
    propagation_study,
)

study = propagation_study([0.0], range_m=1000.0, n=100_000, seed=2024)
dcpa = study[0.0].dcpa
subset = dcpa[:4000]  # grid CV cost is quadratic in the sample count

h_silverman = bandwidth_silverman(subset)
h_isj = bandwidth_isj(subset)
h_grid = bandwidth_grid_cv(subset, 0.25, 12.0, 0.25, folds=5)

print(f"silverman  h = {h_silverman:7.3f}")
print(f"grid CV    h = {h_grid:7.3f}")
print(f"plug-in    h = {h_isj:7.3f}")
print()
print("The rule of thumb assumes a Gaussian shape and lands far too wide;")
print("the plug-in selector resolves the sharp edge at zero.")

for name, h in (("silverman", h_silverman), ("isj", h_isj)):
    estimate = fit(subset, h)
    mass_below_zero = integrate(estimate, -np.inf, 0.0)
    print(f"  {name:9}: density at 0 = {evaluate(estimate, 0.0):6.4f}, "
          f"kernel mass leaking below zero = {mass_below_zero:.4f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = np.linspace(-10, 120, 600)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.hist(subset, bins=120, density=True, alpha=0.35, label="data")
    for name, h in (("silverman", h_silverman), ("grid CV", h_grid), ("plug-in", h_isj)):
        ax.plot(xs, evaluate(fit(subset, h), xs), label=f"{name} (h={h:.2f})")
    ax.set_xlabel("DCPA (m)")
    ax.set_ylabel("density")
    ax.legend()
    fig.tight_layout()
    fig.savefig("bandwidth_comparison.png", dpi=120)
    print("\nwrote bandwidth_comparison.png")
except ImportError:
    print("\nmatplotlib not installed; skipping the comparison figure")
