"""
Checking a golden-rule rate by brute force
==========================================

Chop the reservoir into 400 modes, diagonalize the single-excitation block
and watch probability leak out of the excited oscillator. The leak is
linear in time and its slope is the analytic decay rate.
"""

import numpy as np

from mincoupling import PhysicalConfig
from mincoupling.oracle import (analytic_slope, build_sector, discretize, evolve_survival,
                                fitted_rate, golden_rule_window)

cfg = PhysicalConfig(m=1.0, omega=1.0, beta=2e-3)
band = (0.2, 5.0)
grid = discretize("reservoir", cfg.coupling, cfg, band, 400)
model = build_sector(1, grid, cfg)
print(f"sector dimension: {model.dimension}")

rate = analytic_slope(["reservoir"], cfg.coupling, cfg)
window = golden_rule_window(rate, band[1] - band[0])
times = np.linspace(*window, 200)
evo = evolve_survival(model, times)
slope = fitted_rate(times, evo.p_transfer, window, band[1] - band[0])
print(f"fit window {window[0]:.2f} .. {window[1]:.2f}")
print(f"fitted slope {slope:.6e}, beta/m = {rate:.6e}, ratio {slope / rate:.4f}")

# the discrete bath rephases after 2 pi / spacing and the clean exponential breaks down
t_rec = 2 * np.pi / grid.spacing
late = evolve_survival(model, [0.5 * t_rec, 1.4 * t_rec])
print(f"P_stay / exp(-rate t) at 0.5 and 1.4 recurrence times: "
      f"{late.p_stay / np.exp(-rate * late.times)}")
