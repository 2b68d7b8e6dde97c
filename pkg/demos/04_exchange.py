"""
Photons and reservoir quanta trade energy directly
==================================================

The cross term between the vector potential and the reservoir lets a
photon be swallowed by the reservoir, or created by it, without the
oscillator changing state.
"""

import numpy as np

from mincoupling import FieldQuantum, PhysicalConfig, Thermal, Vacuum
from mincoupling.exchange import photon_absorption_rate, photon_emission_rate

cfg = PhysicalConfig(m=1.0, omega=1.0, e=0.5, beta=0.1)

# only the x-projection of the polarization couples
for theta in np.linspace(0, np.pi / 2, 4):
    photon = FieldQuantum((np.cos(theta), np.sin(theta), 0.0), 1.0)
    rate = photon_absorption_rate(photon, Vacuum(), cfg.coupling, cfg).smooth
    print(f"angle to x-hat {np.degrees(theta):5.1f} deg: absorption rate {rate:.3e}")

# a hot reservoir both absorbs faster and emits; the ratio is a Boltzmann factor
photon = FieldQuantum((0.0, 0.0, 1.0), 1.0)
for T in (0.2, 1.0, 5.0):
    absorb = photon_absorption_rate(photon, Thermal(T), cfg.coupling, cfg).smooth
    emit = photon_emission_rate(photon, Thermal(T), cfg.coupling, cfg).smooth
    print(f"T = {T:3.1f}: absorb {absorb:.3e}, emit {emit:.3e}, ratio {emit / absorb:.4f} "
          f"(exp(-w/T) = {np.exp(-1 / T):.4f})")
