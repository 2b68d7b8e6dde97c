"""
Transition rates for every bath preparation
===========================================

Field and reservoir can each start empty, in a Fock state or thermal. One
rule covers all nine combinations: thermal baths add stimulated emission
and absorption, Fock quanta add sharp resonances to the up rate.
"""

import math

from mincoupling import (FieldQuantum, Fock, PhysicalConfig, ReservoirQuantum, Thermal, Vacuum,
                         evaluate_spectral_rate, transition_rate)

cfg = PhysicalConfig(m=1.0, omega=1.0, e=0.2, beta=0.01)
states = {
    "vacuum": (Vacuum(), Vacuum()),
    "Fock": (Fock((FieldQuantum((0.0, 1.0, 0.0), 1.0),)), Fock((ReservoirQuantum(1.0),))),
    "thermal": (Thermal(0.5), Thermal(0.5)),
}

n = 2
print(f"{'field':>8} {'reservoir':>10} {'down':>12} {'up (smooth)':>12} {'peaks':>6}")
for fname, (field, _) in states.items():
    for rname, (_, reservoir) in states.items():
        down = transition_rate(n, "down", field, reservoir, cfg)
        up = transition_rate(n, "up", field, reservoir, cfg)
        print(f"{fname:>8} {rname:>10} {down.smooth:12.6f} {up.smooth:12.6f} {len(up.resonances):6d}")

# detailed balance in a common thermal bath
T = 0.5
down = transition_rate(n, "down", Thermal(T), Thermal(T), cfg).smooth
up = transition_rate(n, "up", Thermal(T), Thermal(T), cfg).smooth
print(f"\nup/down = {up / down:.12f}, ((n+1)/n) exp(-w/T) = {(n + 1) / n * math.exp(-1 / T):.12f}")

# resonances only become numbers once broadened
fock_up = transition_rate(n, "up", *states["Fock"], cfg)
p = evaluate_spectral_rate(fock_up, t=1.0, eta=0.5, kernel_shape="boxcar", omega=cfg.omega)
print(f"P(n -> n+1) after t = 1 with a 0.5-wide boxcar: {p:.6f}")
