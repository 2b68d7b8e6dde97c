"""
Three ways to damp an oscillator
================================

Markovian friction, the full memory integral, and radiation reaction from
the charge all produce an energy that decays at a constant rate.
"""

import math

from mincoupling import (MemoryKernel, PhysicalConfig, energy, energy_decay_rate, solve_markovian,
                         solve_nonmarkovian, solve_with_radiation_reaction)

cfg = PhysicalConfig(m=1.0, omega=1.0, beta=0.05, cutoff=100.0)
t_end = 10 * 2 * math.pi

markov = solve_markovian(cfg, 1.0, 0.0, t_end, 0.004)
memory = solve_nonmarkovian(cfg, MemoryKernel.from_config(cfg), 1.0, 0.0, t_end, 0.004)
gap = abs(markov.q - memory.q).max()
print(f"Markovian vs memory kernel, 10 periods: max |dq| = {gap:.2e}")
print(f"energy decay rate (Markovian):   {energy_decay_rate(cfg, markov):.5f}   beta/m = {cfg.beta}")
print(f"energy decay rate (memory):      {energy_decay_rate(cfg, memory):.5f}")

# now switch friction down and charge on: tau * omega = 1e-3
charged = cfg.replace(beta=1e-3, e=math.sqrt(6 * math.pi * 1e-3))
rr = solve_with_radiation_reaction(charged, 1.0, 0.0, 100 * 2 * math.pi, 0.02)
expected = charged.damping_rate + charged.tau * charged.omega**2
print(f"\nwith radiation reaction: fitted rate {energy_decay_rate(charged, rr):.6e}, "
      f"beta/m + tau w^2 = {expected:.6e}")
E = energy(charged, rr)
print(f"energy after 100 periods: {E[-1] / E[0]:.4f} of the initial value")
