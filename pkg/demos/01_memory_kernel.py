"""
The memory kernel and its Markovian limit
=========================================

With the Ohmic coupling the memory kernel is a sine-over-t spike of height
2 beta cutoff / (pi m). Its area on the half line is beta/m, so for slow
motion the memory drag collapses to the familiar (beta/m) qdot.
"""

import math

import numpy as np

from mincoupling import MemoryKernel, PhysicalConfig, gamma, harmonic_trajectory, markov_residual

cfg = PhysicalConfig(m=1.0, omega=1.0, beta=0.05, cutoff=100.0)
kernel = MemoryKernel.from_config(cfg)

# a few samples of the kernel next to the closed form
t = np.array([0.0, 0.01, 0.05, 0.2, 1.0])
closed = np.where(t > 0, 2 * cfg.beta / math.pi * np.sin(cfg.cutoff * t) / np.where(t > 0, t, 1),
                  2 * cfg.beta * cfg.cutoff / math.pi)
for ti, g, c in zip(t, gamma(kernel, t), closed):
    print(f"gamma({ti:5.2f}) = {g: .10f}   closed form {c: .10f}")

# drive the memory integral with q = cos t and compare against the instantaneous drag
print()
for cutoff in (50.0, 100.0, 200.0):
    k = MemoryKernel.from_config(cfg.replace(cutoff=cutoff))
    traj = harmonic_trajectory(1.0, 10 * math.pi, 0.45 / cutoff)
    rms = markov_residual(k, traj, cfg.beta)
    print(f"cutoff {cutoff:5.0f}: residual / (beta/m max|qdot|) = {rms / cfg.beta:.4f}")
