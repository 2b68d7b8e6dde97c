"""Expectation-value trajectories of the damped, charged oscillator.

Three equations of motion, all with the zero-mean forcing dropped:

* Markovian:        q'' + w^2 q + (beta/m) q' = 0
* memory kernel:    q'' + w^2 q + int_0^t gamma(t - s) q'(s) ds = 0
* radiation reaction: the Markovian equation plus the Abraham-Lorentz
  self-force tau q''', integrated in reduced-order form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ModelValidityError, PhysicalConfig, PreconditionError
from .kernel import MemoryKernel, _check_step, gamma_on_grid


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled position and velocity."""

    t0: float
    h: float
    q: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        qdot = np.asarray(self.qdot, dtype=float)
        if q.shape != qdot.shape or q.ndim != 1 or q.size < 2:
            raise ValueError("q and qdot must be 1-D arrays of equal length >= 2")
        if not self.h > 0:
            raise ValueError(f"step must be > 0, got {self.h}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qdot", qdot)

    def __len__(self):
        return self.q.size

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.q.size)


def harmonic_trajectory(omega: float, t_end: float, h: float, amplitude: float = 1.0,
                        t0: float = 0.0) -> Trajectory:
    """Free oscillation q = A cos(w t), handy as a probe for the memory integral."""
    t = h * np.arange(_steps(t_end - t0, h) + 1)
    return Trajectory(t0, h, amplitude * np.cos(omega * t), -amplitude * omega * np.sin(omega * t))


def _steps(span: float, h: float) -> int:
    if not h > 0:
        raise PreconditionError(f"step must be > 0, got {h}")
    if not span > 0:
        raise PreconditionError(f"t_end must lie after the start time (span {span})")
    return max(int(round(span / h)), 1)


def _rk4_propagator(A: np.ndarray, h: float) -> np.ndarray:
    # one classical RK4 step of y' = A y is exactly this degree-4 Taylor polynomial
    hA = h * A
    hA2 = hA @ hA
    hA3 = hA2 @ hA
    return np.eye(2) + hA + hA2 / 2.0 + hA3 / 6.0 + hA3 @ hA / 24.0


def _march(A: np.ndarray, q0: float, v0: float, t0: float, t_end: float, h: float) -> Trajectory:
    n = _steps(t_end - t0, h)
    P = _rk4_propagator(A, h)
    y = np.empty((n + 1, 2))
    y[0] = (q0, v0)
    for k in range(n):
        y[k + 1] = P @ y[k]
    return Trajectory(t0, h, y[:, 0].copy(), y[:, 1].copy())


def _markov_matrix(config: PhysicalConfig) -> np.ndarray:
    return np.array([[0.0, 1.0], [-config.omega**2, -config.damping_rate]])


def _check_local_step(config: PhysicalConfig, h: float):
    fastest = max(config.omega, config.damping_rate)
    if not h * fastest < 0.1:
        raise PreconditionError(
            f"step too coarse: h * max(omega, beta/m) = {h * fastest:.3g} (needs < 0.1)")


def solve_markovian(config: PhysicalConfig, q0: float, v0: float, t_end: float, h: float,
                    t0: float = 0.0) -> Trajectory:
    """Integrate q'' + (beta/m) q' + w^2 q = 0 with fixed-step RK4."""
    _check_local_step(config, h)
    return _march(_markov_matrix(config), q0, v0, t0, t_end, h)


def radiation_reaction_matrix(config: PhysicalConfig) -> np.ndarray:
    """First-order system of the reduced-order radiation-reaction equation.

    The self-force tau q''' is evaluated on the zeroth-order motion
    q'' = -w^2 q - b q' (b = beta/m), which gives

        q'' = -w^2 (1 - tau b) q - (b + tau w^2 - tau b^2) q'.
    """
    w2, b, tau = config.omega**2, config.damping_rate, config.tau
    if tau == 0.0:
        return _markov_matrix(config)
    return np.array([[0.0, 1.0], [-w2 * (1.0 - tau * b), -(b + tau * w2 - tau * b * b)]])


def solve_with_radiation_reaction(config: PhysicalConfig, q0: float, v0: float, t_end: float,
                                  h: float, t0: float = 0.0) -> Trajectory:
    """Markovian motion plus the radiation-reaction self-force, without runaway solutions."""
    if not config.tau * config.omega < 0.1:
        raise ModelValidityError(
            f"radiation reaction needs tau * omega < 0.1, got {config.tau * config.omega:.3g}")
    _check_local_step(config, h)
    return _march(radiation_reaction_matrix(config), q0, v0, t0, t_end, h)


def solve_nonmarkovian(config: PhysicalConfig, kernel: MemoryKernel, q0: float, v0: float,
                       t_end: float, h: float) -> Trajectory:
    """Integrate the memory-kernel equation of motion from t = 0.

    Trapezoidal rule for both the ODE part and the memory integral. The
    scheme is implicit only through the gamma(0) endpoint term, which is
    linear, so each step is solved in closed form. Second order in h.
    """
    _check_local_step(config, h)
    _check_step(kernel, h)
    n = _steps(t_end, h)
    g = gamma_on_grid(kernel, h, n + 1)
    w2 = config.omega**2
    q = np.empty(n + 1)
    v = np.empty(n + 1)
    q[0], v[0] = q0, v0
    a = -w2 * q0  # memory vanishes at t = 0
    denom = 1.0 + 0.25 * h * h * (w2 + g[0])
    for k in range(n):
        # known part of the memory integral at t_{k+1}; v_{k+1} enters via the gamma(0) term
        known = h * (0.5 * g[k + 1] * v[0] + np.dot(g[k:0:-1], v[1:k + 1]))
        q_half = q[k] + 0.5 * h * v[k]
        v[k + 1] = (v[k] + 0.5 * h * a - 0.5 * h * (w2 * q_half + known)) / denom
        q[k + 1] = q_half + 0.5 * h * v[k + 1]
        a = -w2 * q[k + 1] - known - 0.5 * h * g[0] * v[k + 1]
    return Trajectory(0.0, h, q, v)


def energy(config: PhysicalConfig, traj: Trajectory) -> np.ndarray:
    """Oscillator energy m q'^2 / 2 + m w^2 q^2 / 2 at every sample."""
    return 0.5 * config.m * (traj.qdot**2 + config.omega**2 * traj.q**2)


def energy_decay_rate(config: PhysicalConfig, traj: Trajectory, skip: float = 0.0) -> float:
    """Least-squares slope of -log E(t), skipping the first ``skip`` time units.

    The fit window is trimmed to a whole number of half periods so the
    2w ripple of E averages out.
    """
    t = traj.t - traj.t0
    E = energy(config, traj)
    keep = t >= skip
    t, E = t[keep], E[keep]
    half_period = math.pi / config.omega
    span = t[-1] - t[0]
    if span >= half_period:
        t_stop = t[0] + half_period * math.floor(span / half_period)
        keep = t <= t_stop + 0.5 * traj.h
        t, E = t[keep], E[keep]
    if t.size < 2 or np.any(E <= 0):
        raise PreconditionError("need at least two samples of positive energy to fit a decay rate")
    slope = np.polyfit(t, np.log(E), 1)[0]
    return float(-slope)
