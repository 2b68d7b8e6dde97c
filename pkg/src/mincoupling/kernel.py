"""Memory kernel of the oscillator's quantum Langevin equation.

    gamma(t) = (8 pi / m) * integral_0^cutoff |f(w)|^2 w^3 cos(w t) dw

With the Ohmic special coupling the integrand is flat, gamma(t) is a
regularized delta function of weight beta/m on the half line, and the memory
term reduces to the instantaneous drag (beta/m) * qdot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .core import CouplingFunction, DomainError, NumericalError, PhysicalConfig, PreconditionError

_ORDER = 16
_REL_TOL = 1e-8
_CHUNK = 2048
_TABLE = 256


@dataclass(frozen=True)
class MemoryKernel:
    coupling: CouplingFunction
    m: float
    cutoff: float
    quadrature_points: int = 64

    def __post_init__(self):
        if self.m <= 0:
            raise DomainError(f"m must be > 0, got {self.m}")
        if self.cutoff <= 0:
            raise DomainError(f"cutoff must be > 0, got {self.cutoff}")
        if self.quadrature_points < 64:
            raise DomainError(f"quadrature_points must be >= 64, got {self.quadrature_points}")

    @classmethod
    def from_config(cls, config: PhysicalConfig, coupling: CouplingFunction | None = None,
                    quadrature_points: int = 64) -> "MemoryKernel":
        return cls(coupling or config.coupling, config.m, config.cutoff, quadrature_points)


def _rule(cutoff: float, t_max: float, min_points: int, refine: int = 1):
    # at least 10 nodes per period of cos(w * t_max)
    points = max(min_points, 10.0 * cutoff * t_max / (2 * math.pi))
    panels = max(math.ceil(points / _ORDER), 1)
    panels *= refine
    x, w = leggauss(_ORDER)
    edges = np.linspace(0.0, cutoff, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _spectral_weight(kernel: MemoryKernel, nodes: np.ndarray) -> np.ndarray:
    return (8.0 * math.pi / kernel.m) * np.asarray(kernel.coupling(nodes)) * nodes**3


def _cosine_sum(t: np.ndarray, nodes: np.ndarray, wg: np.ndarray) -> np.ndarray:
    out = np.empty(t.shape)
    for start in range(0, t.size, _CHUNK):
        block = t[start:start + _CHUNK]
        out[start:start + _CHUNK] = np.cos(np.outer(block, nodes)) @ wg
    return out


def _uniform_cosine_sum(h: float, n: int, nodes: np.ndarray, wg: np.ndarray) -> np.ndarray:
    # cos(w (t0 + j h)) = cos(w t0) cos(w j h) - sin(w t0) sin(w j h): one table, two mat-vecs per block
    lags = h * np.arange(min(n, _TABLE))
    cos_tab = np.cos(np.outer(lags, nodes))
    sin_tab = np.sin(np.outer(lags, nodes))
    out = np.empty(n)
    for start in range(0, n, _TABLE):
        stop = min(start + _TABLE, n)
        phase = h * start * nodes
        block = cos_tab[:stop - start] @ (wg * np.cos(phase)) - sin_tab[:stop - start] @ (wg * np.sin(phase))
        out[start:stop] = block
    return out


def _quadrature(kernel: MemoryKernel, t: np.ndarray, uniform_step: float | None = None) -> np.ndarray:
    t_max = float(t.max()) if t.size else 0.0
    nodes, weights = _rule(kernel.cutoff, t_max, kernel.quadrature_points)
    wg = weights * _spectral_weight(kernel, nodes)
    if uniform_step is None:
        values = _cosine_sum(t, nodes, wg)
    else:
        values = _uniform_cosine_sum(uniform_step, t.size, nodes, wg)

    scale = float(np.sum(np.abs(wg)))
    if scale > 0 and t.size:
        picks = np.unique(np.linspace(0, t.size - 1, min(t.size, 9)).astype(int))
        fine_nodes, fine_weights = _rule(kernel.cutoff, t_max, kernel.quadrature_points, refine=2)
        fine = _cosine_sum(t[picks], fine_nodes, fine_weights * _spectral_weight(kernel, fine_nodes))
        err = float(np.max(np.abs(fine - values[picks]))) / scale
        if not err <= _REL_TOL:
            raise NumericalError(f"kernel quadrature did not converge (relative error {err:.3g})")
    return values


def gamma(kernel: MemoryKernel, t):
    """Evaluate the memory kernel at time(s) ``t >= 0`` by composite Gauss-Legendre quadrature.

    Raises
    ------
    NumericalError
        If a rule with twice the panels disagrees by more than 1e-8 relative
        to the integral of |integrand|.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise DomainError("gamma is evaluated for finite t >= 0 only")
    values = _quadrature(kernel, np.atleast_1d(t_arr).ravel())
    if t_arr.ndim == 0:
        return float(values[0])
    return values.reshape(t_arr.shape)


@lru_cache(maxsize=8)
def _gamma_grid(kernel: MemoryKernel, h: float, n: int) -> np.ndarray:
    values = _quadrature(kernel, h * np.arange(n), uniform_step=h)
    values.setflags(write=False)
    return values


def gamma_on_grid(kernel: MemoryKernel, h: float, n: int) -> np.ndarray:
    """Kernel sampled at lags 0, h, ..., (n-1) h; cached per (kernel, h, n)."""
    return _gamma_grid(kernel, float(h), int(n))


def _check_step(kernel: MemoryKernel, h: float):
    if not h * kernel.cutoff < 0.5:
        raise PreconditionError(
            f"step too coarse for the kernel: h * cutoff = {h * kernel.cutoff:.3g} (needs < 0.5)")


def convolve_memory(kernel: MemoryKernel, traj) -> np.ndarray:
    """Drag history C(t_n) = integral_0^{t_n} qdot(s) gamma(t_n - s) ds on the trajectory grid.

    Trapezoidal rule on the product with the kernel cached on the lag grid.
    """
    _check_step(kernel, traj.h)
    v = np.asarray(traj.qdot, dtype=float)
    n = v.size
    g = gamma_on_grid(kernel, traj.h, n)
    full = np.convolve(g, v)[:n]
    return traj.h * (full - 0.5 * g * v[0] - 0.5 * g[0] * v)


def markov_residual(kernel: MemoryKernel, traj, beta: float) -> float:
    """RMS deviation of the memory drag from the Markovian drag (beta/m) qdot.

    Only samples later than 10/cutoff after the trajectory start are used, so
    the switch-on transient of the memory integral is excluded.
    """
    if not kernel.coupling.is_special:
        raise PreconditionError("markov_residual needs the special (Ohmic) coupling")
    drag = convolve_memory(kernel, traj)
    target = (beta / kernel.m) * np.asarray(traj.qdot, dtype=float)
    lag = traj.h * np.arange(drag.size)
    window = lag > 10.0 / kernel.cutoff
    if not np.any(window):
        raise PreconditionError("trajectory is shorter than the 10/cutoff transient")
    return float(np.sqrt(np.mean((drag[window] - target[window]) ** 2)))
