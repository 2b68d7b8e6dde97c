"""First-order transition rates of the oscillator, |n> -> |n -+ 1>.

A rate is the coefficient of t in the long-time transition probability. Bath
quanta sitting exactly on the oscillator frequency add delta(w_p - w) terms;
these are kept symbolic in :class:`SpectralRate` and only broadened when a
probability is requested.

Every combination of field state x reservoir state follows one rule. For a
bath with single-quantum decay rate G (reservoir: beta/m, vacuum field:
w^2 e^2 / (6 pi m)):

    down: n * G * (1 + nbar)   if the bath is thermal, else n * G
    up:   (n + 1) * G * nbar   if the bath is thermal, else 0
          + (n + 1) * weight * delta(w_p - w) for every Fock quantum

Fock-bath down rates carry no stimulated enhancement.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

from .core import (BathOccupation, CouplingFunction, DomainError, FieldQuantum, Fock,
                   PhysicalConfig, ReservoirQuantum, Thermal, Vacuum, bose_occupation,
                   stimulated_factor)

PERTURBATIVE_LIMIT = 0.1


class PerturbativeValidityWarning(UserWarning):
    """A first-order transition probability grew past the regime where it can be trusted."""


class Direction(str, Enum):
    DOWN = "down"
    UP = "up"


class KernelShape(str, Enum):
    BOXCAR = "boxcar"
    LORENTZIAN = "lorentzian"


@dataclass(frozen=True)
class Resonance:
    location: float
    weight: float


@dataclass(frozen=True)
class SpectralRate:
    """Probability slope: ``smooth`` plus ``weight * delta(location - w)`` per resonance."""

    smooth: float
    resonances: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "resonances", tuple(self.resonances))
        if self.smooth < 0 or any(r.weight < 0 for r in self.resonances):
            raise DomainError("rates must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "smooth": self.smooth,
            "resonances": [{"location": r.location, "weight": r.weight} for r in self.resonances],
        }


ZERO_RATE = SpectralRate(0.0)


def broadening(x, eta: float, shape: KernelShape | str = KernelShape.BOXCAR) -> float:
    """Unit-area stand-in for delta(x) with width ``eta`` (full width for both shapes)."""
    shape = KernelShape(shape)
    if not eta > 0:
        raise DomainError(f"broadening width must be > 0, got {eta}")
    if shape is KernelShape.BOXCAR:
        return 1.0 / eta if abs(x) <= 0.5 * eta else 0.0
    half = 0.5 * eta
    return half / (math.pi * (x * x + half * half))


def evaluate_spectral_rate(rate: SpectralRate, t: float, eta: float,
                           kernel_shape: KernelShape | str, omega: float) -> float:
    """Transition probability after time ``t``, with resonances broadened around ``omega``.

    Probabilities above 0.1 are outside first-order perturbation theory; a
    :class:`PerturbativeValidityWarning` is issued and the value is clamped to 1.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if not eta > 0:
        raise DomainError(f"broadening width must be > 0, got {eta}")
    slope = rate.smooth + sum(r.weight * broadening(r.location - omega, eta, kernel_shape)
                              for r in rate.resonances)
    p = slope * t
    if p > PERTURBATIVE_LIMIT:
        warnings.warn(f"transition probability {p:.3g} exceeds {PERTURBATIVE_LIMIT}; "
                      "first-order perturbation theory is unreliable here",
                      PerturbativeValidityWarning, stacklevel=2)
    return min(p, 1.0)


def reservoir_decay_rate(config: PhysicalConfig, coupling: CouplingFunction | None = None) -> float:
    """Single-quantum spontaneous rate into the reservoir, 4 pi^2 w^3 |f(w)|^2 / m."""
    coupling = coupling or config.coupling
    w = config.omega
    return 4.0 * math.pi**2 * w**3 * coupling(w) / config.m


def field_decay_rate(config: PhysicalConfig) -> float:
    """Single-quantum spontaneous rate into the vacuum field, w^2 e^2 / (6 pi m) = tau w^2."""
    return config.omega**2 * config.e**2 / (6.0 * math.pi * config.m)


def general_down_rate(n: int, coupling: CouplingFunction, config: PhysicalConfig) -> SpectralRate:
    """Down rate with both baths empty, for any coupling function."""
    if n < 0:
        raise DomainError(f"occupation must be >= 0, got {n}")
    if n == 0:
        return ZERO_RATE
    return SpectralRate(n * reservoir_decay_rate(config, coupling) + n * field_decay_rate(config))


def _check_bath(bath, quantum_type, name):
    if isinstance(bath, (Vacuum, Thermal)):
        return
    if isinstance(bath, Fock):
        bad = [q for q in bath.quanta if not isinstance(q, quantum_type)]
        if bad:
            raise DomainError(f"{name} Fock state must hold {quantum_type.__name__} entries")
        return
    raise DomainError(f"unknown {name} state {bath!r}")


def _bath_factor(bath: BathOccupation, direction: Direction, omega: float) -> float:
    thermal = isinstance(bath, Thermal)
    if direction is Direction.DOWN:
        return stimulated_factor(omega, bath.temperature) if thermal else 1.0
    return bose_occupation(omega, bath.temperature) if thermal else 0.0


def reservoir_resonance_weight(config: PhysicalConfig) -> float:
    """Per-quantum weight of delta(w_p - w) in the up rate, before the (n+1) factor."""
    return config.beta / (4.0 * math.pi * config.m * config.omega**2)


def field_resonance_weight(quantum: FieldQuantum, config: PhysicalConfig) -> float:
    """Per-photon weight of delta(w_p - w) in the up rate, before the (n+1) factor."""
    return (config.e**2 * config.omega * quantum.eps_x**2
            / (16.0 * math.pi**2 * config.m * quantum.omega_p))


def transition_rate(n: int, direction: Direction | str, field: BathOccupation,
                    reservoir: BathOccupation, config: PhysicalConfig) -> SpectralRate:
    """Rate of |n> -> |n-1> (down) or |n> -> |n+1> (up) with the Ohmic coupling.

    ``field`` is the state of the electromagnetic vacuum (Fock entries are
    :class:`FieldQuantum`), ``reservoir`` the state of the Klein-Gordon bath
    (Fock entries are :class:`ReservoirQuantum`). Thermal states at T = 0
    give the vacuum result.
    """
    direction = Direction(direction)
    if n < 0:
        raise DomainError(f"occupation must be >= 0, got {n}")
    _check_bath(field, FieldQuantum, "field")
    _check_bath(reservoir, ReservoirQuantum, "reservoir")
    w = config.omega
    gamma_res = config.damping_rate
    gamma_field = field_decay_rate(config)

    if direction is Direction.DOWN:
        if n == 0:
            return ZERO_RATE
        smooth = (n * gamma_res * _bath_factor(reservoir, direction, w)
                  + n * gamma_field * _bath_factor(field, direction, w))
        return SpectralRate(smooth)

    ladder = n + 1
    smooth = (ladder * gamma_res * _bath_factor(reservoir, direction, w)
              + ladder * gamma_field * _bath_factor(field, direction, w))
    resonances = []
    if isinstance(reservoir, Fock):
        weight = ladder * reservoir_resonance_weight(config)
        resonances += [Resonance(q.omega_p, weight) for q in reservoir.quanta]
    if isinstance(field, Fock):
        resonances += [Resonance(q.omega_p, ladder * field_resonance_weight(q, config))
                       for q in field.quanta]
    return SpectralRate(smooth, tuple(resonances))
