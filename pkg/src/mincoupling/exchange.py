"""Direct energy exchange between the vacuum field and the reservoir.

These channels come from the field-reservoir cross term of the interaction;
the oscillator only spectates, so none of the rates depend on its level n.
"""

from __future__ import annotations

import math

from .core import (BathOccupation, CouplingFunction, DomainError, FieldQuantum, Fock,
                   PhysicalConfig, ReservoirQuantum, Thermal, Vacuum, bose_occupation,
                   stimulated_factor)
from .rates import ZERO_RATE, Resonance, SpectralRate


def _prefactor(photon: FieldQuantum, coupling: CouplingFunction, config: PhysicalConfig) -> float:
    w_p = photon.omega_p
    return config.e**2 * w_p * coupling(w_p) * photon.eps_x**2 / (2.0 * math.pi * config.m**2)


def _check_reservoir(reservoir):
    if isinstance(reservoir, Fock):
        if any(not isinstance(q, ReservoirQuantum) for q in reservoir.quanta):
            raise DomainError("reservoir Fock state must hold ReservoirQuantum entries")
    elif not isinstance(reservoir, (Vacuum, Thermal)):
        raise DomainError(f"unknown reservoir state {reservoir!r}")


def photon_absorption_rate(photon: FieldQuantum, reservoir: BathOccupation,
                           coupling: CouplingFunction, config: PhysicalConfig) -> SpectralRate:
    """Rate at which the reservoir swallows ``photon``.

    Vacuum and Fock reservoirs give the same value; a thermal reservoir
    multiplies it by the stimulated factor 1 + nbar(w_p).
    """
    _check_reservoir(reservoir)
    rate = _prefactor(photon, coupling, config)
    if isinstance(reservoir, Thermal):
        rate *= stimulated_factor(photon.omega_p, reservoir.temperature)
    return SpectralRate(rate)


def photon_emission_rate(target: FieldQuantum, reservoir: BathOccupation,
                         coupling: CouplingFunction, config: PhysicalConfig) -> SpectralRate:
    """Rate at which the reservoir creates a photon in the mode ``target``.

    An empty reservoir emits nothing. A thermal reservoir gives a smooth rate
    proportional to nbar(w_p). Each Fock quantum of the reservoir contributes
    a delta(w_l - w_p) resonance; evaluate it with ``omega = target.omega_p``.
    """
    _check_reservoir(reservoir)
    if isinstance(reservoir, Vacuum):
        return ZERO_RATE
    if isinstance(reservoir, Thermal):
        rate = _prefactor(target, coupling, config) * bose_occupation(target.omega_p,
                                                                      reservoir.temperature)
        return SpectralRate(rate)
    scale = config.e**2 * target.eps_x**2 / (8.0 * config.m**2 * math.pi**2 * target.omega_p)
    return SpectralRate(0.0, tuple(Resonance(q.omega_p, scale * coupling(q.omega_p))
                                   for q in reservoir.quanta))
