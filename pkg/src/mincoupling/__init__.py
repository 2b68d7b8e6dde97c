"""Damped harmonic oscillator minimally coupled to a Klein-Gordon reservoir and the EM vacuum."""

from .core import (BathOccupation, CouplingFunction, DomainError, FieldQuantum, Fock,
                   ModelError, ModelValidityError, NumericalError, PhysicalConfig,
                   PreconditionError, ReservoirQuantum, ResourceError, Thermal, Vacuum,
                   bose_occupation, coupling_special, polarization_sum_x, polarization_vector,
                   polarization_x, stimulated_factor)
from .dynamics import (Trajectory, energy, energy_decay_rate, harmonic_trajectory,
                       solve_markovian, solve_nonmarkovian, solve_with_radiation_reaction)
from .exchange import photon_absorption_rate, photon_emission_rate
from .kernel import MemoryKernel, convolve_memory, gamma, markov_residual
from .oracle import (BathKind, ModeGrid, SectorModel, Weighting, build_sector, discretize,
                     evolve_survival, fitted_rate, thermal_ladder)
from .rates import (Direction, KernelShape, PerturbativeValidityWarning, Resonance, SpectralRate,
                    evaluate_spectral_rate, general_down_rate, transition_rate)

__version__ = "0.1.0"
