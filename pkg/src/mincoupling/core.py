"""Model constants, coupling functions, photon geometry and Bose factors.

Natural units throughout: hbar = c = k_B = 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Union

import numpy as np


class ModelError(ValueError):
    """Base class for invalid input to the model. ``code`` is a short tag used by the CLI."""

    code = "validation"


class DomainError(ModelError):
    code = "domain"


class PreconditionError(ModelError):
    code = "precondition"


class ModelValidityError(ModelError):
    code = "model-validity"


class ResourceError(ModelError):
    code = "resource"


class NumericalError(ArithmeticError):
    code = "numerical"


@dataclass(frozen=True)
class PhysicalConfig:
    """All constants of the oscillator + reservoir + vacuum-field model.

    Parameters
    ----------
    m : float
        Oscillator mass.
    omega : float
        Oscillator angular frequency.
    e : float
        Charge; 0 switches the vacuum field off.
    beta : float
        Friction coefficient of the reservoir (Ohmic coupling strength).
    temperature : float
        Temperature in energy units (k_B absorbed).
    cutoff : float
        UV cutoff used by the memory-kernel quadrature. Must exceed ``omega``.
    """

    m: float
    omega: float
    e: float = 0.0
    beta: float = 0.0
    temperature: float = 0.0
    cutoff: float = 100.0

    _REQUIRED = ("m", "omega", "temperature", "cutoff")
    _KEYS = ("m", "omega", "e", "beta", "temperature", "cutoff")

    def __post_init__(self):
        for name in self._KEYS:
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.m <= 0:
            raise DomainError(f"m must be > 0, got {self.m}")
        if self.omega <= 0:
            raise DomainError(f"omega must be > 0, got {self.omega}")
        if self.beta < 0:
            raise DomainError(f"beta must be >= 0, got {self.beta}")
        if self.temperature < 0:
            raise DomainError(f"temperature must be >= 0, got {self.temperature}")
        if self.cutoff <= self.omega:
            raise DomainError(f"cutoff must exceed omega ({self.cutoff} <= {self.omega})")

    @property
    def tau(self) -> float:
        """Radiation-reaction time e^2 / (6 pi m)."""
        return self.e**2 / (6.0 * math.pi * self.m)

    @property
    def damping_rate(self) -> float:
        """Markovian friction rate beta / m."""
        return self.beta / self.m

    @property
    def coupling(self) -> "CouplingFunction":
        return CouplingFunction.special(self.beta)

    def replace(self, **changes) -> "PhysicalConfig":
        data = self.to_dict()
        data.update(changes)
        return PhysicalConfig(**data)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k in self._KEYS}

    @classmethod
    def from_dict(cls, data: dict) -> "PhysicalConfig":
        """Build from a mapping; a nested ``physical`` block is used when present.

        Unknown keys are ignored so that result documents can be read back.
        """
        if not isinstance(data, dict):
            raise ModelError("configuration must be a JSON object")
        if isinstance(data.get("physical"), dict):
            data = data["physical"]
        missing = [k for k in cls._REQUIRED if k not in data]
        if missing:
            raise ModelError(f"configuration is missing keys: {', '.join(missing)}")
        kwargs = {k: data[k] for k in cls._KEYS if k in data}
        try:
            kwargs = {k: float(v) for k, v in kwargs.items()}
        except (TypeError, ValueError) as exc:
            raise ModelError(f"non-numeric configuration value: {exc}") from None
        return cls(**kwargs)

    @classmethod
    def from_json(cls, source: Union[str, Path]) -> "PhysicalConfig":
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ModelError(f"cannot read config {path}: {exc.strerror}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelError(f"bad JSON in {path}: {exc.msg} (line {exc.lineno})") from None
        return cls.from_dict(data)


def coupling_special(beta: float, omega):
    """|f(omega)|^2 = beta / (4 pi^2 omega^3), the coupling that gives Ohmic friction."""
    omega = np.asarray(omega, dtype=float)
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    if np.any(omega <= 0):
        raise DomainError("coupling is defined for omega > 0 only")
    out = beta / (4.0 * math.pi**2 * omega**3)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CouplingFunction:
    """|f(omega)|^2, either the Ohmic special choice or a user-supplied evaluator."""

    beta: float | None = None
    evaluator: Callable | None = None

    def __post_init__(self):
        if (self.beta is None) == (self.evaluator is None):
            raise DomainError("give exactly one of beta (special) or evaluator (general)")
        if self.beta is not None and self.beta < 0:
            raise DomainError(f"beta must be >= 0, got {self.beta}")

    @classmethod
    def special(cls, beta: float) -> "CouplingFunction":
        return cls(beta=float(beta))

    @classmethod
    def general(cls, evaluator: Callable) -> "CouplingFunction":
        return cls(evaluator=evaluator)

    @property
    def is_special(self) -> bool:
        return self.beta is not None

    def __call__(self, omega):
        if self.is_special:
            return coupling_special(self.beta, omega)
        omega = np.asarray(omega, dtype=float)
        if np.any(omega <= 0):
            raise DomainError("coupling is defined for omega > 0 only")
        value = np.asarray(self.evaluator(omega), dtype=float)
        if not np.all(np.isfinite(value)) or np.any(value < 0):
            raise DomainError("|f(omega)|^2 must be finite and nonnegative")
        return float(value) if value.ndim == 0 else value


def _unit(direction) -> np.ndarray:
    k = np.asarray(direction, dtype=float).reshape(3)
    if abs(np.linalg.norm(k) - 1.0) > 1e-12:
        raise DomainError(f"direction must be a unit vector, |k| = {np.linalg.norm(k)!r}")
    return k


def polarization_vector(direction, polarization: int) -> np.ndarray:
    """Transverse polarization basis for a photon moving along ``direction``.

    Polarization 1 lies in the plane spanned by the direction and x-hat, so it
    carries the whole x-projection; polarization 2 is perpendicular to both.
    For propagation along x the choice inside the transverse plane is arbitrary
    and both x-components vanish.
    """
    k = _unit(direction)
    if polarization not in (1, 2):
        raise DomainError(f"polarization index must be 1 or 2, got {polarization!r}")
    s = math.hypot(k[1], k[2])
    if s < 1e-300:
        # k parallel to x: any transverse pair will do
        e1, e2 = np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]) * np.sign(k[0])
    else:
        # built from k x x-hat to avoid cancellation in 1 - k_x^2
        e2 = np.array([0.0, k[2], -k[1]]) / s
        e1 = np.array([s, -k[0] * k[1] / s, -k[0] * k[2] / s])
    return e1 if polarization == 1 else e2


def polarization_x(direction, polarization: int) -> float:
    """x-component of the polarization vector, eps_x(k, lambda)."""
    k = _unit(direction)
    if polarization not in (1, 2):
        raise DomainError(f"polarization index must be 1 or 2, got {polarization!r}")
    if polarization == 2:
        return 0.0
    return math.hypot(k[1], k[2])


def polarization_sum_x(direction) -> float:
    """Sum over both polarizations of eps_x^2, i.e. 1 - k_x^2."""
    k = _unit(direction)
    return 1.0 - k[0] ** 2


def bose_occupation(omega: float, temperature: float) -> float:
    """Mean Bose occupation 1/(exp(omega/T) - 1); exactly 0 at T = 0."""
    if omega <= 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        return 0.0
    x = omega / temperature
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def stimulated_factor(omega: float, temperature: float) -> float:
    """1 + n = exp(omega/T)/(exp(omega/T) - 1); exactly 1 at T = 0."""
    if omega <= 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        return 1.0
    return -1.0 / math.expm1(-omega / temperature)


@dataclass(frozen=True)
class FieldQuantum:
    """One photon: propagation direction, frequency |p| and polarization index."""

    direction: tuple
    omega_p: float
    polarization: int = 1

    def __post_init__(self):
        k = _unit(self.direction)
        object.__setattr__(self, "direction", tuple(float(c) for c in k))
        if not self.omega_p > 0:
            raise DomainError(f"omega_p must be > 0, got {self.omega_p}")
        if self.polarization not in (1, 2):
            raise DomainError(f"polarization index must be 1 or 2, got {self.polarization!r}")

    @property
    def eps_x(self) -> float:
        return polarization_x(self.direction, self.polarization)


@dataclass(frozen=True)
class ReservoirQuantum:
    """One quantum of the Klein-Gordon reservoir, labelled by its frequency."""

    omega_p: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise DomainError(f"omega_p must be > 0, got {self.omega_p}")


@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Fock:
    quanta: tuple

    def __post_init__(self):
        object.__setattr__(self, "quanta", tuple(self.quanta))
        if not self.quanta:
            raise DomainError("a Fock bath state needs at least one quantum")


@dataclass(frozen=True)
class Thermal:
    """Maxwell-Boltzmann (Gibbs) bath state. T = 0 behaves as the vacuum."""

    temperature: float

    def __post_init__(self):
        if not self.temperature >= 0:
            raise DomainError(f"temperature must be >= 0, got {self.temperature}")


BathOccupation = Union[Vacuum, Fock, Thermal]
