"""Brute-force check of the transition rates on discretized baths.

Each bath is cut down to M modes on a frequency band around the oscillator.
The rotating-wave interaction conserves the total number of excitations, so
the oscillator in |n> with empty baths only explores a small sector of Fock
space, which is diagonalized exactly. The slope of the transfer probability
in the golden-rule window is the decay rate.

Thermal baths are handled through the Heisenberg picture: the interaction is
quadratic, so the oscillator mode evolves into u0 a + sum_j u_j b_j. The
oscillator then sees one effective environment mode, which is thermal when
the bath modes are, and the ladder probabilities follow from a beam splitter
acting on |n> x (thermal Fock mixture).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np
import scipy.linalg

from .core import (CouplingFunction, FieldQuantum, NumericalError, PhysicalConfig,
                   PreconditionError, ResourceError, bose_occupation)
from .rates import field_decay_rate, reservoir_decay_rate

# solid-angle integrals of the mode couplings: isotropic reservoir, sum_lambda eps_x^2 for photons
RESERVOIR_SOLID_ANGLE = 4.0 * math.pi
FIELD_SOLID_ANGLE = 8.0 * math.pi / 3.0

MAX_DENSE_DIM = 5000


class BathKind(str, Enum):
    RESERVOIR = "reservoir"
    FIELD = "field"


class Weighting(str, Enum):
    GOLDEN_RULE = "golden_rule"
    INTERACTION = "interaction"


@dataclass(frozen=True, eq=False)
class ModeGrid:
    omegas: np.ndarray
    couplings: np.ndarray
    spacing: float
    kind: BathKind

    def __post_init__(self):
        omegas = np.asarray(self.omegas, dtype=float)
        couplings = np.asarray(self.couplings, dtype=float)
        if omegas.ndim != 1 or omegas.size < 1 or omegas.shape != couplings.shape:
            raise ValueError("omegas and couplings must be equal-length 1-D arrays")
        if np.any(np.diff(omegas) <= 0):
            raise ValueError("mode frequencies must be strictly increasing")
        if np.any(couplings < 0):
            raise ValueError("couplings must be >= 0")
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "kind", BathKind(self.kind))

    def __len__(self):
        return self.omegas.size


def spectral_density(kind: BathKind | str, coupling: CouplingFunction, config: PhysicalConfig,
                     x, weighting: Weighting | str = Weighting.GOLDEN_RULE):
    """Coupling density J(x): sum_j g_j^2 delta(x - x_j) in the continuum limit.

    ``golden_rule`` sets J(x) to the single-quantum decay rate the oscillator
    would have at frequency x, divided by 2 pi. ``interaction`` keeps the
    actual matrix elements at oscillator frequency w, reduced from three
    dimensions by the solid-angle integrals:

        reservoir: (w / 2m) * 4 pi x^2 |f(x)|^2
        field:     e^2 (w / 2m) * (8 pi / 3) x^2 / (2 (2 pi)^3 x)

    Both agree at x = w, which is all the golden rule sees.
    """
    kind, weighting = BathKind(kind), Weighting(weighting)
    x = np.asarray(x, dtype=float)
    w, m = config.omega, config.m
    if kind is BathKind.RESERVOIR:
        if weighting is Weighting.GOLDEN_RULE:
            return 4.0 * math.pi**2 * x**3 * coupling(x) / m / (2.0 * math.pi)
        return (w / (2.0 * m)) * RESERVOIR_SOLID_ANGLE * x**2 * coupling(x)
    if weighting is Weighting.GOLDEN_RULE:
        return config.e**2 * x**2 / (6.0 * math.pi * m) / (2.0 * math.pi)
    return config.e**2 * (w / (2.0 * m)) * FIELD_SOLID_ANGLE * x**2 / (2.0 * (2.0 * math.pi)**3 * x)


def _band_grid(band, n_modes: int, center: float):
    lo, hi = map(float, band)
    if not 0 < lo < center < hi:
        raise PreconditionError(f"band [{lo}, {hi}] must satisfy 0 < lo < {center} < hi")
    if n_modes < 1:
        raise PreconditionError(f"need at least one mode, got {n_modes}")
    spacing = (hi - lo) / n_modes
    return lo + spacing * (np.arange(n_modes) + 0.5), spacing


def discretize(kind: BathKind | str, coupling: CouplingFunction, config: PhysicalConfig,
               band: Sequence[float], n_modes: int,
               weighting: Weighting | str = Weighting.GOLDEN_RULE) -> ModeGrid:
    """Uniform midpoint grid on ``band`` with g_j^2 = J(x_j) * spacing."""
    x, spacing = _band_grid(band, n_modes, config.omega)
    J = spectral_density(kind, coupling, config, x, weighting)
    return ModeGrid(x, np.sqrt(J * spacing), spacing, kind)


def absorption_grid(photon: FieldQuantum, coupling: CouplingFunction, config: PhysicalConfig,
                    band: Sequence[float], n_modes: int) -> ModeGrid:
    """Reservoir modes seen by a single photon through the field-reservoir cross term.

    g_k^2 = (e/m)^2 eps_x^2 / (2 (2 pi)^3 w_p) * 4 pi x_k^2 |f(x_k)|^2 * spacing
    """
    x, spacing = _band_grid(band, n_modes, photon.omega_p)
    g2 = ((config.e / config.m)**2 * photon.eps_x**2 / (2.0 * (2.0 * math.pi)**3 * photon.omega_p)
          * RESERVOIR_SOLID_ANGLE * x**2 * coupling(x) * spacing)
    return ModeGrid(x, np.sqrt(g2), spacing, BathKind.RESERVOIR)


def exchange_couplings(reservoir: ModeGrid, field: ModeGrid, coupling: CouplingFunction,
                       config: PhysicalConfig) -> np.ndarray:
    """Reservoir-to-photon hopping amplitudes c_jk from the (e/m) A_x R cross term.

    The cross term is a product of two single-bath operators, so c is rank one.
    """
    x, y = reservoir.omegas, field.omegas
    u = np.sqrt(RESERVOIR_SOLID_ANGLE * x**2 * coupling(x) * reservoir.spacing)
    v = np.sqrt(FIELD_SOLID_ANGLE * y**2 / (2.0 * (2.0 * math.pi)**3 * y) * field.spacing)
    return (config.e / config.m) * np.outer(u, v)


@dataclass(eq=False)
class SectorModel:
    """Fixed-excitation block of the rotating-wave Hamiltonian.

    ``basis`` lists (oscillator level, sorted tuple of occupied mode indices);
    mode indices run over the grids in order. Energies are measured from the
    initial state, which is always ``basis[0]``.
    """

    n_initial: int
    grids: tuple
    basis: list
    hamiltonian: np.ndarray
    levels: np.ndarray = field(repr=False)
    occupations: np.ndarray = field(repr=False)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def mode_frequencies(self) -> np.ndarray:
        return np.concatenate([g.omegas for g in self.grids])


def _as_grids(grids) -> tuple:
    if isinstance(grids, ModeGrid):
        return (grids,)
    grids = tuple(grids)
    if not grids or not all(isinstance(g, ModeGrid) for g in grids):
        raise PreconditionError("need one or more ModeGrid instances")
    return grids


def sector_dimension(n_initial: int, n_modes: int, cascade: bool = False) -> int:
    lowest = 0 if cascade else n_initial - 1
    return sum(math.comb(n_modes + q - 1, q) for q in range(n_initial - lowest + 1))


def build_sector(n_initial: int, grids, config: PhysicalConfig, cascade: bool = False,
                 exchange: np.ndarray | None = None, energy: float | None = None,
                 max_dimension: int = MAX_DENSE_DIM) -> SectorModel:
    """Hamiltonian of the sector reached from |n_initial> with empty baths.

    By default only the first step down, |n-1> plus one quantum, is kept.
    ``cascade=True`` keeps every level down to the ground state. ``exchange``
    is an optional (M_reservoir x M_field) matrix of direct bath-bath hopping
    (see :func:`exchange_couplings`); it needs exactly a reservoir grid
    followed by a field grid. ``energy`` overrides the oscillator quantum w
    (used to put a bare photon level in place of the oscillator).
    """
    grids = _as_grids(grids)
    if n_initial < 1:
        raise PreconditionError(f"n_initial must be >= 1, got {n_initial}")
    w = config.omega if energy is None else float(energy)
    omegas = np.concatenate([g.omegas for g in grids])
    g_all = np.concatenate([g.couplings for g in grids])
    K = omegas.size
    dim = sector_dimension(n_initial, K, cascade)
    if dim > max_dimension:
        raise ResourceError(f"sector dimension {dim} exceeds the dense limit {max_dimension}")

    lowest = 0 if cascade else n_initial - 1
    basis = []
    for level in range(n_initial, lowest - 1, -1):
        basis.extend((level, modes) for modes in
                     combinations_with_replacement(range(K), n_initial - level))
    index = {state: i for i, state in enumerate(basis)}

    occupations = np.zeros((dim, K))
    levels = np.empty(dim, dtype=int)
    H = np.zeros((dim, dim))
    for i, (level, modes) in enumerate(basis):
        levels[i] = level
        for j in modes:
            occupations[i, j] += 1
        H[i, i] = (level - n_initial) * w + omegas[list(modes)].sum()

    for i, (level, modes) in enumerate(basis):
        if level == lowest:
            continue
        # a b_j^dag: oscillator drops one level and mode j gains a quantum
        for j in range(K):
            target = (level - 1, tuple(sorted(modes + (j,))))
            amp = g_all[j] * math.sqrt(level) * math.sqrt(occupations[i, j] + 1)
            k = index[target]
            H[i, k] = H[k, i] = amp

    if exchange is not None:
        if len(grids) != 2 or grids[0].kind is not BathKind.RESERVOIR or grids[1].kind is not BathKind.FIELD:
            raise PreconditionError("exchange hopping needs (reservoir grid, field grid)")
        M1 = len(grids[0])
        exchange = np.asarray(exchange, dtype=float)
        if exchange.shape != (M1, len(grids[1])):
            raise PreconditionError(f"exchange matrix must have shape {(M1, len(grids[1]))}")
        for i, (level, modes) in enumerate(basis):
            # b_j a_k^dag moves one quantum from reservoir mode j to photon mode k
            for j in set(mm for mm in modes if mm < M1):
                rest = list(modes)
                rest.remove(j)
                for kk in range(len(grids[1])):
                    k = M1 + kk
                    target = (level, tuple(sorted(rest + [k])))
                    amp = (exchange[j, kk] * math.sqrt(occupations[i, j])
                           * math.sqrt(rest.count(k) + 1))
                    t_idx = index[target]
                    H[i, t_idx] = H[t_idx, i] = amp

    return SectorModel(n_initial, grids, basis, H, levels, occupations)


@dataclass(frozen=True, eq=False)
class Evolution:
    times: np.ndarray
    p_stay: np.ndarray
    p_transfer: np.ndarray
    mode_populations: np.ndarray
    level_populations: dict
    norm: np.ndarray


def _diagonalize(H: np.ndarray):
    try:
        return scipy.linalg.eigh(H)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"sector diagonalization failed: {exc}") from None


def _amplitudes(E, V, initial: int, times: np.ndarray) -> np.ndarray:
    c = V[initial]
    return V @ (c[:, None] * np.exp(-1j * np.outer(E, times)))


def evolve_survival(model: SectorModel, times) -> Evolution:
    """Exact evolution from ``basis[0]`` via full diagonalization.

    Returns survival probability, total transferred probability, mean
    occupation of every bath mode and population of every oscillator level.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    E, V = _diagonalize(model.hamiltonian)
    pops = np.abs(_amplitudes(E, V, 0, times)) ** 2
    p_stay = pops[0]
    p_transfer = pops[1:].sum(axis=0)
    levels = {int(L): pops[model.levels == L].sum(axis=0) for L in np.unique(model.levels)}
    return Evolution(times, p_stay, p_transfer, model.occupations.T @ pops, levels, p_stay + p_transfer)


def first_order_transfer(model: SectorModel, times) -> np.ndarray:
    """Per-mode transfer from first-order perturbation theory, one row per time.

    |<n-1, 1_j| U_I |n>|^2 = n g_j^2 sin^2(D t / 2) / (D / 2)^2 with D the detuning.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    g = np.concatenate([grid.couplings for grid in model.grids])
    detuning = model.hamiltonian.diagonal()[1:g.size + 1]
    half = 0.5 * np.outer(times, detuning)
    sinc = times[:, None] * np.sinc(half / np.pi)
    return model.n_initial * g**2 * sinc**2


def fitted_rate(times, p_transfer, window: Sequence[float], bandwidth: float | None = None) -> float:
    """Least-squares slope of the transfer probability over ``window``.

    ``bandwidth`` (w_b - w_a) enables the lower regime bound t_lo >= 10/bandwidth.
    """
    times = np.asarray(times, dtype=float)
    p = np.asarray(p_transfer, dtype=float)
    t_lo, t_hi = map(float, window)
    if bandwidth is not None and t_lo < 10.0 / bandwidth:
        raise PreconditionError(
            f"window start {t_lo:.4g} violates t_lo >= 10/bandwidth = {10.0 / bandwidth:.4g}")
    sel = (times >= t_lo) & (times <= t_hi)
    if np.count_nonzero(sel) < 3:
        raise PreconditionError("fewer than three samples inside the fit window")
    if p[sel][-1] > 0.1:
        raise PreconditionError(
            f"transfer {p[sel][-1]:.3g} at window end violates the bound transfer(t_hi) <= 0.1")
    return float(np.polyfit(times[sel], p[sel], 1)[0])


def analytic_slope(kinds, coupling: CouplingFunction, config: PhysicalConfig, n: int = 1) -> float:
    """Vacuum down rate n * (sum of single-quantum rates) for the given bath kinds."""
    total = 0.0
    for kind in {BathKind(k) for k in kinds}:
        total += reservoir_decay_rate(config, coupling) if kind is BathKind.RESERVOIR \
            else field_decay_rate(config)
    return n * total


def golden_rule_window(rate: float, bandwidth: float, transfer: float = 0.05):
    """Fit window from just past the sinc transient to where ``transfer`` has accumulated."""
    if not rate > 0:
        raise PreconditionError("cannot choose a fit window for a zero rate")
    t_lo = 10.0 / bandwidth
    t_hi = transfer / rate
    if t_hi <= t_lo:
        raise PreconditionError("coupling too strong: the linear regime is shorter than the transient")
    return t_lo, t_hi


# ---------------------------------------------------------------------------
# thermal baths (Heisenberg picture)

@dataclass(frozen=True, eq=False)
class Ladder:
    times: np.ndarray
    p_down: np.ndarray
    p_stay: np.ndarray
    p_up: np.ndarray
    transmissivity: np.ndarray
    environment_occupation: np.ndarray
    tail_bound: float


def _beam_splitter_probability(m: int, n: int, k: int, eta: float) -> float:
    """P(m quanta leave in the oscillator port | |n>|k> enter) for transmissivity eta."""
    if m < 0 or m > n + k:
        return 0.0
    t, r = math.sqrt(eta), math.sqrt(max(0.0, 1.0 - eta))
    coeff = 0.0
    for i in range(max(0, m - k), min(n, m) + 1):
        coeff += (math.comb(n, i) * math.comb(k, m - i) * t ** i * (-r) ** (n - i)
                  * r ** (m - i) * t ** (k - m + i))
    norm = math.sqrt(math.factorial(m) * math.factorial(n + k - m)
                     / (math.factorial(n) * math.factorial(k)))
    return (coeff * norm) ** 2


def _thermal_cutoff(N: float, tail: float) -> int:
    if N <= 0:
        return 0
    ratio = N / (N + 1.0)
    # sum_{k > K} p_k = ratio^(K+1)
    return max(int(math.ceil(math.log(tail) / math.log(ratio))), 0)


def thermal_ladder(grids, config: PhysicalConfig, n: int, times,
                   temperatures: Sequence[float] | None = None, tail: float = 1e-13) -> Ladder:
    """Exact P(n -> n-1), P(n -> n), P(n -> n+1) with each bath in a Gibbs state.

    ``temperatures`` gives one temperature per grid (0 = empty bath). The
    effective environment mode's thermal distribution is truncated where the
    neglected tail mass drops below ``tail``; the largest such tail is
    reported as ``tail_bound``.
    """
    grids = _as_grids(grids)
    if n < 0:
        raise PreconditionError(f"n must be >= 0, got {n}")
    temperatures = [0.0] * len(grids) if temperatures is None else list(temperatures)
    if len(temperatures) != len(grids):
        raise PreconditionError("give one temperature per grid")
    nbar = np.concatenate([[bose_occupation(x, T) for x in g.omegas]
                           for g, T in zip(grids, temperatures)])
    single = build_sector(1, grids, config)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    E, V = _diagonalize(single.hamiltonian)
    u = _amplitudes(E, V, 0, times)
    eta = np.abs(u[0]) ** 2
    leaked = np.abs(u[1:]) ** 2
    lost = leaked.sum(axis=0)
    env = np.where(lost > 0, (nbar @ leaked) / np.where(lost > 0, lost, 1.0), 0.0)

    out = np.zeros((3, times.size))
    worst_tail = 0.0
    for idx, (e_t, N) in enumerate(zip(eta, env)):
        K = _thermal_cutoff(N, tail)
        ks = np.arange(K + 1)
        pk = (1.0 / (N + 1.0)) * (N / (N + 1.0)) ** ks if N > 0 else np.array([1.0])
        worst_tail = max(worst_tail, 1.0 - float(pk.sum()))
        for row, m in enumerate((n - 1, n, n + 1)):
            out[row, idx] = sum(p * _beam_splitter_probability(m, n, int(k), e_t)
                                for k, p in zip(ks, pk))
    return Ladder(times, out[0], out[1], out[2], eta, env, worst_tail)
