import math

import numpy as np
import pytest
from scipy import integrate, special

from mincoupling.core import CouplingFunction, NumericalError, PhysicalConfig, PreconditionError
from mincoupling.dynamics import Trajectory, harmonic_trajectory
from mincoupling.kernel import MemoryKernel, convolve_memory, gamma, gamma_on_grid, markov_residual

BETA, CUTOFF = 0.05, 100.0


@pytest.fixture
def kernel():
    return MemoryKernel(CouplingFunction.special(BETA), m=1.0, cutoff=CUTOFF)


def sinc_kernel(t, beta=BETA, m=1.0, cutoff=CUTOFF):
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 0, t, 1.0)
    return 2 * beta / (math.pi * m) * np.where(t > 0, np.sin(cutoff * t) / safe, cutoff)


def constant_velocity(n, h):
    return Trajectory(0.0, h, h * np.arange(n), np.ones(n))


def test_special_coupling_matches_sine_over_t(kernel):
    t = np.array([1e-4, 0.013, 0.5, 2.0, 7.3, 31.0])
    assert np.allclose(gamma(kernel, t), sinc_kernel(t), rtol=0, atol=1e-12)


def test_value_at_origin(kernel):
    assert gamma(kernel, 0.0) == pytest.approx(2 * BETA * CUTOFF / math.pi, rel=1e-13)


def test_linear_in_friction(kernel):
    doubled = MemoryKernel(CouplingFunction.special(2 * BETA), 1.0, CUTOFF)
    t = np.linspace(0, 5, 41)
    assert np.allclose(gamma(doubled, t), 2 * gamma(kernel, t), rtol=1e-14, atol=1e-14)


def test_general_coupling_against_adaptive_quadrature():
    # |f|^2 w^3 = w^2 e^{-w}: a non-flat spectral weight
    coupling = CouplingFunction.general(lambda w: np.exp(-w) / w)
    kern = MemoryKernel(coupling, m=2.0, cutoff=20.0)
    for t in (0.0, 0.7, 3.0):
        ref, _ = integrate.quad(lambda w: w**2 * np.exp(-w) * np.cos(w * t), 0, 20.0,
                                epsabs=1e-13, epsrel=1e-12, limit=200)
        assert gamma(kern, t) == pytest.approx(8 * math.pi / 2.0 * ref, rel=1e-10)


def test_unresolvable_integrand_is_reported():
    # integrable singularity at w -> 0 defeats the fixed panel rule
    kern = MemoryKernel(CouplingFunction.general(lambda w: w**-3.9), m=1.0, cutoff=10.0)
    with pytest.raises(NumericalError):
        gamma(kern, 1.0)


def test_uniform_grid_path_matches_pointwise(kernel):
    h, n = 0.004, 3000
    assert np.allclose(gamma_on_grid(kernel, h, n), gamma(kernel, h * np.arange(n)),
                       rtol=0, atol=1e-12)


def test_quadrature_points_floor():
    with pytest.raises(ValueError):
        MemoryKernel(CouplingFunction.special(1.0), 1.0, 10.0, quadrature_points=32)


class TestConvolution:
    def test_zero_velocity(self, kernel):
        traj = Trajectory(0.0, 0.004, np.ones(500), np.zeros(500))
        assert np.all(convolve_memory(kernel, traj) == 0.0)

    def test_constant_velocity_sine_integral(self, kernel):
        # trapezoid error against (2/pi) Si(cutoff t) is second order in h
        errors = []
        for h in (0.004, 0.002, 0.001):
            traj = constant_velocity(int(12 / h), h)
            expected = BETA * 2 / math.pi * special.sici(CUTOFF * traj.t)[0]
            errors.append(np.max(np.abs(convolve_memory(kernel, traj) - expected)))
        assert errors[-1] < 5e-4 * BETA
        assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.05)
        assert errors[1] / errors[2] == pytest.approx(4.0, rel=0.05)

    def test_constant_velocity_long_time_limit(self, kernel):
        traj = constant_velocity(3000, 0.004)
        tail = convolve_memory(kernel, traj)[traj.t > 100 / CUTOFF]
        assert np.all(np.abs(tail - BETA) < 0.01 * BETA)

    def test_harmonic_velocity_becomes_markovian(self, kernel):
        h = 0.004
        t = h * np.arange(int(4 * math.pi / h))
        traj = Trajectory(0.0, h, np.sin(t), np.cos(t))
        drag = convolve_memory(kernel, traj)
        late = t > 1.0
        assert np.max(np.abs(drag[late] - BETA * np.cos(t[late]))) < 0.02 * BETA

    def test_linear_in_velocity(self, kernel):
        rng = np.random.default_rng(3)
        h, n = 0.004, 800
        a, b = rng.normal(size=n), rng.normal(size=n)
        ca = convolve_memory(kernel, Trajectory(0.0, h, np.zeros(n), a))
        cb = convolve_memory(kernel, Trajectory(0.0, h, np.zeros(n), b))
        cab = convolve_memory(kernel, Trajectory(0.0, h, np.zeros(n), 2 * a - 3 * b))
        assert np.allclose(cab, 2 * ca - 3 * cb, atol=1e-12)

    def test_step_too_coarse(self, kernel):
        with pytest.raises(PreconditionError):
            convolve_memory(kernel, constant_velocity(10, 0.5 / CUTOFF))


class TestMarkovResidual:
    def test_zero_velocity(self, kernel):
        traj = Trajectory(0.0, 0.004, np.zeros(500), np.zeros(500))
        assert markov_residual(kernel, traj, BETA) == 0.0

    def test_below_two_percent(self, kernel):
        traj = harmonic_trajectory(1.0, 10 * math.pi, 0.4 / CUTOFF)
        assert markov_residual(kernel, traj, BETA) < 0.02 * BETA * np.abs(traj.qdot).max()

    def test_shrinks_with_cutoff(self):
        cfg = PhysicalConfig(m=1.0, omega=1.0, beta=BETA, cutoff=50.0)
        residuals = []
        for cutoff in (25.0, 50.0, 100.0):
            kern = MemoryKernel.from_config(cfg.replace(cutoff=cutoff))
            traj = harmonic_trajectory(1.0, 6 * math.pi, 0.45 / cutoff)
            residuals.append(markov_residual(kern, traj, BETA))
        assert residuals[0] > residuals[1] > residuals[2]

    def test_needs_special_coupling(self):
        kern = MemoryKernel(CouplingFunction.general(lambda w: 1 / w**3), 1.0, 10.0)
        with pytest.raises(PreconditionError):
            markov_residual(kern, harmonic_trajectory(1.0, 10.0, 0.01), 1.0)
