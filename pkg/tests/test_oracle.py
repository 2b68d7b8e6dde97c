import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from mincoupling.core import (FieldQuantum, PhysicalConfig, PreconditionError, ResourceError,
                              Thermal, Vacuum, polarization_sum_x)
from mincoupling.exchange import photon_absorption_rate
from mincoupling.oracle import (FIELD_SOLID_ANGLE, ModeGrid, absorption_grid, analytic_slope,
                                build_sector, discretize, evolve_survival, exchange_couplings,
                                first_order_transfer, fitted_rate, golden_rule_window,
                                sector_dimension, spectral_density, thermal_ladder)
from mincoupling.rates import transition_rate

BAND = (0.2, 5.0)
WIDTH = BAND[1] - BAND[0]
RES = PhysicalConfig(m=1.0, omega=1.0, beta=2e-3)


def single_mode(x, g, config=RES):
    return ModeGrid(np.array([x]), np.array([g]), 1.0, "reservoir")


def oracle_slope(grids, config, n=1, samples=200):
    grids = grids if isinstance(grids, (list, tuple)) else [grids]
    kinds = [g.kind for g in grids]
    rate = analytic_slope(kinds, config.coupling, config, n)
    window = golden_rule_window(rate, WIDTH)
    times = np.linspace(window[0], window[1], samples)
    model = build_sector(n, grids, config)
    fit = fitted_rate(times, evolve_survival(model, times).p_transfer, window, WIDTH)
    return fit, rate


class TestDiscretization:
    def test_reservoir_density_is_flat(self):
        grid = discretize("reservoir", RES.coupling, RES, BAND, 40)
        assert np.allclose(grid.couplings**2, RES.beta / (2 * math.pi * RES.m) * grid.spacing,
                           rtol=1e-13)
        assert grid.spacing == pytest.approx(WIDTH / 40)
        assert grid.omegas[0] == pytest.approx(BAND[0] + 0.5 * grid.spacing)

    def test_field_density(self):
        cfg = RES.replace(e=0.3)
        x = np.array([0.5, 1.0, 3.0])
        J = spectral_density("field", cfg.coupling, cfg, x)
        assert np.allclose(J, cfg.e**2 * x**2 / (12 * math.pi**2 * cfg.m), rtol=1e-14)

    @pytest.mark.parametrize("kind", ["reservoir", "field"])
    def test_golden_rule_identity(self, kind):
        # 2 pi J(w) is the single-quantum decay rate for both weightings
        cfg = PhysicalConfig(m=1.7, omega=1.3, e=0.4, beta=0.01)
        rate = analytic_slope([kind], cfg.coupling, cfg)
        for weighting in ("golden_rule", "interaction"):
            J = spectral_density(kind, cfg.coupling, cfg, cfg.omega, weighting)
            assert 2 * math.pi * J == pytest.approx(rate, rel=1e-13)

    def test_field_solid_angle_from_geometry(self):
        value, _ = integrate.dblquad(
            lambda th, ph: polarization_sum_x([math.cos(th), math.sin(th) * math.cos(ph),
                                               math.sin(th) * math.sin(ph)]) * math.sin(th),
            0, 2 * math.pi, 0, math.pi)
        assert value == pytest.approx(FIELD_SOLID_ANGLE, rel=1e-10)

    def test_band_must_bracket_frequency(self):
        with pytest.raises(PreconditionError):
            discretize("reservoir", RES.coupling, RES, (1.5, 5.0), 10)


class TestSector:
    @pytest.mark.parametrize("M", [1, 7, 50])
    def test_first_step_dimension(self, M):
        grid = discretize("reservoir", RES.coupling, RES, BAND, M)
        assert build_sector(1, grid, RES).dimension == M + 1
        assert build_sector(3, grid, RES).dimension == M + 1

    def test_two_baths(self):
        cfg = RES.replace(e=0.1)
        grids = [discretize("reservoir", cfg.coupling, cfg, BAND, 9),
                 discretize("field", cfg.coupling, cfg, BAND, 6)]
        model = build_sector(1, grids, cfg)
        assert model.dimension == 9 + 6 + 1
        assert np.array_equal(model.hamiltonian, model.hamiltonian.T)

    def test_cascade_dimension(self):
        grid = discretize("reservoir", RES.coupling, RES, BAND, 6)
        model = build_sector(2, grid, RES, cascade=True)
        assert model.dimension == 1 + 6 + 21 == sector_dimension(2, 6, cascade=True)

    def test_resource_limit(self):
        grid = discretize("reservoir", RES.coupling, RES, BAND, 200)
        with pytest.raises(ResourceError):
            build_sector(3, grid, RES, cascade=True)


class TestExactDynamics:
    def test_resonant_rabi(self):
        g = 0.03
        times = np.linspace(0, 200, 401)
        ev = evolve_survival(build_sector(1, single_mode(1.0, g), RES), times)
        assert np.max(np.abs(ev.p_transfer - np.sin(g * times) ** 2)) < 1e-8

    def test_two_quanta_rabi(self):
        g = 0.02
        times = np.linspace(0, 200, 401)
        ev = evolve_survival(build_sector(2, single_mode(1.0, g), RES), times)
        assert np.max(np.abs(ev.p_transfer - np.sin(math.sqrt(2) * g * times) ** 2)) < 1e-8

    @settings(max_examples=25, deadline=None)
    @given(g=st.floats(1e-3, 0.2), detuning=st.floats(-0.5, 0.5))
    def test_detuned_two_level(self, g, detuning):
        times = np.linspace(0, 100, 101)
        ev = evolve_survival(build_sector(1, single_mode(1.0 + detuning, g), RES), times)
        omega_r = math.sqrt(g**2 + detuning**2 / 4)
        expected = g**2 / omega_r**2 * np.sin(omega_r * times) ** 2
        assert np.max(np.abs(ev.p_transfer - expected)) < 1e-8

    def test_unitarity(self):
        grid = discretize("reservoir", RES.coupling, RES, BAND, 60)
        times = np.linspace(0, 2000, 301)
        ev = evolve_survival(build_sector(2, grid, RES, cascade=True), times)
        assert np.max(np.abs(ev.norm - 1)) < 1e-10
        levels = sum(ev.level_populations.values())
        assert np.max(np.abs(levels - 1)) < 1e-10

    def test_cascade_reaches_ground_state(self):
        cfg = PhysicalConfig(m=1.0, omega=1.0, beta=0.02)
        grid = discretize("reservoir", cfg.coupling, cfg, BAND, 60)
        ev = evolve_survival(build_sector(2, grid, cfg, cascade=True), [0.0, 10.0, 30.0])
        p0 = ev.level_populations[0]
        assert p0[0] < 1e-20 and 1e-4 < p0[1] < p0[2]

    def test_first_order_per_mode(self):
        grid = discretize("reservoir", RES.coupling, RES, BAND, 200)
        model = build_sector(1, grid, RES)
        times = np.array([1.0, 3.0, 5.0])
        ev = evolve_survival(model, times)
        assert ev.p_transfer[-1] < 0.01
        approx = first_order_transfer(model, times)
        exact = ev.mode_populations.T
        big = approx > 1e-3 * approx.max()
        assert np.max(np.abs(exact[big] / approx[big] - 1)) < 0.05


class TestGoldenRule:
    def test_fit_recovers_a_line(self):
        t = np.linspace(0, 10, 50)
        assert fitted_rate(t, 0.003 * t + 1e-4, (3.0, 9.0)) == pytest.approx(0.003, rel=1e-12)

    def test_fit_preconditions(self):
        t = np.linspace(0, 10, 50)
        with pytest.raises(PreconditionError):
            fitted_rate(t, 0.003 * t, (1.0, 9.0), bandwidth=4.8)
        with pytest.raises(PreconditionError):
            fitted_rate(t, 0.05 * t, (3.0, 9.0))
        with pytest.raises(PreconditionError):
            fitted_rate(t, 0.003 * t, (3.0, 3.1))

    def test_reservoir_slope(self):
        fit, rate = oracle_slope(discretize("reservoir", RES.coupling, RES, BAND, 400), RES)
        assert fit == pytest.approx(rate, rel=0.1)

    def test_interaction_weighting(self):
        grid = discretize("reservoir", RES.coupling, RES, BAND, 400, "interaction")
        fit, rate = oracle_slope(grid, RES)
        assert fit == pytest.approx(rate, rel=0.1)

    def test_invariant_under_mode_doubling(self):
        a, _ = oracle_slope(discretize("reservoir", RES.coupling, RES, BAND, 400), RES)
        b, _ = oracle_slope(discretize("reservoir", RES.coupling, RES, BAND, 800), RES)
        assert b == pytest.approx(a, rel=0.05)

    def test_slope_scales_with_level(self):
        grid = discretize("reservoir", RES.coupling, RES, BAND, 400)
        one, _ = oracle_slope(grid, RES, n=1)
        two, _ = oracle_slope(grid, RES, n=2)
        assert two / one == pytest.approx(2.0, rel=0.1)

    def test_recurrence_after_inverse_spacing(self):
        grid = discretize("reservoir", RES.coupling, RES, BAND, 400)
        rate = RES.damping_rate
        t_rec = 2 * math.pi / grid.spacing
        # the discrete bath rephases at 2 pi / spacing and the echo interferes afterwards
        times = np.array([0.5 * t_rec, 0.95 * t_rec, 1.4 * t_rec])
        ev = evolve_survival(build_sector(1, grid, RES), times)
        ratio = ev.p_stay / np.exp(-rate * times)
        assert np.all(np.abs(ratio[:2] - 1) < 0.01)
        assert abs(ratio[2] - 1) > 0.2


def test_photon_absorption_by_reservoir():
    cfg = PhysicalConfig(m=1.0, omega=1.0, e=10.0, beta=2e-3)
    photon = FieldQuantum((0.0, 0.6, 0.8), 1.0)
    rate = photon_absorption_rate(photon, Vacuum(), cfg.coupling, cfg).smooth
    grid = absorption_grid(photon, cfg.coupling, cfg, BAND, 400)
    window = golden_rule_window(rate, WIDTH)
    times = np.linspace(window[0], window[1], 200)
    ev = evolve_survival(build_sector(1, grid, cfg, energy=photon.omega_p), times)
    assert fitted_rate(times, ev.p_transfer, window, WIDTH) == pytest.approx(rate, rel=0.1)


def test_exchange_hopping_is_rank_one_and_hermitian():
    cfg = RES.replace(e=0.5)
    grids = [discretize("reservoir", cfg.coupling, cfg, BAND, 8),
             discretize("field", cfg.coupling, cfg, BAND, 5)]
    c = exchange_couplings(grids[0], grids[1], cfg.coupling, cfg)
    assert np.linalg.matrix_rank(c) == 1
    model = build_sector(2, grids, cfg, cascade=True, exchange=c)
    assert np.array_equal(model.hamiltonian, model.hamiltonian.T)
    ev = evolve_survival(model, np.linspace(0, 50, 11))
    assert np.max(np.abs(ev.norm - 1)) < 1e-10


THERMAL_CASES = {3: (0.0, 1.0), 7: (1.0, 0.0), 9: (1.0, 1.0)}


@pytest.mark.slow
@pytest.mark.parametrize("case", sorted(THERMAL_CASES))
def test_thermal_rates(case):
    cfg = PhysicalConfig(m=1.0, omega=1.0, e=math.sqrt(6 * math.pi * 2e-4), beta=2e-4)
    t_field, t_res = THERMAL_CASES[case]
    grids = [discretize("field", cfg.coupling, cfg, BAND, 800),
             discretize("reservoir", cfg.coupling, cfg, BAND, 800)]
    field = Thermal(t_field) if t_field else Vacuum()
    reservoir = Thermal(t_res) if t_res else Vacuum()
    n = 1
    down = transition_rate(n, "down", field, reservoir, cfg).smooth
    up = transition_rate(n, "up", field, reservoir, cfg).smooth
    window = golden_rule_window(down + up, WIDTH, transfer=0.02)
    times = np.linspace(window[0], window[1], 40)
    ladder = thermal_ladder(grids, cfg, n, times, [t_field, t_res])
    assert ladder.tail_bound < 1e-12
    assert np.allclose(ladder.p_down + ladder.p_stay + ladder.p_up <= 1 + 1e-12, True)
    assert fitted_rate(times, ladder.p_down, window, WIDTH) == pytest.approx(down, rel=0.1)
    assert fitted_rate(times, ladder.p_up, window, WIDTH) == pytest.approx(up, rel=0.1)


def test_thermal_ladder_at_zero_temperature_matches_sector():
    grid = discretize("reservoir", RES.coupling, RES, BAND, 100)
    times = np.linspace(0, 40, 9)
    ladder = thermal_ladder(grid, RES, 1, times, [0.0])
    ev = evolve_survival(build_sector(1, grid, RES), times)
    assert np.allclose(ladder.p_down, ev.p_transfer, atol=1e-12)
    assert np.allclose(ladder.p_up, 0.0, atol=1e-14)
