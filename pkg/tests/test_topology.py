import math

import numpy as np
import pytest
from scipy.integrate import quad

from hvnsim.topology import (
    RoadScenario,
    VehiclePositions,
    cell_area_pdf,
    expected_rsu_count,
    sample_vehicles,
    wired_latency,
)

S = RoadScenario()


class TestRoadScenario:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"vehicle_density_per_m": 0.0},
            {"rsu_spacing_m": -1.0},
            {"inp_density_per_m2": 0.0},
            {"d0_m": 0.01},
            {"rsu_count_mode": "bogus"},
            {"wired_display_unit_s": 0.0},
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            RoadScenario(**kwargs)

    def test_table_defaults(self):
        assert (S.gamma_shape, S.gamma_rate_coeff) == (3.61, 3.57)
        assert S.wired_scale == 5e-4 and S.road_density_m_per_m2 == 0.004


class TestSampleVehicles:
    def test_identical_seed_identical_positions(self):
        s = RoadScenario(d0_m=100.0)
        a = sample_vehicles(s, np.random.default_rng(123))
        b = sample_vehicles(s, np.random.default_rng(123))
        assert a.positions == b.positions

    def test_positions_satisfy_invariants(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            d0 = float(rng.uniform(1.0, 300.0))
            s = RoadScenario(d0_m=d0, vehicle_density_per_m=float(rng.uniform(0.05, 0.3)))
            v = sample_vehicles(s, rng)
            pos = v.as_array()
            assert np.all(pos > 0.0) and np.all(pos < d0)
            assert np.all(np.diff(pos) > 0.0)

    def test_poisson_mean_count(self):
        s = RoadScenario(d0_m=100.0, vehicle_density_per_m=0.16)
        rng = np.random.default_rng(2024)
        counts = np.array([len(sample_vehicles(s, rng)) for _ in range(10_000)])
        # mean of 10^4 Poisson(16) draws: 3 sigma = 3*4/100 = 0.12
        assert abs(counts.mean() - 16.0) < 0.12
        assert abs(counts.var(ddof=1) - 16.0) < 1.5

    def test_near_zero_intensity_usually_empty(self):
        s = RoadScenario(d0_m=0.1, vehicle_density_per_m=1e-6)
        rng = np.random.default_rng(1)
        assert sum(len(sample_vehicles(s, rng)) for _ in range(100)) == 0

    def test_invariant_violations_rejected(self):
        with pytest.raises(ValueError):
            VehiclePositions(positions=(5.0, 5.0), d0_m=10.0)
        with pytest.raises(ValueError):
            VehiclePositions(positions=(0.0,), d0_m=10.0)
        with pytest.raises(ValueError):
            VehiclePositions(positions=(10.0,), d0_m=10.0)
        with pytest.raises(ValueError):
            VehiclePositions(positions=(7.0, 3.0), d0_m=10.0)


class TestCellAreaPdf:
    def test_normalizes_to_one(self):
        mean = S.gamma_shape / (S.gamma_rate_coeff * S.inp_density_per_m2)
        total, err = quad(
            lambda a: cell_area_pdf(a, S), 0.0, 60.0 * mean,
            limit=400, epsabs=1e-12, epsrel=1e-12,
        )
        assert err < 1e-9
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_mean_matches_closed_form(self):
        mean = S.gamma_shape / (S.gamma_rate_coeff * S.inp_density_per_m2)
        got, _ = quad(
            lambda a: a * cell_area_pdf(a, S), 0.0, 60.0 * mean,
            limit=400, epsabs=1e-12, epsrel=1e-12,
        )
        assert got == pytest.approx(mean, rel=1e-9)

    def test_default_mean_value(self):
        mean = S.gamma_shape / (S.gamma_rate_coeff * S.inp_density_per_m2)
        assert mean == pytest.approx(1.0112e7, rel=1e-3)

    def test_negative_area_rejected(self):
        with pytest.raises(ValueError):
            cell_area_pdf(-1.0, S)

    def test_array_input(self):
        out = cell_area_pdf(np.array([0.0, 1e6, 1e7]), S)
        assert out.shape == (3,) and out[0] == 0.0 and np.all(out[1:] > 0)


class TestExpectedRsuCount:
    def test_mean_area_mode_default(self):
        assert expected_rsu_count(S) == pytest.approx(404.4817927170869, rel=1e-12)

    def test_literal_mode(self):
        s = RoadScenario(rsu_count_mode="literal_eq17")
        assert expected_rsu_count(s) == pytest.approx(4e-5, rel=1e-12)

    def test_doubling_spacing_halves_both_modes(self):
        for mode in ("mean_area", "literal_eq17"):
            one = expected_rsu_count(RoadScenario(rsu_count_mode=mode, rsu_spacing_m=100.0))
            two = expected_rsu_count(RoadScenario(rsu_count_mode=mode, rsu_spacing_m=200.0))
            assert two == pytest.approx(one / 2.0, rel=1e-12)


class TestWiredLatency:
    def test_closed_form_matches_quadrature(self):
        # The radial integral the closed form collapses: for provider density
        # rho, integral_0^inf 2*rho*pi*r^2*exp(-pi*rho*r^2) dr = 1/(2*sqrt(rho)).
        for rho in np.linspace(1e-7, 3e-7, 9):
            s = RoadScenario(inp_density_per_m2=float(rho))
            integral, _ = quad(
                lambda r: 2.0 * rho * math.pi * r**2 * math.exp(-math.pi * rho * r**2),
                0.0,
                50.0 / math.sqrt(rho),
                limit=200,
            )
            # closed form: 0.5 * scale * E[N_RSU] / sqrt(rho)
            assert wired_latency(s) == pytest.approx(
                s.wired_scale * expected_rsu_count(s) * integral, rel=1e-6
            )
            assert integral == pytest.approx(0.5 / math.sqrt(rho), rel=1e-9)

    def test_default_value(self):
        assert wired_latency(S) == pytest.approx(319.77, abs=0.01)

    def test_linear_in_scale(self):
        s2 = RoadScenario(wired_scale=2 * S.wired_scale)
        assert wired_latency(s2) == pytest.approx(2 * wired_latency(S), rel=1e-12)
        s0 = RoadScenario(wired_scale=0.0)
        assert wired_latency(s0) == 0.0

    def test_strictly_decreasing_in_inp_density(self):
        rng = np.random.default_rng(21)
        for _ in range(500):
            a = float(rng.uniform(1e-7, 3e-7))
            b = float(rng.uniform(1e-7, 3e-7))
            if a == b:
                continue
            lo, hi = min(a, b), max(a, b)
            assert wired_latency(RoadScenario(inp_density_per_m2=lo)) > wired_latency(
                RoadScenario(inp_density_per_m2=hi)
            )

    def test_strictly_decreasing_in_rsu_spacing(self):
        rng = np.random.default_rng(22)
        for _ in range(500):
            a, b = sorted(rng.uniform(50.0, 200.0, size=2))
            if a == b:
                continue
            assert wired_latency(RoadScenario(rsu_spacing_m=float(a))) > wired_latency(
                RoadScenario(rsu_spacing_m=float(b))
            )
