import itertools

import numpy as np
import pytest

from hvnsim.channel import D_MIN, ChannelParams, hop_latency, hop_success_prob
from hvnsim.links import LinkConfig, Uplink, evaluate_uplink, utility_latency_s
from hvnsim.strategy import (
    best_distributed_select,
    cellular_select,
    exhaustive_select,
    pareto_select,
    random_relay_select,
    snapped_relay_chains,
)
from hvnsim.topology import RoadScenario, VehiclePositions
from hvnsim.utility import UtilityParams

CP = ChannelParams()
LC = LinkConfig(include_wired_in_utility=False)
UP = UtilityParams()


def scenario(d0: float) -> RoadScenario:
    return RoadScenario(d0_m=d0)


def vehicles(positions, d0) -> VehiclePositions:
    return VehiclePositions(positions=tuple(positions), d0_m=d0)


def random_instance(rng, d_lo=5.0, d_hi=100.0, n_max=12):
    d0 = float(rng.uniform(d_lo, d_hi))
    n = int(rng.integers(0, n_max + 1))
    pos = np.sort(rng.uniform(0.2, d0 - 0.2, size=n)) if n else np.array([])
    pos = pos[np.concatenate(([True], np.diff(pos) > 1e-6))] if n else pos
    return vehicles(pos, d0), d0


class TestParetoSelect:
    def test_no_vehicles_returns_direct(self):
        d0 = 60.0
        out = pareto_select(vehicles([], d0), d0, CP, LC, UP, scenario(d0))
        assert out.chosen == Uplink.direct(d0)
        assert out.metrics.wireless_latency_s == hop_latency(d0, CP)
        assert out.metrics.success_prob == hop_success_prob(d0, CP)
        assert len(out.trace) == 1

    def test_accepts_dominating_two_hop(self):
        # at 130 m the midpoint relay improves latency, reliability and
        # utility simultaneously (verified via the links module directly)
        d0 = 130.0
        direct = evaluate_uplink(Uplink.direct(d0), CP, LC, UP, scenario(d0))
        two_hop = evaluate_uplink(Uplink.through_relays([65.0], d0), CP, LC, UP, scenario(d0))
        assert two_hop.wireless_latency_s <= direct.wireless_latency_s
        assert two_hop.success_prob >= direct.success_prob
        assert two_hop.utility >= direct.utility
        out = pareto_select(vehicles([65.0], d0), d0, CP, LC, UP, scenario(d0))
        assert out.chosen.hop_distances == (65.0, 65.0)
        assert len(out.trace) == 2

    def test_rejects_non_dominating_two_hop(self):
        # at 80 m relaying raises latency, so the conjunctive rule keeps direct
        d0 = 80.0
        direct = evaluate_uplink(Uplink.direct(d0), CP, LC, UP, scenario(d0))
        two_hop = evaluate_uplink(Uplink.through_relays([40.0], d0), CP, LC, UP, scenario(d0))
        assert two_hop.wireless_latency_s > direct.wireless_latency_s
        out = pareto_select(vehicles([40.0], d0), d0, CP, LC, UP, scenario(d0))
        assert out.chosen == Uplink.direct(d0)

    def test_utility_only_rule_accepts_higher_utility(self):
        # at 120 m the midpoint two-hop has the higher utility but pays more
        # latency, so the conjunctive rule keeps direct while utility_only
        # switches
        d0 = 120.0
        direct = evaluate_uplink(Uplink.direct(d0), CP, LC, UP, scenario(d0))
        two_hop = evaluate_uplink(Uplink.through_relays([60.0], d0), CP, LC, UP, scenario(d0))
        assert two_hop.utility > direct.utility
        assert two_hop.wireless_latency_s > direct.wireless_latency_s  # not dominating
        conj = pareto_select(vehicles([60.0], d0), d0, CP, LC, UP, scenario(d0))
        assert conj.chosen == Uplink.direct(d0)
        rel = pareto_select(
            vehicles([60.0], d0), d0, CP, LC, UP, scenario(d0), acceptance_rule="utility_only"
        )
        assert rel.chosen.hop_distances == (60.0, 60.0)

    def test_clustered_vehicles_collapse_to_single_relay_family(self):
        # all snap targets land on (or within an invalid gap of) one spot:
        # the candidate family is exactly {direct, via the middle vehicle}
        d0 = 130.0
        pos = np.array([64.98, 65.0, 65.02])
        chains = snapped_relay_chains(pos, d0)
        assert [tuple(c) for c in chains] == [(65.0,)]
        out = pareto_select(vehicles(pos, d0), d0, CP, LC, UP, scenario(d0))
        direct = evaluate_uplink(Uplink.direct(d0), CP, LC, UP, scenario(d0))
        via = evaluate_uplink(Uplink.through_relays([65.0], d0), CP, LC, UP, scenario(d0))
        best = via if (
            via.utility >= direct.utility
            and via.wireless_latency_s <= direct.wireless_latency_s
            and via.success_prob >= direct.success_prob
        ) else direct
        assert out.metrics.utility == best.utility

    def test_trace_weakly_improves(self):
        rng = np.random.default_rng(100)
        for _ in range(200):
            v, d0 = random_instance(rng, d_hi=160.0)
            out = pareto_select(v, d0, CP, LC, UP, scenario(d0))
            for (t1, p1, o1), (t2, p2, o2) in zip(out.trace, out.trace[1:]):
                assert t2 <= t1 and p2 >= p1 and o2 >= o1

    def test_never_worse_than_direct(self):
        rng = np.random.default_rng(101)
        for _ in range(200):
            v, d0 = random_instance(rng, d_hi=160.0)
            sc = scenario(d0)
            out = pareto_select(v, d0, CP, LC, UP, sc)
            direct = evaluate_uplink(Uplink.direct(d0), CP, LC, UP, sc)
            assert out.metrics.utility >= direct.utility
            assert utility_latency_s(out.metrics, LC) <= utility_latency_s(direct, LC)
            assert out.metrics.success_prob >= direct.success_prob


class TestCellularSelect:
    def test_always_direct_even_with_vehicles(self):
        d0 = 90.0
        out = cellular_select(d0, CP, LC, UP, scenario(d0))
        assert out.chosen == Uplink.direct(d0)

    def test_metrics_match_links_evaluation(self):
        d0 = 42.0
        out = cellular_select(d0, CP, LC, UP, scenario(d0))
        assert out.metrics == evaluate_uplink(Uplink.direct(d0), CP, LC, UP, scenario(d0))

    def test_half_probability_at_margin_root(self):
        out = cellular_select(76.8, CP, LC, UP, scenario(76.8))
        assert out.metrics.success_prob == pytest.approx(0.5, abs=5e-4)


class TestRandomRelaySelect:
    def test_no_vehicles_falls_back_to_direct(self):
        d0 = 120.0
        out = random_relay_select(
            vehicles([], d0), d0, CP, LC, UP, scenario(d0), np.random.default_rng(0)
        )
        assert out.chosen == Uplink.direct(d0)

    def test_terminates_first_when_rsu_in_range(self):
        d0 = 45.0  # below the 50 m communication range
        out = random_relay_select(
            vehicles([10.0, 20.0, 30.0], d0), d0, CP, LC, UP, scenario(d0),
            np.random.default_rng(1),
        )
        assert out.chosen == Uplink.direct(d0)

    def test_fixed_seed_is_deterministic(self):
        d0 = 160.0
        v = vehicles([15.0, 40.0, 70.0, 95.0, 130.0], d0)
        a = random_relay_select(v, d0, CP, LC, UP, scenario(d0), np.random.default_rng(7))
        b = random_relay_select(v, d0, CP, LC, UP, scenario(d0), np.random.default_rng(7))
        assert a.chosen == b.chosen and a.metrics == b.metrics

    def test_gap_beyond_range_falls_back_to_direct_hop(self):
        d0 = 160.0
        v = vehicles([20.0, 40.0], d0)  # nothing reachable after 40 m
        out = random_relay_select(v, d0, CP, LC, UP, scenario(d0), np.random.default_rng(3))
        assert out.chosen.hop_distances[-1] >= 120.0 - 40.0

    def test_hops_walk_strictly_toward_rsu(self):
        rng = np.random.default_rng(104)
        for _ in range(200):
            v, d0 = random_instance(rng, d_hi=250.0)
            out = random_relay_select(v, d0, CP, LC, UP, scenario(d0), rng)
            assert all(h > 0 for h in out.chosen.hop_distances)
            assert out.chosen.total_distance == pytest.approx(d0, rel=1e-9)


class TestExhaustiveSelect:
    def test_no_vehicles_returns_direct(self):
        d0 = 30.0
        out = exhaustive_select(vehicles([], d0), d0, CP, LC, UP, scenario(d0))
        assert out.chosen == Uplink.direct(d0)

    def test_matches_independent_brute_force(self):
        rng = np.random.default_rng(105)
        for _ in range(25):
            v, d0 = random_instance(rng, n_max=3)
            sc = scenario(d0)
            best_u, best_omega = None, -1.0
            idx = range(len(v))
            for k in range(len(v) + 1):
                for combo in itertools.combinations(idx, k):
                    relays = [v.positions[i] for i in combo]
                    pts = [0.0, *relays, d0]
                    if any(b - a < D_MIN for a, b in zip(pts, pts[1:])):
                        continue
                    u = Uplink.through_relays(relays, d0) if relays else Uplink.direct(d0)
                    m = evaluate_uplink(u, CP, LC, UP, sc)
                    if m.utility > best_omega:
                        best_u, best_omega = u, m.utility
            out = exhaustive_select(v, d0, CP, LC, UP, sc)
            assert out.metrics.utility == pytest.approx(best_omega, rel=1e-12)
            assert out.chosen == best_u

    def test_too_many_vehicles_refused(self):
        d0 = 300.0
        pos = np.linspace(5.0, 295.0, 21)
        with pytest.raises(ValueError, match="at most 20"):
            exhaustive_select(vehicles(pos, d0), d0, CP, LC, UP, scenario(d0))

    def test_prefer_feasible_switch(self):
        # direct link infeasible (reliability 0.78 < 0.9) but the midpoint
        # two-hop is feasible with lower utility
        d0 = 50.0
        v = vehicles([25.0], d0)
        sc = scenario(d0)
        unfiltered = exhaustive_select(v, d0, CP, LC, UP, sc)
        assert unfiltered.chosen == Uplink.direct(d0)
        assert not unfiltered.feasible
        filtered = exhaustive_select(v, d0, CP, LC, UP, sc, prefer_feasible=True)
        assert filtered.chosen.hop_distances == (25.0, 25.0)
        assert filtered.feasible
        assert filtered.metrics.utility < unfiltered.metrics.utility

    def test_prefer_feasible_falls_back_when_nothing_feasible(self):
        d0 = 300.0  # no subset of one far relay reaches 0.9 reliability
        v = vehicles([150.0], d0)
        sc = scenario(d0)
        out = exhaustive_select(v, d0, CP, LC, UP, sc, prefer_feasible=True)
        assert not out.feasible
        assert out.metrics.utility == exhaustive_select(v, d0, CP, LC, UP, sc).metrics.utility


class TestCrossStrategyDominance:
    def test_exhaustive_geq_pareto_geq_cellular(self):
        rng = np.random.default_rng(106)
        for _ in range(100):
            v, d0 = random_instance(rng)
            sc = scenario(d0)
            omega_ex = exhaustive_select(v, d0, CP, LC, UP, sc).metrics.utility
            omega_pa = pareto_select(v, d0, CP, LC, UP, sc).metrics.utility
            omega_ce = cellular_select(d0, CP, LC, UP, sc).metrics.utility
            assert omega_ex >= omega_pa * (1 - 1e-12)
            assert omega_pa >= omega_ce * (1 - 1e-12)

    def test_all_strategies_span_exactly_d0(self):
        rng = np.random.default_rng(107)
        for _ in range(100):
            v, d0 = random_instance(rng)
            sc = scenario(d0)
            outs = [
                pareto_select(v, d0, CP, LC, UP, sc),
                cellular_select(d0, CP, LC, UP, sc),
                random_relay_select(v, d0, CP, LC, UP, sc, rng),
                exhaustive_select(v, d0, CP, LC, UP, sc),
                best_distributed_select(v, d0, CP, LC, UP, sc),
            ]
            for out in outs:
                assert out.chosen.total_distance == pytest.approx(d0, rel=1e-9)


class TestBestDistributed:
    def test_multi_hop_whenever_possible(self):
        d0 = 60.0
        out = best_distributed_select(vehicles([30.0], d0), d0, CP, LC, UP, scenario(d0))
        assert out.chosen.n_hops == 2

    def test_direct_fallback_without_vehicles(self):
        d0 = 60.0
        out = best_distributed_select(vehicles([], d0), d0, CP, LC, UP, scenario(d0))
        assert out.chosen == Uplink.direct(d0)

    def test_picks_max_utility_chain(self):
        rng = np.random.default_rng(108)
        for _ in range(50):
            v, d0 = random_instance(rng, n_max=6)
            if len(v) == 0:
                continue
            sc = scenario(d0)
            out = best_distributed_select(v, d0, CP, LC, UP, sc)
            for chain in snapped_relay_chains(v.as_array(), d0):
                m = evaluate_uplink(Uplink.through_relays(chain, d0), CP, LC, UP, sc)
                assert out.metrics.utility >= m.utility * (1 - 1e-12)


class TestMinimumGapGuards:
    def test_near_coincident_vehicles_do_not_crash(self):
        d0 = 40.0
        pos = [9.99, 10.0, 10.02, 39.95]  # gaps below D_MIN, incl. near the RSU
        v = vehicles(pos, d0)
        sc = scenario(d0)
        for out in (
            pareto_select(v, d0, CP, LC, UP, sc),
            best_distributed_select(v, d0, CP, LC, UP, sc),
            exhaustive_select(v, d0, CP, LC, UP, sc),
            random_relay_select(v, d0, CP, LC, UP, sc, np.random.default_rng(4)),
        ):
            assert all(h >= D_MIN for h in out.chosen.hop_distances)
