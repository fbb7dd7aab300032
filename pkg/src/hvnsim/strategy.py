"""Uplink selection strategies.

``pareto_select`` implements the iterative Pareto-improvement search: starting
from the direct link, equally spaced relay targets are snapped to the nearest
actual vehicles for every relay count, and a candidate replaces the incumbent
only when utility, latency and reliability all weakly improve.
``cellular_select`` (always direct) and ``random_relay_select`` (greedy random
forwarding within a communication range) are the benchmark strategies, and
``exhaustive_select`` enumerates every ordered relay subset as a test oracle.

All selectors are pure given their inputs; ``random_relay_select`` takes an
explicit generator, so concurrent trials must each own an independent stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .channel import D_MIN, ChannelParams, hop_success_prob
from .links import LinkConfig, LinkMetrics, Uplink, evaluate_uplink, utility_latency_s
from .topology import RoadScenario, VehiclePositions
from .utility import CENTRALIZED, DISTRIBUTED, UtilityParams
from . import topology

__all__ = [
    "ACCEPTANCE_RULES",
    "StrategyOutcome",
    "pareto_select",
    "cellular_select",
    "random_relay_select",
    "exhaustive_select",
    "best_distributed_select",
]

ACCEPTANCE_RULES = ("paper_line20", "utility_only")

_EXHAUSTIVE_MAX_VEHICLES = 20
_EXHAUSTIVE_CHUNK = 8192


@dataclass(frozen=True)
class StrategyOutcome:
    """One strategy's pick for one trial.

    ``feasible`` reports whether the chosen uplink meets both requirements
    (reliability >= required and the utility-relevant latency <= required).
    ``trace`` records (latency, reliability, utility) at the initial link and
    after each accepted replacement; only the Pareto selector fills it.
    """

    strategy_id: str
    chosen: Uplink
    metrics: LinkMetrics
    feasible: bool
    trace: tuple[tuple[float, float, float], ...] = field(default=())


def _is_feasible(metrics: LinkMetrics, lc: LinkConfig, up: UtilityParams) -> bool:
    return (
        metrics.success_prob >= up.reliability_req
        and utility_latency_s(metrics, lc) <= up.latency_req_s
    )


def _outcome(
    strategy_id: str,
    uplink: Uplink,
    cp: ChannelParams,
    lc: LinkConfig,
    up: UtilityParams,
    scenario: RoadScenario,
    trace: tuple[tuple[float, float, float], ...] = (),
) -> StrategyOutcome:
    metrics = evaluate_uplink(uplink, cp, lc, up, scenario)
    return StrategyOutcome(
        strategy_id=strategy_id,
        chosen=uplink,
        metrics=metrics,
        feasible=_is_feasible(metrics, lc, up),
        trace=trace,
    )


def _batch_eval(
    hop_rows: list[np.ndarray],
    cp: ChannelParams,
    lc: LinkConfig,
    up: UtilityParams,
    wired_latency_s: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(utility-relevant latency, reliability, utility) per candidate row.

    One vectorized channel evaluation for the whole family; padding hops are
    masked out, so values match a per-uplink evaluation.
    """
    m = len(hop_rows)
    width = max(len(r) for r in hop_rows)
    hops = np.ones((m, width))
    valid = np.zeros((m, width), dtype=bool)
    lengths = np.empty(m, dtype=int)
    for i, row in enumerate(hop_rows):
        k = len(row)
        hops[i, :k] = row
        valid[i, :k] = True
        lengths[i] = k

    p_hop = hop_success_prob(hops, cp)
    p = np.prod(np.where(valid, p_hop, 1.0), axis=1)
    t_wireless = np.sum(np.where(valid, cp.slot_time_s / p_hop, 0.0), axis=1)
    t_wireless += (lengths - 1) * lc.relay_processing_delay_s

    t_util = t_wireless + (wired_latency_s if lc.include_wired_in_utility else 0.0)
    w = np.exp((up.latency_req_s - t_util) / up.latency_req_s)
    phi = np.exp((p - up.reliability_req) / up.reliability_req)
    alpha = np.where(lengths == 1, *_weight_pair(up, "latency"))
    beta = np.where(lengths == 1, *_weight_pair(up, "reliability"))
    omega = np.hypot(alpha * w, beta * phi)
    return t_util, p, omega


def _weight_pair(up: UtilityParams, kind: str) -> tuple[float, float]:
    # (centralized, distributed) weight for np.where(lengths == 1, ...)
    if kind == "latency":
        return up.weight_latency_centralized, up.weight_latency_distributed
    return up.weight_reliability_centralized, up.weight_reliability_distributed


def snapped_relay_chains(positions: np.ndarray, d0: float) -> list[np.ndarray]:
    """Candidate relay chains for the Pareto family.

    For each relay count n, equally spaced targets d0*k/(n+1) are snapped to
    the nearest vehicle (ties toward the smaller position); duplicate snaps
    collapse the chain, identical chains appear once, and chains producing a
    hop shorter than the minimum modelled distance are dropped.
    """
    chains: list[np.ndarray] = []
    seen: set[bytes] = set()
    n_v = len(positions)
    for n in range(1, n_v + 1):
        targets = d0 * np.arange(1, n + 1) / (n + 1)
        right = np.searchsorted(positions, targets)
        left = np.clip(right - 1, 0, n_v - 1)
        right = np.clip(right, 0, n_v - 1)
        use_left = np.abs(positions[left] - targets) <= np.abs(positions[right] - targets)
        chain = np.unique(positions[np.where(use_left, left, right)])
        key = chain.tobytes()
        if key in seen:
            continue
        seen.add(key)
        hops = np.diff(np.concatenate(([0.0], chain, [d0])))
        if np.all(hops >= D_MIN):
            chains.append(chain)
    return chains


@lru_cache(maxsize=64)
def _snapped_family(
    vehicles: VehiclePositions,
    d0: float,
    cp: ChannelParams,
    lc: LinkConfig,
    up: UtilityParams,
    scenario: RoadScenario,
) -> tuple[list[np.ndarray], np.ndarray, np.ndarray, np.ndarray]:
    """Direct link plus all snapped relay chains, batch-evaluated once.

    Cached so the Pareto selector and the distributed-structure evaluator
    share the work when run on the same trial.
    """
    positions = vehicles.as_array()
    wired_s = topology.wired_latency(scenario) * scenario.wired_display_unit_s
    chains = snapped_relay_chains(positions, d0)
    rows = [np.asarray(Uplink.direct(d0).hop_distances)]
    rows.extend(np.diff(np.concatenate(([0.0], c, [d0]))) for c in chains)
    t_util, p, omega = _batch_eval(rows, cp, lc, up, wired_s)
    return chains, t_util, p, omega


def pareto_select(
    vehicles: VehiclePositions,
    d0: float,
    cp: ChannelParams,
    lc: LinkConfig,
    up: UtilityParams,
    scenario: RoadScenario,
    acceptance_rule: str = "paper_line20",
) -> StrategyOutcome:
    """Pareto-improvement uplink selection.

    The direct link initializes the incumbent. Under ``paper_line20`` a
    candidate replaces it only when utility, latency and reliability all
    weakly improve; ``utility_only`` accepts on utility alone.
    """
    if acceptance_rule not in ACCEPTANCE_RULES:
        raise ValueError(f"acceptance_rule must be one of {ACCEPTANCE_RULES}")
    chains, t_util, p, omega = _snapped_family(vehicles, d0, cp, lc, up, scenario)

    best = 0
    trace = [(float(t_util[0]), float(p[0]), float(omega[0]))]
    for i in range(1, len(chains) + 1):
        if omega[i] >= omega[best] and (
            acceptance_rule == "utility_only"
            or (t_util[i] <= t_util[best] and p[i] >= p[best])
        ):
            best = i
            trace.append((float(t_util[i]), float(p[i]), float(omega[i])))

    chosen = Uplink.direct(d0) if best == 0 else Uplink.through_relays(chains[best - 1], d0)
    return _outcome("pareto", chosen, cp, lc, up, scenario, trace=tuple(trace))


def cellular_select(
    d0: float,
    cp: ChannelParams,
    lc: LinkConfig,
    up: UtilityParams,
    scenario: RoadScenario,
) -> StrategyOutcome:
    """Centralized benchmark: always the direct one-hop link."""
    return _outcome("cellular", Uplink.direct(d0), cp, lc, up, scenario)


def random_relay_select(
    vehicles: VehiclePositions,
    d0: float,
    cp: ChannelParams,
    lc: LinkConfig,
    up: UtilityParams,
    scenario: RoadScenario,
    rng: np.random.Generator,
    comm_range_m: float = 50.0,
) -> StrategyOutcome:
    """Greedy random forwarding benchmark.

    From the current node: if the RSU is in range, hop to it and stop;
    otherwise pick uniformly among in-range vehicles strictly closer to the
    RSU; with no candidate, fall back to a direct hop to the RSU.
    """
    if comm_range_m <= 0:
        raise ValueError(f"comm_range_m must be > 0, got {comm_range_m}")
    positions = vehicles.as_array()
    relays: list[float] = []
    current = 0.0
    while d0 - current > comm_range_m:
        lo = current + D_MIN
        hi = min(current + comm_range_m, d0 - D_MIN)
        candidates = positions[(positions >= lo) & (positions <= hi)]
        if candidates.size == 0:
            break
        current = float(candidates[rng.integers(candidates.size)])
        relays.append(current)
        positions = positions[positions > current]
    chosen = Uplink.through_relays(relays, d0) if relays else Uplink.direct(d0)
    return _outcome("random_relay", chosen, cp, lc, up, scenario)


def exhaustive_select(
    vehicles: VehiclePositions,
    d0: float,
    cp: ChannelParams,
    lc: LinkConfig,
    up: UtilityParams,
    scenario: RoadScenario,
    prefer_feasible: bool = False,
) -> StrategyOutcome:
    """Brute-force oracle over all ordered relay subsets (direct included).

    Returns the maximum-utility candidate; with ``prefer_feasible`` the
    argmax is restricted to requirement-satisfying candidates when any
    exist. Refuses more than 20 vehicles (2^N candidates).
    """
    n_v = len(vehicles)
    if n_v > _EXHAUSTIVE_MAX_VEHICLES:
        raise ValueError(
            f"exhaustive_select supports at most {_EXHAUSTIVE_MAX_VEHICLES} vehicles, got {n_v}"
        )
    positions = vehicles.as_array()
    wired_s = topology.wired_latency(scenario) * scenario.wired_display_unit_s

    def all_subsets():
        yield ()
        for k in range(1, n_v + 1):
            yield from combinations(range(n_v), k)

    best_subset: tuple[int, ...] | None = None
    best_feasible_subset: tuple[int, ...] | None = None
    best_omega = -np.inf
    best_feasible_omega = -np.inf

    rows: list[np.ndarray] = []
    row_subsets: list[tuple[int, ...]] = []

    def flush():
        nonlocal best_subset, best_feasible_subset, best_omega, best_feasible_omega
        if not rows:
            return
        t_util, p, omega = _batch_eval(rows, cp, lc, up, wired_s)
        i = int(np.argmax(omega))
        if omega[i] > best_omega:
            best_omega = float(omega[i])
            best_subset = row_subsets[i]
        feasible = (p >= up.reliability_req) & (t_util <= up.latency_req_s)
        if np.any(feasible):
            j = int(np.argmax(np.where(feasible, omega, -np.inf)))
            if omega[j] > best_feasible_omega:
                best_feasible_omega = float(omega[j])
                best_feasible_subset = row_subsets[j]
        rows.clear()
        row_subsets.clear()

    for subset in all_subsets():
        chain = positions[list(subset)]
        hops = np.diff(np.concatenate(([0.0], chain, [d0])))
        if np.all(hops >= D_MIN):
            rows.append(hops)
            row_subsets.append(subset)
        if len(rows) >= _EXHAUSTIVE_CHUNK:
            flush()
    flush()

    pick = best_subset
    if prefer_feasible and best_feasible_subset is not None:
        pick = best_feasible_subset
    assert pick is not None  # the direct link is always a valid candidate
    chosen = Uplink.direct(d0) if not pick else Uplink.through_relays(positions[list(pick)], d0)
    return _outcome("exhaustive", chosen, cp, lc, up, scenario)


def best_distributed_select(
    vehicles: VehiclePositions,
    d0: float,
    cp: ChannelParams,
    lc: LinkConfig,
    up: UtilityParams,
    scenario: RoadScenario,
) -> StrategyOutcome:
    """Best genuinely multi-hop link from the snapped candidate family.

    Used for the distributed-structure curves; degenerates to the direct
    link when no valid relay chain exists.
    """
    chains, _, _, omega = _snapped_family(vehicles, d0, cp, lc, up, scenario)
    if not chains:
        return _outcome("distributed", Uplink.direct(d0), cp, lc, up, scenario)
    chosen = Uplink.through_relays(chains[int(np.argmax(omega[1:]))], d0)
    return _outcome("distributed", chosen, cp, lc, up, scenario)
