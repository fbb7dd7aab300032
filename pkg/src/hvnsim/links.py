"""Full uplinks composed from per-hop channel results.

An uplink is an ordered list of hop distances from the source vehicle to
its RSU; one hop is the centralized (direct) case. Wireless latency adds a
fixed store-and-forward delay per intermediate relay; reliability is the
product of independent per-hop success probabilities; total latency adds
the scenario's wired RSU-to-provider term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import topology, utility
from .channel import D_MIN, ChannelParams, hop_latency, hop_success_prob
from .topology import RoadScenario
from .utility import CENTRALIZED, DISTRIBUTED, UtilityParams

__all__ = [
    "Uplink",
    "LinkConfig",
    "LinkMetrics",
    "wireless_latency",
    "link_reliability",
    "total_latency",
    "evaluate_uplink",
]


@dataclass(frozen=True)
class Uplink:
    """Ordered hop distances, source vehicle -> (relays) -> RSU."""

    hop_distances: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.hop_distances) < 1:
            raise ValueError("an uplink needs at least one hop")
        for d in self.hop_distances:
            if not d >= D_MIN:
                raise ValueError(f"hop distances must be >= {D_MIN} m, got {d}")

    @classmethod
    def direct(cls, d0: float) -> "Uplink":
        return cls(hop_distances=(float(d0),))

    @classmethod
    def through_relays(cls, relay_positions: Sequence[float], d0: float) -> "Uplink":
        """Build hops from consecutive gaps 0 -> relays -> RSU at ``d0``.

        Hop distances sum to exactly ``d0`` by construction.
        """
        pts = [0.0, *map(float, relay_positions), float(d0)]
        hops = tuple(b - a for a, b in zip(pts, pts[1:]))
        return cls(hop_distances=hops)

    @property
    def n_hops(self) -> int:
        return len(self.hop_distances)

    @property
    def total_distance(self) -> float:
        return float(sum(self.hop_distances))

    @property
    def structure(self) -> utility.Structure:
        return CENTRALIZED if self.n_hops == 1 else DISTRIBUTED


@dataclass(frozen=True)
class LinkConfig:
    """Per-relay processing delay and whether the utility's latency input
    includes the wired RSU-to-provider term (total vs wireless-only)."""

    relay_processing_delay_s: float = 100.0e-6
    include_wired_in_utility: bool = True

    def __post_init__(self) -> None:
        if self.relay_processing_delay_s < 0:
            raise ValueError(
                f"relay_processing_delay_s must be >= 0, got {self.relay_processing_delay_s}"
            )


@dataclass(frozen=True)
class LinkMetrics:
    wireless_latency_s: float
    wired_latency_units: float
    total_latency_s: float
    success_prob: float
    utility: float


def wireless_latency(uplink: Uplink, cp: ChannelParams, lc: LinkConfig) -> float:
    """Sum of per-hop latencies plus one processing delay per relay."""
    hops = np.asarray(uplink.hop_distances, dtype=float)
    per_hop = hop_latency(hops, cp)
    return float(np.sum(per_hop)) + (uplink.n_hops - 1) * lc.relay_processing_delay_s


def link_reliability(uplink: Uplink, cp: ChannelParams) -> float:
    """Product of independent per-hop success probabilities."""
    hops = np.asarray(uplink.hop_distances, dtype=float)
    return float(np.prod(hop_success_prob(hops, cp)))


def total_latency(
    uplink: Uplink, cp: ChannelParams, lc: LinkConfig, scenario: RoadScenario
) -> float:
    """Wireless latency plus the wired term converted to seconds."""
    wired_s = topology.wired_latency(scenario) * scenario.wired_display_unit_s
    return wireless_latency(uplink, cp, lc) + wired_s


def utility_latency_s(metrics: LinkMetrics, lc: LinkConfig) -> float:
    """The latency the utility (and feasibility) is judged on."""
    return metrics.total_latency_s if lc.include_wired_in_utility else metrics.wireless_latency_s


def evaluate_uplink(
    uplink: Uplink,
    cp: ChannelParams,
    lc: LinkConfig,
    up: UtilityParams,
    scenario: RoadScenario,
) -> LinkMetrics:
    """All metrics for one uplink, with the utility weighted by the uplink's
    own structure (one hop: centralized, otherwise distributed)."""
    hops = np.asarray(uplink.hop_distances, dtype=float)
    p_hop = hop_success_prob(hops, cp)
    t_wireless = float(np.sum(cp.slot_time_s / np.asarray(p_hop, dtype=float)))
    t_wireless += (uplink.n_hops - 1) * lc.relay_processing_delay_s
    p = float(np.prod(p_hop))
    wired_units = topology.wired_latency(scenario)
    t_total = t_wireless + wired_units * scenario.wired_display_unit_s
    t_for_utility = t_total if lc.include_wired_in_utility else t_wireless
    omega = utility.network_utility(t_for_utility, p, uplink.structure, up)
    return LinkMetrics(
        wireless_latency_s=t_wireless,
        wired_latency_units=wired_units,
        total_latency_s=t_total,
        success_prob=p,
        utility=omega,
    )
