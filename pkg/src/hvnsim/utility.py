"""Network utility: exponential latency/reliability terms and their weighted
Euclidean combination, plus the centralized/distributed distance rule.

Both elementary terms are strictly positive and equal 1 exactly when the
corresponding requirement is met with equality; they exceed 1 iff the
requirement is satisfied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

__all__ = [
    "CENTRALIZED",
    "DISTRIBUTED",
    "Structure",
    "UtilityParams",
    "latency_utility",
    "reliability_utility",
    "network_utility",
    "classify_structure",
]

Structure = Literal["centralized", "distributed"]
CENTRALIZED: Structure = "centralized"
DISTRIBUTED: Structure = "distributed"


@dataclass(frozen=True)
class UtilityParams:
    latency_req_s: float = 1.0e-3
    reliability_req: float = 0.9
    weight_latency_centralized: float = 0.5
    weight_reliability_centralized: float = 0.5
    weight_latency_distributed: float = 0.5
    weight_reliability_distributed: float = 0.5
    distance_threshold_m: float = 25.0

    def __post_init__(self) -> None:
        if not self.latency_req_s > 0:
            raise ValueError(f"latency_req_s must be > 0, got {self.latency_req_s}")
        if not 0 < self.reliability_req <= 1:
            raise ValueError(f"reliability_req must be in (0, 1], got {self.reliability_req}")
        for name in (
            "weight_latency_centralized",
            "weight_reliability_centralized",
            "weight_latency_distributed",
            "weight_reliability_distributed",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.weight_latency_centralized + self.weight_reliability_centralized == 0:
            raise ValueError("centralized weights must not both be zero")
        if self.weight_latency_distributed + self.weight_reliability_distributed == 0:
            raise ValueError("distributed weights must not both be zero")
        if not self.distance_threshold_m > 0:
            raise ValueError(
                f"distance_threshold_m must be > 0, got {self.distance_threshold_m}"
            )

    def weights(self, structure: Structure) -> tuple[float, float]:
        """(latency weight, reliability weight) for the given structure."""
        if structure == CENTRALIZED:
            return self.weight_latency_centralized, self.weight_reliability_centralized
        if structure == DISTRIBUTED:
            return self.weight_latency_distributed, self.weight_reliability_distributed
        raise ValueError(f"unknown structure {structure!r}")


def latency_utility(t: float, params: UtilityParams) -> float:
    """exp((T_req - t) / T_req); 1 at the requirement, e at zero latency."""
    if t < 0:
        raise ValueError(f"latency must be >= 0, got {t}")
    return math.exp((params.latency_req_s - t) / params.latency_req_s)


def reliability_utility(p: float, params: UtilityParams) -> float:
    """exp((p - P_req) / P_req); 1 at the requirement."""
    if not 0 <= p <= 1:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    return math.exp((p - params.reliability_req) / params.reliability_req)


def network_utility(t: float, p: float, structure: Structure, params: UtilityParams) -> float:
    """Weighted Euclidean norm of the latency and reliability utilities."""
    alpha, beta = params.weights(structure)
    return math.hypot(alpha * latency_utility(t, params), beta * reliability_utility(p, params))


def classify_structure(x: float, params: UtilityParams) -> Structure:
    """Structure the controller adopts at vehicle-to-RSU distance ``x``:
    centralized iff x <= distance threshold."""
    if x < 0:
        raise ValueError(f"distance must be >= 0, got {x}")
    return CENTRALIZED if x <= params.distance_threshold_m else DISTRIBUTED
