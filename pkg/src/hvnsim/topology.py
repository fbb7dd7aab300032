"""Road, RSU and infrastructure-provider geometry.

Vehicles are a Poisson point process snapshot on the segment between the
source vehicle and its RSU. Infrastructure-provider (Inp) coverage cells
follow the standard Gamma approximation for Poisson-Voronoi cell areas,
from which the expected number of RSUs per cell and the wired
RSU-to-provider latency are derived in closed form.

Wired latency is expressed in model time units; ``wired_display_unit_s``
converts one unit to seconds (default: 1 unit = 1 ms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import D_MIN

__all__ = [
    "RoadScenario",
    "VehiclePositions",
    "sample_vehicles",
    "cell_area_pdf",
    "expected_rsu_count",
    "wired_latency",
]

_RSU_COUNT_MODES = ("mean_area", "literal_eq17")


@dataclass(frozen=True)
class RoadScenario:
    """Geometry and density parameters of one simulated road/RSU/Inp layout.

    ``rsu_count_mode`` selects how the expected RSU count per provider cell
    is computed: ``mean_area`` (road length = road density times mean cell
    area, the default) or ``literal_eq17`` (integrates the bare area PDF,
    which collapses to road density alone; kept for letter-of-the-model
    comparisons).
    """

    d0_m: float = 50.0
    vehicle_density_per_m: float = 0.16
    rsu_spacing_m: float = 100.0
    inp_density_per_m2: float = 1.0e-7
    road_density_m_per_m2: float = 0.004
    gamma_shape: float = 3.61
    gamma_rate_coeff: float = 3.57
    wired_scale: float = 5.0e-4
    rsu_count_mode: str = "mean_area"
    wired_display_unit_s: float = 1.0e-3

    def __post_init__(self) -> None:
        positives = {
            "vehicle_density_per_m": self.vehicle_density_per_m,
            "rsu_spacing_m": self.rsu_spacing_m,
            "inp_density_per_m2": self.inp_density_per_m2,
            "road_density_m_per_m2": self.road_density_m_per_m2,
            "gamma_shape": self.gamma_shape,
            "gamma_rate_coeff": self.gamma_rate_coeff,
            "wired_display_unit_s": self.wired_display_unit_s,
        }
        for name, value in positives.items():
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value}")
        if self.wired_scale < 0:
            raise ValueError(f"wired_scale must be >= 0, got {self.wired_scale}")
        if self.d0_m < D_MIN:
            raise ValueError(f"d0_m must be >= {D_MIN}, got {self.d0_m}")
        if self.rsu_count_mode not in _RSU_COUNT_MODES:
            raise ValueError(
                f"rsu_count_mode must be one of {_RSU_COUNT_MODES}, got {self.rsu_count_mode!r}"
            )


@dataclass(frozen=True)
class VehiclePositions:
    """Sorted relay-candidate positions, meters from the source toward the RSU.

    Positions are strictly increasing and lie in the open interval (0, d0).
    """

    positions: tuple[float, ...]
    d0_m: float

    def __post_init__(self) -> None:
        prev = 0.0
        for x in self.positions:
            if not (prev < x < self.d0_m):
                raise ValueError(
                    f"positions must be strictly increasing inside (0, {self.d0_m}), got {x}"
                )
            prev = x

    def __len__(self) -> int:
        return len(self.positions)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.positions, dtype=float)


def sample_vehicles(scenario: RoadScenario, rng: np.random.Generator) -> VehiclePositions:
    """Sample one Poisson-process snapshot of relay candidates.

    Count ~ Poisson(density * d0), positions i.i.d. uniform on (0, d0),
    returned sorted. Identical generator state gives identical output.
    """
    n = int(rng.poisson(scenario.vehicle_density_per_m * scenario.d0_m))
    pos = np.sort(rng.uniform(0.0, scenario.d0_m, size=n))
    # Exact boundary hits or duplicates have measure zero but would break
    # the strict-ordering invariant; redraw until clean.
    while n > 0 and (
        pos[0] <= 0.0 or pos[-1] >= scenario.d0_m or np.any(np.diff(pos) <= 0.0)
    ):
        pos = np.sort(rng.uniform(0.0, scenario.d0_m, size=n))
    return VehiclePositions(positions=tuple(float(x) for x in pos), d0_m=scenario.d0_m)


def cell_area_pdf(area, scenario: RoadScenario):
    """Density of the provider-cell area law at ``area`` square meters.

    Gamma distribution with shape ``gamma_shape`` and rate
    ``gamma_rate_coeff * inp_density_per_m2``; mean shape/rate.
    """
    arr = np.asarray(area, dtype=float)
    if np.any(arr < 0):
        raise ValueError("area must be >= 0")
    a = scenario.gamma_shape
    rate = scenario.gamma_rate_coeff * scenario.inp_density_per_m2
    out = np.zeros_like(arr)
    pos = arr > 0
    if np.any(pos):
        x = arr[pos]
        out[pos] = np.exp(
            a * math.log(rate) - math.lgamma(a) + (a - 1.0) * np.log(x) - rate * x
        )
    return float(out) if np.ndim(area) == 0 else out


def expected_rsu_count(scenario: RoadScenario) -> float:
    """Expected number of RSUs inside one provider cell.

    Road length in the cell divided by RSU spacing; see ``rsu_count_mode``
    on :class:`RoadScenario` for the two road-length conventions.
    """
    if scenario.rsu_count_mode == "literal_eq17":
        road_length = scenario.road_density_m_per_m2
    else:
        mean_area = scenario.gamma_shape / (
            scenario.gamma_rate_coeff * scenario.inp_density_per_m2
        )
        road_length = scenario.road_density_m_per_m2 * mean_area
    return road_length / scenario.rsu_spacing_m


def wired_latency(scenario: RoadScenario) -> float:
    """Expected RSU-to-provider wired latency, model time units.

    Closed form of the scaled mean RSU-to-provider distance over a Poisson
    field of providers: 0.5 * wired_scale * E[N_RSU] / sqrt(inp_density).
    """
    return (
        0.5
        * scenario.wired_scale
        * expected_rsu_count(scenario)
        / math.sqrt(scenario.inp_density_per_m2)
    )
