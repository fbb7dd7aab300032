"""Experiment configuration: canonical YAML schema, defaults, validation.

``dump_default_config()`` is the reference instance of the schema; every
tabulated model constant appears there with its unit in a comment. Unknown
keys are rejected so typos surface as config errors, not silent defaults.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any

import yaml

from .channel import ChannelParams
from .links import LinkConfig
from .strategy import ACCEPTANCE_RULES
from .topology import RoadScenario
from .utility import UtilityParams

__all__ = [
    "ConfigError",
    "SweepSpec",
    "StrategyOptions",
    "ExperimentConfig",
    "VALID_STRATEGIES",
    "SWEEP_VARIABLES",
    "default_config",
    "parse_config",
    "load_config",
    "config_to_dict",
    "config_hash",
    "dump_default_config",
]

VALID_STRATEGIES = ("pareto", "cellular", "random_relay", "exhaustive", "distributed")
SWEEP_VARIABLES = ("d0", "inp_density", "rsu_spacing")


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to exit code 2 in the CLI)."""


@dataclass(frozen=True)
class SweepSpec:
    variable: str = "d0"
    start: float = 5.0
    stop: float = 100.0
    step: float = 2.5

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(
                f"sweep.variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}"
            )
        if not self.step > 0:
            raise ConfigError(f"sweep.step must be > 0, got {self.step}")
        if self.stop < self.start:
            raise ConfigError("sweep.stop must be >= sweep.start")

    def values(self) -> list[float]:
        n = int((self.stop - self.start) / self.step + 1e-9) + 1
        return [self.start + i * self.step for i in range(n)]


@dataclass(frozen=True)
class StrategyOptions:
    acceptance_rule: str = "paper_line20"
    comm_range_m: float = 50.0
    exhaustive_prefer_feasible: bool = False

    def __post_init__(self) -> None:
        if self.acceptance_rule not in ACCEPTANCE_RULES:
            raise ConfigError(
                f"strategy.acceptance_rule must be one of {ACCEPTANCE_RULES}, "
                f"got {self.acceptance_rule!r}"
            )
        if not self.comm_range_m > 0:
            raise ConfigError(f"strategy.comm_range_m must be > 0, got {self.comm_range_m}")


@dataclass(frozen=True)
class ExperimentConfig:
    channel: ChannelParams = field(default_factory=ChannelParams)
    scenario: RoadScenario = field(default_factory=RoadScenario)
    link: LinkConfig = field(default_factory=lambda: LinkConfig(include_wired_in_utility=False))
    utility: UtilityParams = field(default_factory=UtilityParams)
    strategy: StrategyOptions = field(default_factory=StrategyOptions)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    trials: int = 1000
    master_seed: int = 20180815
    strategies: tuple[str, ...] = ("pareto", "cellular", "random_relay", "distributed")
    output_path: str | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if not self.strategies:
            raise ConfigError("at least one strategy is required")
        for s in self.strategies:
            if s not in VALID_STRATEGIES:
                raise ConfigError(f"unknown strategy {s!r}; valid: {VALID_STRATEGIES}")
        if len(set(self.strategies)) != len(self.strategies):
            raise ConfigError("strategies must not repeat")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


def default_config() -> ExperimentConfig:
    return ExperimentConfig()


_SECTION_TYPES = {
    "channel": ChannelParams,
    "scenario": RoadScenario,
    "link": LinkConfig,
    "utility": UtilityParams,
    "strategy": StrategyOptions,
    "sweep": SweepSpec,
}

_TOP_SCALARS = ("trials", "master_seed", "output_path", "workers")


def _build_section(name: str, cls: type, data: dict[str, Any], *, required: tuple[str, ...] = ()):
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{name}': {sorted(unknown)}")
    for key in required:
        if key not in data:
            raise ConfigError(f"'{name}.{key}' must be set explicitly")
    try:
        return cls(**data)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid '{name}' section: {exc}") from exc


def parse_config(raw: dict[str, Any] | None) -> ExperimentConfig:
    """Build a validated ExperimentConfig from a parsed YAML mapping."""
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a mapping")
    known = set(_SECTION_TYPES) | set(_TOP_SCALARS) | {"strategies"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")

    kwargs: dict[str, Any] = {}
    for name, cls in _SECTION_TYPES.items():
        section = raw.get(name, {})
        if not isinstance(section, dict):
            raise ConfigError(f"'{name}' must be a mapping")
        required = ("bandwidth_hz",) if name == "channel" else ()
        kwargs[name] = _build_section(name, cls, section, required=required)
    for key in _TOP_SCALARS:
        if key in raw:
            kwargs[key] = raw[key]
    if "strategies" in raw:
        strategies = raw["strategies"]
        if not isinstance(strategies, (list, tuple)):
            raise ConfigError("'strategies' must be a list")
        kwargs["strategies"] = tuple(strategies)
    try:
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    return parse_config(raw)


def config_to_dict(cfg: ExperimentConfig) -> dict[str, Any]:
    out = asdict(cfg)
    out["strategies"] = list(cfg.strategies)
    return out


def config_hash(cfg: ExperimentConfig) -> str:
    """Stable hash of the full configuration, for provenance captions."""
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def dump_default_config() -> str:
    """Canonical, commented reference instance of the config schema."""
    cfg = default_config()
    return f"""\
# hvnsim experiment configuration (reference instance; all values shown are
# the defaults). Units follow the model's conventions and are noted per key.
channel:
  tx_power_dbm: {cfg.channel.tx_power_dbm}             # vehicle transmit power [dBm]
  noise_density_dbm_hz: {cfg.channel.noise_density_dbm_hz}  # thermal noise density [dBm/Hz]
  bandwidth_hz: 1.0e+09            # mmWave bandwidth [Hz]; no standard value, set explicitly
  shadow_sigma_db: {cfg.channel.shadow_sigma_db}           # shadow-fading std deviation [dB]
  snr_threshold_db: {cfg.channel.snr_threshold_db}          # decoding SNR threshold [dB]
  pl_intercept_db: {cfg.channel.pl_intercept_db}          # path-loss intercept [dB]; override deliberately
  pl_slope_db_per_decade: {cfg.channel.pl_slope_db_per_decade}   # path-loss slope [dB/decade]
  slot_time_s: 5.0e-05             # packet slot duration [s]
scenario:
  d0_m: {cfg.scenario.d0_m}                      # source-vehicle-to-RSU distance [m]
  vehicle_density_per_m: {cfg.scenario.vehicle_density_per_m}      # vehicles per meter of road
  rsu_spacing_m: {cfg.scenario.rsu_spacing_m}             # distance between adjacent RSUs [m]
  inp_density_per_m2: 1.0e-07      # infrastructure providers per square meter
  road_density_m_per_m2: {cfg.scenario.road_density_m_per_m2}     # road length per square meter [m/m^2]
  gamma_shape: {cfg.scenario.gamma_shape}                # provider-cell area Gamma shape
  gamma_rate_coeff: {cfg.scenario.gamma_rate_coeff}           # provider-cell area Gamma rate coefficient
  wired_scale: 5.0e-04             # wired-link scaling factor [model units]
  rsu_count_mode: {cfg.scenario.rsu_count_mode}        # mean_area | literal_eq17
  wired_display_unit_s: 1.0e-03    # seconds per wired model unit (1 unit = 1 ms)
link:
  relay_processing_delay_s: 1.0e-04   # store-and-forward delay per relay [s]
  include_wired_in_utility: false     # false: utility judges wireless latency only.
                                      # Under the defaults the wired term (~319.8 ms)
                                      # dwarfs the 1 ms latency requirement and would
                                      # flatten the latency utility for every uplink.
utility:
  latency_req_s: 1.0e-03           # uplink latency requirement [s]
  reliability_req: {cfg.utility.reliability_req}             # uplink reliability requirement (probability)
  weight_latency_centralized: {cfg.utility.weight_latency_centralized}
  weight_reliability_centralized: {cfg.utility.weight_reliability_centralized}
  weight_latency_distributed: {cfg.utility.weight_latency_distributed}
  weight_reliability_distributed: {cfg.utility.weight_reliability_distributed}
  distance_threshold_m: {cfg.utility.distance_threshold_m}       # centralized iff distance <= threshold [m]
strategy:
  acceptance_rule: {cfg.strategy.acceptance_rule}    # paper_line20 (joint T/P/utility) | utility_only
  comm_range_m: {cfg.strategy.comm_range_m}               # random-relay communication range [m]
  exhaustive_prefer_feasible: false  # restrict the exhaustive argmax to feasible links
sweep:
  variable: {cfg.sweep.variable}                     # d0 | inp_density | rsu_spacing
  start: {cfg.sweep.start}
  stop: {cfg.sweep.stop}
  step: {cfg.sweep.step}
trials: {cfg.trials}
master_seed: {cfg.master_seed}
strategies: [pareto, cellular, random_relay, distributed]
output_path: null                  # CSV destination; may be overridden with --out
workers: {cfg.workers}                         # worker threads; output is identical for any count
"""
