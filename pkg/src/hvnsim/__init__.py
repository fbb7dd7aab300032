"""hvnsim: latency/reliability analysis and uplink selection for hybrid
vehicular networks (direct vehicle-to-RSU links vs multi-hop relay chains),
with a Pareto-improvement selector, benchmark strategies and a reproducible
Monte Carlo sweep harness."""

from .channel import (
    D_MIN,
    PROB_FLOOR,
    ChannelParams,
    erf,
    hop_latency,
    hop_success_prob,
    link_margin_db,
    mean_path_loss_db,
)
from .config import (
    ConfigError,
    ExperimentConfig,
    StrategyOptions,
    SweepSpec,
    default_config,
    dump_default_config,
    load_config,
)
from .harness import (
    ComparisonResult,
    TrialRecord,
    compare_strategies,
    find_crossover,
    run_distance_sweep,
    run_wired_sweep,
)
from .links import (
    LinkConfig,
    LinkMetrics,
    Uplink,
    evaluate_uplink,
    link_reliability,
    total_latency,
    wireless_latency,
)
from .strategy import (
    StrategyOutcome,
    best_distributed_select,
    cellular_select,
    exhaustive_select,
    pareto_select,
    random_relay_select,
)
from .topology import (
    RoadScenario,
    VehiclePositions,
    cell_area_pdf,
    expected_rsu_count,
    sample_vehicles,
    wired_latency,
)
from .utility import (
    CENTRALIZED,
    DISTRIBUTED,
    UtilityParams,
    classify_structure,
    latency_utility,
    network_utility,
    reliability_utility,
)

__version__ = "0.1.0"
