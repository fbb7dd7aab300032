"""Seeded Monte Carlo experiment execution and CSV persistence.

Randomness policy: the stream for (sweep point, trial, purpose) is derived
by seeding numpy's generator with the tuple (master_seed, sweep index,
trial index, purpose slot), so results are independent of execution order,
of worker count, and of which strategies are enabled together.

CSV format: header row matches the trial-record field names exactly, floats
carry 12 significant digits, lines end with LF. After each sweep point's
trial rows, two aggregate rows per strategy follow: trial_index -1 holds
per-column means, -2 holds sample standard deviations (0 when n = 1; the
feasible column aggregates the true-fraction). Aggregates are computed from
the values as written, so recomputing them from the file reproduces them to
float64 precision.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable

import numpy as np

from . import strategy as strategy_mod
from . import topology
from .config import ExperimentConfig, config_hash, config_to_dict
from .links import utility_latency_s
from .strategy import StrategyOutcome
from .topology import RoadScenario, sample_vehicles

__all__ = [
    "TrialRecord",
    "CSV_FIELDS",
    "run_distance_sweep",
    "run_wired_sweep",
    "compare_strategies",
    "ComparisonResult",
    "write_records_csv",
    "write_meta",
    "records_to_csv",
    "find_crossover",
    "mean_utility_curve",
]

CSV_FIELDS = (
    "sweep_value",
    "trial_index",
    "strategy_id",
    "n_hops",
    "wireless_latency",
    "wired_latency",
    "total_latency",
    "success_prob",
    "utility",
    "feasible",
)

# Fixed purpose slots for per-trial substreams; adding strategies to a run
# never changes another strategy's draws.
_RNG_SLOT_VEHICLES = 0
_RNG_SLOTS = {
    "cellular": 1,
    "pareto": 2,
    "random_relay": 3,
    "exhaustive": 4,
    "distributed": 5,
}


@dataclass(frozen=True)
class TrialRecord:
    sweep_value: float
    trial_index: int
    strategy_id: str
    n_hops: float
    wireless_latency: float
    wired_latency: float
    total_latency: float
    success_prob: float
    utility: float
    feasible: float  # 1/0 for trials, true-fraction in aggregate rows

    def row(self) -> tuple:
        return (
            self.sweep_value,
            self.trial_index,
            self.strategy_id,
            self.n_hops,
            self.wireless_latency,
            self.wired_latency,
            self.total_latency,
            self.success_prob,
            self.utility,
            self.feasible,
        )


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def _round12(x: float) -> float:
    return float(f"{float(x):.12g}")


def _trial_rng(master_seed: int, sweep_index: int, trial_index: int, slot: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, sweep_index, trial_index, slot])


def _outcome_record(sweep_value: float, trial_index: int, outcome: StrategyOutcome) -> TrialRecord:
    m = outcome.metrics
    return TrialRecord(
        sweep_value=_round12(sweep_value),
        trial_index=trial_index,
        strategy_id=outcome.strategy_id,
        n_hops=outcome.chosen.n_hops,
        wireless_latency=_round12(m.wireless_latency_s),
        wired_latency=_round12(m.wired_latency_units),
        total_latency=_round12(m.total_latency_s),
        success_prob=_round12(m.success_prob),
        utility=_round12(m.utility),
        feasible=1.0 if outcome.feasible else 0.0,
    )


def _aggregate_rows(point_records: list[TrialRecord]) -> list[TrialRecord]:
    """Mean (trial_index -1) and sample-std (-2) rows per strategy."""
    out: list[TrialRecord] = []
    by_strategy: dict[str, list[TrialRecord]] = {}
    for rec in point_records:
        by_strategy.setdefault(rec.strategy_id, []).append(rec)
    numeric = ("n_hops", "wireless_latency", "wired_latency", "total_latency",
               "success_prob", "utility", "feasible")
    for strategy_id, recs in by_strategy.items():
        cols = {name: np.array([getattr(r, name) for r in recs], dtype=float) for name in numeric}
        mean = {name: _round12(np.mean(v)) for name, v in cols.items()}
        std = {
            name: _round12(np.std(v, ddof=1)) if len(recs) > 1 else 0.0
            for name, v in cols.items()
        }
        base = dict(sweep_value=recs[0].sweep_value, strategy_id=strategy_id)
        out.append(TrialRecord(trial_index=-1, **base, **mean))
        out.append(TrialRecord(trial_index=-2, **base, **std))
    return out


def _run_strategy(
    strategy_id: str,
    vehicles,
    d0: float,
    cfg: ExperimentConfig,
    scenario: RoadScenario,
    rng: np.random.Generator,
) -> StrategyOutcome:
    cp, lc, up = cfg.channel, cfg.link, cfg.utility
    if strategy_id == "cellular":
        return strategy_mod.cellular_select(d0, cp, lc, up, scenario)
    if strategy_id == "pareto":
        return strategy_mod.pareto_select(
            vehicles, d0, cp, lc, up, scenario, acceptance_rule=cfg.strategy.acceptance_rule
        )
    if strategy_id == "random_relay":
        return strategy_mod.random_relay_select(
            vehicles, d0, cp, lc, up, scenario, rng, comm_range_m=cfg.strategy.comm_range_m
        )
    if strategy_id == "exhaustive":
        return strategy_mod.exhaustive_select(
            vehicles, d0, cp, lc, up, scenario,
            prefer_feasible=cfg.strategy.exhaustive_prefer_feasible,
        )
    if strategy_id == "distributed":
        return strategy_mod.best_distributed_select(vehicles, d0, cp, lc, up, scenario)
    raise ValueError(f"unknown strategy {strategy_id!r}")


def _distance_point_records(cfg: ExperimentConfig, sweep_index: int, d0: float) -> list[TrialRecord]:
    scenario = replace(cfg.scenario, d0_m=d0)
    # The direct link is deterministic per sweep point; evaluate it once.
    cellular_rec = None
    if "cellular" in cfg.strategies:
        outcome = strategy_mod.cellular_select(d0, cfg.channel, cfg.link, cfg.utility, scenario)
        cellular_rec = _outcome_record(d0, 0, outcome)
    rows: list[TrialRecord] = []
    for t in range(cfg.trials):
        vehicles = sample_vehicles(scenario, _trial_rng(cfg.master_seed, sweep_index, t, _RNG_SLOT_VEHICLES))
        for strategy_id in cfg.strategies:
            if strategy_id == "cellular":
                rows.append(replace(cellular_rec, trial_index=t))
                continue
            # Only the random-relay walk consumes randomness; its slot is
            # fixed so enabling other strategies never shifts its draws.
            rng = (
                _trial_rng(cfg.master_seed, sweep_index, t, _RNG_SLOTS[strategy_id])
                if strategy_id == "random_relay"
                else None
            )
            outcome = _run_strategy(strategy_id, vehicles, d0, cfg, scenario, rng)
            rows.append(_outcome_record(d0, t, outcome))
    rows.extend(_aggregate_rows(rows))
    return rows


def run_distance_sweep(cfg: ExperimentConfig) -> list[TrialRecord]:
    """Monte Carlo sweep over the vehicle-to-RSU distance.

    Emits trials for every (sweep point, trial, strategy) plus per-point
    aggregate rows; output is a pure function of (config, master_seed).
    """
    if cfg.sweep.variable != "d0":
        raise ValueError("run_distance_sweep requires sweep.variable == 'd0'")
    points = cfg.sweep.values()
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            blocks = list(pool.map(
                lambda args: _distance_point_records(cfg, *args), enumerate(points)
            ))
    else:
        blocks = [_distance_point_records(cfg, si, d0) for si, d0 in enumerate(points)]
    return [rec for block in blocks for rec in block]


def run_wired_sweep(cfg: ExperimentConfig) -> list[TrialRecord]:
    """Closed-form wired-latency sweep over provider density or RSU spacing.

    No Monte Carlo is involved; one row per sweep point (trials forced
    to 1), strategy_id 'wired'.
    """
    if cfg.sweep.variable not in ("inp_density", "rsu_spacing"):
        raise ValueError("run_wired_sweep requires sweep.variable inp_density or rsu_spacing")
    field = "inp_density_per_m2" if cfg.sweep.variable == "inp_density" else "rsu_spacing_m"
    records: list[TrialRecord] = []
    for value in cfg.sweep.values():
        scenario = replace(cfg.scenario, **{field: value})
        wired_units = topology.wired_latency(scenario)
        rec = TrialRecord(
            sweep_value=_round12(value),
            trial_index=0,
            strategy_id="wired",
            n_hops=0,
            wireless_latency=0.0,
            wired_latency=_round12(wired_units),
            total_latency=_round12(wired_units * scenario.wired_display_unit_s),
            success_prob=1.0,
            utility=0.0,
            feasible=1.0,
        )
        records.append(rec)
        records.extend(_aggregate_rows([rec]))
    return records


def records_to_csv(records: Iterable[TrialRecord]) -> str:
    lines = [",".join(CSV_FIELDS)]
    for rec in records:
        lines.append(",".join(_fmt(v) for v in rec.row()))
    return "\n".join(lines) + "\n"


def write_records_csv(records: list[TrialRecord], path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(records_to_csv(records))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def write_meta(cfg: ExperimentConfig, csv_path: str, record_count: int) -> str:
    """Provenance sidecar next to the CSV (config echo + hash; no timestamps)."""
    meta_path = csv_path + ".meta.json"
    payload = {
        "config": config_to_dict(cfg),
        "config_hash": config_hash(cfg),
        "record_count": record_count,
        "csv_fields": list(CSV_FIELDS),
        "aggregate_rows": {"mean_trial_index": -1, "std_trial_index": -2},
    }
    try:
        with open(meta_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write meta to {meta_path}: {exc}") from exc
    return meta_path


def mean_utility_curve(records: list[TrialRecord], strategy_id: str) -> dict[float, float]:
    """sweep_value -> mean utility, read from the aggregate mean rows."""
    return {
        r.sweep_value: r.utility
        for r in records
        if r.trial_index == -1 and r.strategy_id == strategy_id
    }


def find_crossover(
    records: list[TrialRecord],
    above: str = "distributed",
    below: str = "cellular",
) -> float | None:
    """Smallest sweep value where ``above``'s mean utility strictly exceeds
    ``below``'s; None when it never does."""
    curve_a = mean_utility_curve(records, above)
    curve_b = mean_utility_curve(records, below)
    for x in sorted(set(curve_a) & set(curve_b)):
        if curve_a[x] > curve_b[x]:
            return x
    return None


@dataclass(frozen=True)
class ComparisonResult:
    """Per-point strategy means and pareto's relative improvement over each
    baseline, plus the sweep-wide maximum improvement per baseline."""

    strategies: tuple[str, ...]
    rows: tuple[dict, ...]
    max_improvement: dict[str, tuple[float, float]]  # baseline -> (improvement, sweep_value)

    def to_csv(self) -> str:
        baselines = [s for s in self.strategies if s != "pareto"]
        header = ["sweep_value"]
        header += [f"mean_utility_{s}" for s in self.strategies]
        header += [f"std_utility_{s}" for s in self.strategies]
        header += [f"improvement_over_{b}" for b in baselines]
        lines = [",".join(header)]
        for row in self.rows:
            vals = [row["sweep_value"]]
            vals += [row["mean"][s] for s in self.strategies]
            vals += [row["std"][s] for s in self.strategies]
            vals += [row["improvement"][b] for b in baselines]
            lines.append(",".join(_fmt(v) for v in vals))
        return "\n".join(lines) + "\n"


def compare_strategies(cfg: ExperimentConfig, records: list[TrialRecord] | None = None) -> ComparisonResult:
    """Summary table for Pareto vs the configured baselines.

    Improvement is (pareto - baseline) / baseline on per-point mean utility.
    """
    if "pareto" not in cfg.strategies or len(cfg.strategies) < 2:
        raise ValueError("compare_strategies needs 'pareto' plus at least one baseline")
    if records is None:
        records = run_distance_sweep(cfg)
    curves = {s: mean_utility_curve(records, s) for s in cfg.strategies}
    stds = {
        s: {
            r.sweep_value: r.utility
            for r in records
            if r.trial_index == -2 and r.strategy_id == s
        }
        for s in cfg.strategies
    }
    baselines = [s for s in cfg.strategies if s != "pareto"]
    rows = []
    best: dict[str, tuple[float, float]] = {}
    for x in sorted(curves["pareto"]):
        improvement = {}
        for b in baselines:
            rel = (curves["pareto"][x] - curves[b][x]) / curves[b][x]
            improvement[b] = rel
            if b not in best or rel > best[b][0]:
                best[b] = (rel, x)
        rows.append(
            {
                "sweep_value": x,
                "mean": {s: curves[s][x] for s in cfg.strategies},
                "std": {s: stds[s][x] for s in cfg.strategies},
                "improvement": improvement,
            }
        )
    return ComparisonResult(strategies=cfg.strategies, rows=tuple(rows), max_improvement=best)
