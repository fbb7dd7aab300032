"""Command-line interface.

Exit codes: 0 success, 2 invalid configuration or usage, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import (
    ConfigError,
    ExperimentConfig,
    default_config,
    dump_default_config,
    load_config,
)
from .harness import (
    compare_strategies,
    run_distance_sweep,
    run_wired_sweep,
    write_meta,
    write_records_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML config file (defaults apply when omitted)")
    parser.add_argument("--seed", type=int, help="override master_seed")
    parser.add_argument("--out", help="override output_path")
    parser.add_argument("--trials", type=int, help="override trials per sweep point")
    parser.add_argument(
        "--strategy",
        action="append",
        dest="strategies",
        metavar="ID",
        help="strategy to run (repeatable; overrides the config list)",
    )
    parser.add_argument("--workers", type=int, help="worker threads (output is identical for any count)")
    parser.add_argument("--format", choices=["csv"], default="csv", help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hvnsim",
        description="Hybrid vehicular uplink simulator: latency, reliability and "
        "network-utility sweeps with Pareto-improvement link selection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("sweep-distance", "Monte Carlo sweep over the vehicle-to-RSU distance"),
        ("sweep-wired", "closed-form wired-latency sweep (provider density or RSU spacing)"),
        ("compare", "pareto vs baselines summary over a distance sweep"),
    ):
        p = sub.add_parser(name, help=text)
        _add_common(p)
    p = sub.add_parser("validate-config", help="check a config file and exit")
    p.add_argument("--config", required=True)
    p = sub.add_parser("show-defaults", help="print the canonical default config")
    p.add_argument("--out", help="write to a file instead of stdout")
    return parser


def _load(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else default_config()
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.out is not None:
        overrides["output_path"] = args.out
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.strategies:
        overrides["strategies"] = tuple(args.strategies)
    if args.workers is not None:
        overrides["workers"] = args.workers
    return replace(cfg, **overrides) if overrides else cfg


def _require_out(cfg: ExperimentConfig) -> str:
    if not cfg.output_path:
        raise ConfigError("no output path: set output_path in the config or pass --out")
    return cfg.output_path


def _cmd_sweep_distance(args: argparse.Namespace) -> int:
    cfg = _load(args)
    if cfg.sweep.variable != "d0":
        raise ConfigError("sweep-distance requires sweep.variable: d0")
    out = _require_out(cfg)
    records = run_distance_sweep(cfg)
    write_records_csv(records, out)
    meta = write_meta(cfg, out, len(records))
    print(f"wrote {len(records)} rows to {out} (meta: {meta})")
    return EXIT_OK


def _cmd_sweep_wired(args: argparse.Namespace) -> int:
    cfg = _load(args)
    if cfg.sweep.variable not in ("inp_density", "rsu_spacing"):
        raise ConfigError("sweep-wired requires sweep.variable: inp_density or rsu_spacing")
    out = _require_out(cfg)
    records = run_wired_sweep(cfg)
    write_records_csv(records, out)
    meta = write_meta(cfg, out, len(records))
    print(f"wrote {len(records)} rows to {out} (meta: {meta})")
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    cfg = _load(args)
    if cfg.sweep.variable != "d0":
        raise ConfigError("compare requires sweep.variable: d0")
    if "pareto" not in cfg.strategies or len(cfg.strategies) < 2:
        raise ConfigError("compare requires strategy 'pareto' plus at least one baseline")
    out = _require_out(cfg)
    result = compare_strategies(cfg)
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(result.to_csv())
    except OSError as exc:
        raise OSError(f"cannot write summary to {out}: {exc}") from exc
    meta = write_meta(cfg, out, len(result.rows))
    for baseline, (rel, at) in sorted(result.max_improvement.items()):
        print(f"max improvement of pareto over {baseline}: {rel:.2%} at sweep value {at:g}")
    print(f"wrote {len(result.rows)} summary rows to {out} (meta: {meta})")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    load_config(args.config)
    print(f"{args.config}: OK")
    return EXIT_OK


def _cmd_show_defaults(args: argparse.Namespace) -> int:
    text = dump_default_config()
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write defaults to {args.out}: {exc}") from exc
        print(f"wrote defaults to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "sweep-distance": _cmd_sweep_distance,
    "sweep-wired": _cmd_sweep_wired,
    "compare": _cmd_compare,
    "validate-config": _cmd_validate,
    "show-defaults": _cmd_show_defaults,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
