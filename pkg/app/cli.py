from __future__ import annotations

"""
Command-line front end.

    python -m app run --config scenario.json --trials 20 --slots 12 --out trace.csv
    python -m app sweep-antennas --m-min 10 --m-max 300 --m-step 10 --out ee.csv --plot ee.svg
    python -m app sweep-class --m 300 --n-max 30 --out class.csv
    python -m app sweep-grid --m-min 10 --m-max 300 --m-step 10 --n-max 30 --out grid.csv
    python -m app sweep-mixed --m 100 --classes 1:1,3:30 --out mixed.csv
    python -m app classify-demo --profile pedestrian --slots 600 --out trace.csv
    python -m app coherence --velocity 1.38 --freq 1.9e9
    python -m app serve --port 8000

Exit codes: 0 success, 1 validation error, 2 scheduling infeasibility,
3 I/O error.
"""

import argparse
import json
import sys
from typing import List, Optional, Sequence

from .config import Settings, SystemConfig, build_config, load_config_file, load_settings
from .domain.performance import class_for_coherence, coherence_samples
from .domain.scheduler import assign_network
from .errors import SimulatorError
from .logging import get_logger, setup_logging
from .services.classification import PROFILES, classify_demo
from .services.simulation import build_options, run_trials
from .services.sweeps import (
    ResultTable,
    SweepSpec,
    antenna_grid,
    mixed_population_rows,
    parse_class_counts,
    sweep_antennas,
    sweep_class,
    sweep_grid,
)
from .storage.tables import emit_csv, export_plan_csv, export_trace_csv
from .utils.plot import emit_plot


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmimo-sim", description="Time-shifted pilot massive MIMO simulator")
    parser.add_argument("--log-level", default=None, help="Override MMIMO_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--config", default=None, help="Scenario JSON file (defaults when omitted)")
        return p

    p = with_config(sub.add_parser("run", help="Slot-by-slot Monte Carlo simulation"))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--slots", type=int, default=None)
    p.add_argument("--class", dest="class_n", type=int, default=1, help="Initial class of every user")
    p.add_argument("--antennas", type=int, default=None, help="Override num_antennas")
    p.add_argument("--adaptive", action="store_true", help="Re-pack pilots when classes change")
    p.add_argument("--noiseless", action="store_true", help="Drop uplink and downlink noise")
    p.add_argument("--static", action="store_true", help="Hold every channel for the whole run")
    true_class = p.add_mutually_exclusive_group()
    true_class.add_argument("--coherence-class", type=int, default=None, help="True coherence class of every user (defaults to --class)")
    true_class.add_argument("--profile", choices=sorted(PROFILES), default=None, help="Mobility profile setting the true coherence class")
    p.add_argument("--out", default="trace.csv", help="Classifier trace CSV")
    p.add_argument("--plan-out", default=None, help="Pilot plan CSV")

    p = with_config(sub.add_parser("sweep-antennas", help="Closed-form SE/EE versus M"))
    p.add_argument("--m-min", type=int, required=True)
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--m-step", type=int, default=1)
    p.add_argument("--classes", type=_int_list, default=[1, 3])
    p.add_argument("--out", required=True)
    p.add_argument("--plot", default=None)
    p.add_argument("--metric", choices=["ee", "se"], default="ee")

    p = with_config(sub.add_parser("sweep-class", help="Closed-form SE/EE versus class index"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", default=None)
    p.add_argument("--metric", choices=["ee", "se"], default="ee")

    p = with_config(sub.add_parser("sweep-grid", help="EE versus M for classes 1..n-max"))
    p.add_argument("--m-min", type=int, required=True)
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--m-step", type=int, default=1)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", default=None)

    p = with_config(sub.add_parser("sweep-mixed", help="Closed-form SE/EE of a mixed-class population"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--classes", required=True, help="class:count pairs, e.g. 1:1,3:30")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", default=None)
    p.add_argument("--metric", choices=["ee", "se"], default="ee")

    p = with_config(sub.add_parser("classify-demo", help="Classifier trace for a mobility profile"))
    p.add_argument("--profile", choices=sorted(PROFILES), required=True)
    p.add_argument("--slots", type=int, required=True)
    p.add_argument("--noiseless", action="store_true")
    p.add_argument("--out", required=True)

    p = with_config(sub.add_parser("coherence", help="Coherence interval and suggested class"))
    p.add_argument("--velocity", type=float, required=True, help="m/s")
    p.add_argument("--freq", type=float, required=True, help="carrier frequency in Hz")

    p = sub.add_parser("serve", help="Run the HTTP job service")
    p.add_argument("--host", default=None, help="Override MMIMO_HOST")
    p.add_argument("--port", type=int, default=None, help="Override MMIMO_PORT")
    return parser


def _write_table(table: ResultTable, out: str, plot: Optional[str], metric: str = "ee") -> None:
    emit_csv(table, out)
    if plot:
        emit_plot(table, plot, metric)  # type: ignore[arg-type]
    print(f"wrote {len(table)} rows to {out}" + (f" and {plot}" if plot else ""))


def _cmd_run(args: argparse.Namespace, config: SystemConfig, settings: Settings) -> int:
    if args.seed is not None:
        config = build_config(**{**config.model_dump(), "rng_seed": args.seed})
    plan = assign_network([[args.class_n] * config.num_users] * config.num_cells, config.num_pilots, config.max_class)
    options = build_options(
        config,
        noiseless=args.noiseless,
        static=args.static,
        adaptive=args.adaptive,
        num_antennas=args.antennas,
        coherence_class=args.coherence_class,
        profile=args.profile,
    )
    result = run_trials(
        config,
        plan,
        settings.default_slots if args.slots is None else args.slots,
        settings.default_trials if args.trials is None else args.trials,
        options,
        settings,
    )
    export_trace_csv(result.trace, args.out)
    if args.plan_out:
        export_plan_csv(plan, args.plan_out)
    print(json.dumps(result.summary(config), indent=2))
    return 0


def _cmd_sweep_antennas(args: argparse.Namespace, config: SystemConfig) -> int:
    spec = SweepSpec("antennas", antenna_grid(args.m_min, args.m_max, args.m_step), config)
    _write_table(sweep_antennas(spec, args.classes), args.out, args.plot, args.metric)
    return 0


def _cmd_sweep_class(args: argparse.Namespace, config: SystemConfig) -> int:
    spec = SweepSpec("class_index", tuple(range(1, args.n_max + 1)), config)
    _write_table(sweep_class(spec, args.m), args.out, args.plot, args.metric)
    return 0


def _cmd_sweep_grid(args: argparse.Namespace, config: SystemConfig) -> int:
    table = sweep_grid(config, antenna_grid(args.m_min, args.m_max, args.m_step), range(1, args.n_max + 1))
    _write_table(table, args.out, args.plot)
    return 0


def _cmd_sweep_mixed(args: argparse.Namespace, config: SystemConfig) -> int:
    table = mixed_population_rows(config, parse_class_counts(args.classes), args.m)
    _write_table(table, args.out, args.plot, args.metric)
    return 0


def _cmd_classify_demo(args: argparse.Namespace, config: SystemConfig) -> int:
    trace = classify_demo(config, args.profile, args.slots, noiseless=args.noiseless)
    export_trace_csv(trace, args.out)
    final = trace[-1].class_n if trace else 1
    print(f"profile {args.profile}: final class {final} after {args.slots} slots, trace in {args.out}")
    return 0


def _cmd_coherence(args: argparse.Namespace, config: SystemConfig) -> int:
    samples = coherence_samples(args.velocity, args.freq)
    suggested = class_for_coherence(samples, config.frame_len, config.max_class)
    print(json.dumps({"coherence_samples": samples, "frame_len": config.frame_len, "class_n": suggested}))
    return 0


def _cmd_serve(args: argparse.Namespace, settings: Settings) -> int:
    import uvicorn

    uvicorn.run(
        "app.main:create_app",
        factory=True,
        host=args.host or settings.host,
        port=settings.port if args.port is None else args.port,
        log_level=(args.log_level or settings.log_level).lower(),
    )
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings()
    setup_logging(args.log_level or settings.log_level)
    logger = get_logger()
    if args.command == "serve":
        return _cmd_serve(args, settings)
    try:
        config = load_config_file(args.config)
        if args.command == "run":
            return _cmd_run(args, config, settings)
        if args.command == "sweep-antennas":
            return _cmd_sweep_antennas(args, config)
        if args.command == "sweep-class":
            return _cmd_sweep_class(args, config)
        if args.command == "sweep-grid":
            return _cmd_sweep_grid(args, config)
        if args.command == "sweep-mixed":
            return _cmd_sweep_mixed(args, config)
        if args.command == "classify-demo":
            return _cmd_classify_demo(args, config)
        return _cmd_coherence(args, config)
    except SimulatorError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        logger.error("invalid argument: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1
