"""Command line interface for gsrcpd."""

from __future__ import annotations

import argparse
import json
import logging
import secrets
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .calibrate import (
    DEFAULT_BISECTION_TOL,
    DEFAULT_MAX_BISECTION_ITERS,
    DEFAULT_REPS,
    CalibrationConfig,
    ResampleMethod,
    ThresholdTable,
    calibrate,
)
from .detect import DetectionEvent, DetectionPolicy, OnlineDetectorState, detect_blocks
from .errors import DimensionMismatchError, GSRError, NumericalFault, WindowSizeError
from .graphkit import GraphKind
from .gsr_stats import STAT_ORDER
from .ingest import dump_json, iter_observations, load_observations, write_events_jsonl, write_rows_csv
from .manifest import RunManifest, write_manifest
from .simlab import (
    DEFAULT_ALPHA,
    DEFAULT_TRIALS,
    EXPERIMENTS,
    TABLE_COLUMNS,
    TRAINING_WINDOWS,
    DetectorConfig,
    DetectorMethod,
    Scenario,
    ScenarioKind,
    experiment_delta_mu_series,
    profile_series,
    run_power,
    run_table,
    write_profile_csv,
)
from .theory import PowerInputs, delta_mu_series, power_summary, write_delta_mu_csv

logger = logging.getLogger(__name__)

# ╭──────────────────────────────────────────────────────────────╮
# │ Shared defaults                                              │
# ╰──────────────────────────────────────────────────────────────╯

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3
EXIT_NUMERICAL = 4
DEFAULT_CALIBRATION_ALPHA = 0.05
PLOT_TRIALS = 4
# Window sizes and type-II levels of the delta_mu plot series; the requested n is always added.
PLOT_WINDOW_SIZES = tuple(range(10, 105, 5))
PLOT_BETAS = (0.05, 0.1, 0.2, 0.5)
GRAPH_CHOICES = tuple(kind.value for kind in GraphKind)
STAT_CHOICES = tuple(stat.value for stat in STAT_ORDER)


# ╭──────────────────────────────────────────────────────────────╮
# │ Parser construction                                          │
# ╰──────────────────────────────────────────────────────────────╯


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--rich",
        dest="use_rich",
        action="store_true",
        help="Render a human summary with Rich panels on stderr.",
    )
    parser.add_argument("--verbose", action="store_true", help="Log debug details to stderr.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsrcpd",
        description="Graph-spanning-ratio change-point detection: calibrate, detect, simulate.",
    )
    subparsers = parser.add_subparsers(dest="command")

    calibrate_parser = subparsers.add_parser(
        "calibrate",
        help="Calibrate per-k critical values on a null training stream.",
    )
    calibrate_parser.add_argument("--input", required=True, help="Training stream (CSV or JSONL).")
    calibrate_parser.add_argument("--format", choices=("csv", "jsonl"), help="Override input format detection.")
    calibrate_parser.add_argument("--window", type=int, required=True, help="Half window length n.")
    calibrate_parser.add_argument("--alpha", type=float, default=DEFAULT_CALIBRATION_ALPHA, help="Family-wise level.")
    calibrate_parser.add_argument("--graph", choices=GRAPH_CHOICES, default="cg", help="Graph built over each block.")
    calibrate_parser.add_argument(
        "--method",
        choices=tuple(method.value for method in ResampleMethod),
        default="bootstrap",
        help="Resampling scheme.",
    )
    calibrate_parser.add_argument("--reps", type=int, default=DEFAULT_REPS, help="Number of resamples B.")
    calibrate_parser.add_argument("--seed", type=int, help="Random seed (generated and printed when absent).")
    calibrate_parser.add_argument(
        "--stat",
        dest="stats",
        action="append",
        choices=STAT_CHOICES,
        help="Statistic to calibrate (repeatable; default all three).",
    )
    calibrate_parser.add_argument("--symmetric", action="store_true", help="Calibrate the k = n split only.")
    calibrate_parser.add_argument("--bisection-tol", type=float, default=DEFAULT_BISECTION_TOL)
    calibrate_parser.add_argument("--max-iters", type=int, default=DEFAULT_MAX_BISECTION_ITERS)
    calibrate_parser.add_argument("--out", required=True, help="Threshold JSON to write.")
    _add_common_flags(calibrate_parser)
    calibrate_parser.set_defaults(func=_handle_calibrate_command)

    detect_parser = subparsers.add_parser(
        "detect",
        help="Run the detector over an observation stream and write JSONL events.",
    )
    detect_parser.add_argument("--input", required=True, help="Observation stream (CSV or JSONL).")
    detect_parser.add_argument("--format", choices=("csv", "jsonl"), help="Override input format detection.")
    detect_parser.add_argument("--thresholds", required=True, help="Threshold JSON from `calibrate`.")
    detect_parser.add_argument(
        "--offline",
        action="store_true",
        help="Scan consecutive non-overlapping 2n blocks instead of streaming.",
    )
    detect_parser.add_argument("--symmetric", action="store_true", help="Test the k = n split only.")
    detect_parser.add_argument(
        "--policy",
        choices=("stop", "continuous"),
        default="continuous",
        help="Stop at the first event or keep going after a cooldown.",
    )
    detect_parser.add_argument("--cooldown", type=int, help="Pushes skipped after an event (default 2n).")
    detect_parser.add_argument("--out", required=True, help="JSONL events file to write.")
    _add_common_flags(detect_parser)
    detect_parser.set_defaults(func=_handle_detect_command)

    simulate_parser = subparsers.add_parser(
        "simulate",
        help="Estimate detection power on a synthetic scenario.",
    )
    simulate_parser.add_argument(
        "--scenario",
        choices=tuple(kind.value for kind in ScenarioKind),
        required=True,
        help="Scenario generator.",
    )
    simulate_parser.add_argument("--n", type=int, default=35, help="Half window length.")
    simulate_parser.add_argument("--d", type=int, default=10, help="Dimension (nodes for graph scenarios).")
    simulate_parser.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    simulate_parser.add_argument("--seed", type=int, help="Random seed (generated and printed when absent).")
    simulate_parser.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    simulate_parser.add_argument("--reps", type=int, default=DEFAULT_REPS)
    simulate_parser.add_argument(
        "--detector",
        choices=tuple(method.value for method in DetectorMethod),
        default="gsr",
        help="Detection method.",
    )
    simulate_parser.add_argument("--graph", choices=GRAPH_CHOICES, default="cg")
    simulate_parser.add_argument("--symmetric", action="store_true", help="Test the k = n split only.")
    simulate_parser.add_argument("--stat", dest="stats", action="append", choices=STAT_CHOICES)
    simulate_parser.add_argument("--thresholds", help="Use a threshold JSON instead of calibrating.")
    simulate_parser.add_argument("--shift", type=float, help="Mean shift per coordinate (default d^(-1/3)).")
    simulate_parser.add_argument("--scale", type=float, default=2.0, help="Gaussian variance after the change.")
    simulate_parser.add_argument("--p0", type=float, default=0.5)
    simulate_parser.add_argument("--p1", type=float, default=1.0 / 3.0)
    simulate_parser.add_argument("--from-graph", choices=GRAPH_CHOICES, default="mst")
    simulate_parser.add_argument("--to-graph", choices=GRAPH_CHOICES, default="cg")
    simulate_parser.add_argument("--change-prob", type=float, default=0.5)
    simulate_parser.add_argument(
        "--emit-plot",
        choices=("profile", "delta_mu"),
        help="Also write plot data: k-profiles of a few trials, or the delta_mu series.",
    )
    simulate_parser.add_argument("--plot-out", help="Plot CSV path (default <out>.<plot>.csv).")
    simulate_parser.add_argument("--out", required=True, help="Power CSV to write.")
    _add_common_flags(simulate_parser)
    simulate_parser.set_defaults(func=_handle_simulate_command)

    table_parser = subparsers.add_parser(
        "table",
        help="Reproduce a registered detection-power table.",
    )
    table_parser.add_argument("experiment_id", help=f"One of: {', '.join(sorted(EXPERIMENTS))}.")
    table_parser.add_argument("--full", action="store_true", help="Lift the desk-scale trial and resample caps.")
    table_parser.add_argument("--trials", type=int)
    table_parser.add_argument("--reps", type=int)
    table_parser.add_argument("--seed", type=int, help="Random seed (generated and printed when absent).")
    table_parser.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    table_parser.add_argument(
        "--emit-plot",
        choices=("delta_mu",),
        help="Also write the delta_mu series for every dimension of the grid.",
    )
    table_parser.add_argument("--plot-out", help="Plot CSV path (default <out>.<plot>.csv).")
    table_parser.add_argument("--out", required=True, help="Table CSV to write.")
    _add_common_flags(table_parser)
    table_parser.set_defaults(func=_handle_table_command)

    power_parser = subparsers.add_parser(
        "power",
        help="Closed-form separation thresholds and minimum radius.",
    )
    power_parser.add_argument("--alpha", type=float, required=True)
    power_parser.add_argument("--beta", type=float, required=True)
    power_parser.add_argument("--n", type=int, required=True)
    power_parser.add_argument("--d", type=int, required=True)
    power_parser.add_argument("--sigma2", type=float, default=1.0)
    power_parser.add_argument("--mu-l-sq", type=float, help="Left spanning expectation (default plug-in).")
    power_parser.add_argument("--mu-r-sq", type=float, help="Right spanning expectation (default plug-in).")
    power_parser.add_argument("--out", help="Write the JSON here instead of stdout.")
    _add_common_flags(power_parser)
    power_parser.set_defaults(func=_handle_power_command)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_OK

    _configure_logging(getattr(args, "verbose", False))
    try:
        return args.func(args)
    except NumericalFault as exc:
        logger.error("Numerical fault: %s", exc)
        return EXIT_NUMERICAL
    except (GSRError, ValueError, ArithmeticError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


# ╭──────────────────────────────────────────────────────────────╮
# │ Logging and shared helpers                                   │
# ╰──────────────────────────────────────────────────────────────╯


def _configure_logging(verbose: bool) -> None:
    from rich.console import Console
    from rich.logging import RichHandler

    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=verbose)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[handler],
        force=True,
    )


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is None:
        seed = secrets.randbits(32)
    print(f"seed: {seed}", file=sys.stderr, flush=True)
    return seed


def _plot_window_sizes(n: int) -> Tuple[int, ...]:
    return tuple(sorted(set(PLOT_WINDOW_SIZES) | {n}))


def _manifest_for(args: argparse.Namespace, seed: Optional[int] = None) -> RunManifest:
    config = {
        key: value
        for key, value in vars(args).items()
        if key not in {"func", "use_rich", "verbose"} and not callable(value)
    }
    return RunManifest(command=args.command, config=config, seed=seed)


def _progress_bar(description: str, total: Optional[int]) -> Any:
    from rich.console import Console
    from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

    progress = Progress(
        TextColumn("[bold]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=Console(stderr=True),
        transient=True,
    )
    progress.add_task(description, total=total)
    return progress


# ╭──────────────────────────────────────────────────────────────╮
# │ Command handlers                                             │
# ╰──────────────────────────────────────────────────────────────╯


def _handle_calibrate_command(args: argparse.Namespace) -> int:
    input_path = Path(args.input)
    if not input_path.exists():
        raise FileNotFoundError(f"Input file not found: {input_path}")

    train = load_observations(input_path, args.format)
    if train.shape[0] < 2 * args.window:
        raise WindowSizeError(
            f"training length N={train.shape[0]} must be at least 2n={2 * args.window}"
        )
    seed = _resolve_seed(args.seed)
    config = CalibrationConfig(
        n=args.window,
        alpha=args.alpha,
        reps=args.reps,
        method=args.method,
        graph=args.graph,
        seed=seed,
        bisection_tol=args.bisection_tol,
        max_bisection_iters=args.max_iters,
        stats=args.stats or STAT_ORDER,
        symmetric=args.symmetric,
    )

    manifest = _manifest_for(args, seed)
    manifest.add_input(input_path)
    with _progress_bar("Resampling", config.reps) as progress:
        task = progress.task_ids[0]
        table = calibrate(train, config, progress=lambda _: progress.advance(task))

    manifest.finish()
    out_path = Path(args.out)
    table.manifest = manifest.model_dump()
    table.save(out_path)
    write_manifest(out_path, manifest)

    if args.use_rich:
        _print_rich_summary(
            "Calibration",
            {
                "n / d / graph": f"{table.n} / {table.d} / {table.graph.value}",
                "alpha": table.alpha,
                "alpha*": {stat.value: value for stat, value in table.alpha_star.items()},
                "achieved rate": {stat.value: value for stat, value in table.achieved_rate.items()},
                "replicates kept": f"{table.B} (dropped {table.dropped_replicates})",
                "converged": table.converged,
            },
        )
    if not table.converged:
        logger.warning("Calibration did not converge; thresholds written to %s anyway", out_path)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _handle_detect_command(args: argparse.Namespace) -> int:
    input_path = Path(args.input)
    if not input_path.exists():
        raise FileNotFoundError(f"Input file not found: {input_path}")
    thresholds = ThresholdTable.load(args.thresholds)

    manifest = _manifest_for(args, thresholds.seed)
    manifest.add_input(input_path)
    manifest.add_input(args.thresholds)

    events: List[DetectionEvent] = []
    samples = 0
    if args.offline:
        observations = load_observations(input_path, args.format)
        samples = observations.shape[0]
        if samples:
            if observations.shape[1] != thresholds.d:
                raise DimensionMismatchError(
                    f"Input dimension d={observations.shape[1]} does not match thresholds d={thresholds.d}"
                )
            events = detect_blocks(observations, thresholds, symmetric=args.symmetric)
    else:
        policy = (
            DetectionPolicy.stop_on_first()
            if args.policy == "stop"
            else DetectionPolicy.continuous(args.cooldown)
        )
        state = OnlineDetectorState(thresholds, policy=policy, symmetric=args.symmetric)
        for _, vector in iter_observations(input_path, args.format):
            events.extend(state.push(vector))
            samples += 1

    out_path = write_events_jsonl(args.out, events)
    write_manifest(out_path, manifest)
    logger.info("%d events over %d observations written to %s", len(events), samples, out_path)

    if args.use_rich:
        _print_rich_events(events)
    return EXIT_OK


def _handle_simulate_command(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    scenario = Scenario(
        kind=args.scenario,
        n=args.n,
        d=args.d,
        trials=args.trials,
        seed=seed,
        change_present_prob=args.change_prob,
        shift=args.shift,
        scale=args.scale,
        p0=args.p0,
        p1=args.p1,
        from_graph=args.from_graph,
        to_graph=args.to_graph,
    )
    detector = DetectorConfig(
        method=args.detector,
        graph=args.graph,
        symmetric=args.symmetric,
        stats=args.stats,
        alpha=args.alpha,
        reps=args.reps,
    )
    manifest = _manifest_for(args, seed)
    thresholds = None
    if args.thresholds:
        thresholds = ThresholdTable.load(args.thresholds)
        manifest.add_input(args.thresholds)

    if detector.method is DetectorMethod.GSR and thresholds is None:
        manifest.config["training_length"] = detector.training_length_for(scenario)
    report = run_power(scenario, detector, thresholds)
    row: Dict[str, Any] = {
        "method": detector.label,
        "n": scenario.n,
        "d": scenario.d,
        "scenario": scenario.label(),
        "trials": report.scored,
        "seed": seed,
        **report.metrics(),
    }
    out_path = write_rows_csv(args.out, TABLE_COLUMNS, [row])
    if report.degenerate:
        manifest.notes.append(f"{report.degenerate} degenerate trials excluded")
    write_manifest(out_path, manifest)

    if args.emit_plot:
        plot_path = Path(args.plot_out or f"{out_path}.{args.emit_plot}.csv")
        if args.emit_plot == "profile":
            rows = profile_series(scenario, range(min(PLOT_TRIALS, scenario.trials)), detector.graph)
            write_profile_csv(plot_path, rows)
        else:
            rows = delta_mu_series(
                _plot_window_sizes(scenario.n), scenario.observation_dim, detector.alpha, PLOT_BETAS
            )
            write_delta_mu_csv(plot_path, rows)
        write_manifest(plot_path, _manifest_for(args, seed))

    if args.use_rich:
        _print_rich_summary(f"Power: {scenario.label()} ({detector.label})", row)
    return EXIT_OK


def _handle_table_command(args: argparse.Namespace) -> int:
    if args.experiment_id not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        logger.error("Unknown experiment %r; registered ids: %s", args.experiment_id, known)
        return EXIT_USAGE
    seed = _resolve_seed(args.seed)

    with _progress_bar(args.experiment_id, None) as progress:
        task = progress.task_ids[0]
        table = run_table(
            args.experiment_id,
            full=args.full,
            trials=args.trials,
            reps=args.reps,
            seed=seed,
            alpha=args.alpha,
            progress=lambda label: progress.update(task, advance=1, description=label),
        )

    out_path = table.write_csv(args.out)
    manifest = _manifest_for(args, seed)
    manifest.config.update(
        {
            "trials": table.trials,
            "reps": table.reps,
            "full": table.full,
            "training_windows": TRAINING_WINDOWS,
            "runtime_seconds": table.runtime_seconds,
        }
    )
    manifest.notes.extend(table.notes)
    write_manifest(out_path, manifest)

    if args.emit_plot:
        plot_path = Path(args.plot_out or f"{out_path}.{args.emit_plot}.csv")
        rows = experiment_delta_mu_series(args.experiment_id, args.alpha, PLOT_BETAS, PLOT_WINDOW_SIZES)
        write_delta_mu_csv(plot_path, rows)
        write_manifest(plot_path, _manifest_for(args, seed))

    if args.use_rich:
        _print_rich_table(table.rows)
    return EXIT_OK


def _handle_power_command(args: argparse.Namespace) -> int:
    inputs = PowerInputs(
        n=args.n,
        d=args.d,
        alpha=args.alpha,
        beta=args.beta,
        sigma2=args.sigma2,
        mu_l_sq=args.mu_l_sq,
        mu_r_sq=args.mu_r_sq,
    )
    payload = power_summary(inputs)
    if args.out:
        out_path = Path(args.out)
        out_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        write_manifest(out_path, _manifest_for(args))
    else:
        dump_json(payload)

    if args.use_rich:
        _print_rich_summary(
            "Power",
            {key: payload[key] for key in ("delta_mu", "delta_sigma_plus", "delta_sigma_minus", "min_radius", "gap_expectation")},
        )
    return EXIT_OK


# ╭──────────────────────────────────────────────────────────────╮
# │ Output renderers                                             │
# ╰──────────────────────────────────────────────────────────────╯


def _print_rich_summary(title: str, fields: Dict[str, Any]) -> None:
    """Render a key/value summary as a Rich panel on stderr."""

    from rich.console import Console
    from rich.panel import Panel
    from rich.table import Table

    console = Console(stderr=True)
    grid = Table.grid(expand=True)
    grid.add_column(justify="left")
    for key, value in fields.items():
        if isinstance(value, dict):
            value = ", ".join(f"{name}: {_format_number(item)}" for name, item in value.items()) or "-"
        grid.add_row(f"[bold]{key}[/]: {_format_number(value)}")
    console.print(Panel(grid, title=title, expand=True))


def _print_rich_events(events: Sequence[DetectionEvent]) -> None:
    from rich.console import Console
    from rich.table import Table

    table = Table(title=f"{len(events)} detection events")
    for column in ("t", "loc", "stat", "k", "value", "threshold"):
        table.add_column(column, justify="right" if column != "stat" else "left")
    for event in events:
        table.add_row(
            str(event.time),
            str(event.location),
            event.stat.value,
            str(event.k),
            _format_number(event.value),
            _format_number(event.threshold),
        )
    Console(stderr=True).print(table)


def _print_rich_table(rows: Sequence[Dict[str, Any]]) -> None:
    from rich.console import Console
    from rich.table import Table

    table = Table(title="Detection power")
    for column in TABLE_COLUMNS:
        table.add_column(column)
    for row in rows:
        table.add_row(*(_format_number(row.get(column)) for column in TABLE_COLUMNS))
    Console(stderr=True).print(table)


def _format_number(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


if __name__ == "__main__":  # pragma: no cover - module entry point
    raise SystemExit(main())
