"""Command-line front end: headless runs, batches, charts, live serving.

Exit codes: 0 when every run was collision-free and every input parsed,
1 for scenario validation or collision failures (with a field-path report
on stderr), 2 for unusable flags (argparse's own convention).
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

from .control import PidGains, overshoot, settling_time, step_response
from .vehicle import ChairParams
from .gateway import GatewayConfig, serve_forever
from .plots import distance_chart, path_trace
from .records import read_trajectory, write_metrics, write_trajectory
from .scenarios import builtin_scenarios
from .session import OperatorSpec, SessionConfig, batch_run, run_session
from .world import Scenario, ScenarioError, Violation, load_scenario, with_seed

PROG = "neuronav"


def _resolve_scenario(ref: str) -> Scenario:
    """A built-in name or a path to a scenario JSON file."""
    library = builtin_scenarios()
    if ref in library:
        return library[ref]
    path = Path(ref)
    if not path.exists():
        raise ScenarioError(
            [
                Violation(
                    "scenario",
                    f"{ref!r} is neither a built-in "
                    f"({', '.join(sorted(library))}) nor a file",
                )
            ]
        )
    return load_scenario(path)


def _operator_spec(ref: str) -> OperatorSpec:
    if ref == "ideal":
        return OperatorSpec(kind="ideal")
    if ref == "stochastic":
        return OperatorSpec(kind="stochastic")
    if ref.startswith("scripted:"):
        table_path = Path(ref.split(":", 1)[1])
        rows = json.loads(table_path.read_text())
        table = tuple((float(t), float(p)) for t, p in rows)
        return OperatorSpec(kind="scripted", table=table)
    raise argparse.ArgumentTypeError(
        f"operator {ref!r}: expected ideal, stochastic, or scripted:PATH"
    )


def _print_violations(error: ScenarioError) -> None:
    for violation in error.violations:
        print(f"{violation.path}: {violation.message}", file=sys.stderr)


def _cmd_run(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    if args.seed is not None:
        scenario = with_seed(scenario, args.seed)
    config = SessionConfig(
        scenario=scenario,
        operator=_operator_spec(args.operator),
        duration_max=args.duration,
    )
    rows, metrics = run_session(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory(rows, out / "trajectory.csv")
    write_metrics(metrics, out / "metrics.json")
    print(
        f"{scenario.name}: {metrics.status} after {metrics.duration:.2f}s "
        f"(clearance {metrics.min_clearance_overall:.3f} m) -> {out}"
    )
    return 1 if metrics.status == "collision" else 0


def _parse_seeds(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",")]


def _cmd_batch(args) -> int:
    if args.scenarios:
        corpus_dir = Path(args.scenarios)
        paths = sorted(corpus_dir.glob("*.json"))
        if not paths:
            raise ScenarioError(
                [Violation("scenarios", f"no *.json files under {corpus_dir}")]
            )
        scenarios = [load_scenario(p) for p in paths]
    else:
        scenarios = [_resolve_scenario(args.scenario)]
    seeds = _parse_seeds(args.seeds) if args.seeds else None
    operator = _operator_spec(args.operator)
    configs = []
    for scenario in scenarios:
        for seed in seeds if seeds is not None else [scenario.seed]:
            configs.append(
                SessionConfig(
                    scenario=with_seed(scenario, seed),
                    operator=operator,
                    duration_max=args.duration,
                )
            )
    report = batch_run(configs, parallelism=args.parallelism, out_dir=args.out)
    agg = report["aggregate"]
    print(
        f"{agg['count']} runs, {agg['successes']} reached "
        f"({agg['success_rate']:.0%}), {agg['collisions']} collisions, "
        f"worst clearance {agg['worst_clearance']:.3f} m"
    )
    return 1 if agg["collisions"] else 0


def _cmd_plot(args) -> int:
    rows = read_trajectory(args.infile)
    Path(args.out).write_text(distance_chart(rows))
    print(f"wrote {args.out}")
    if args.trace:
        if not args.scenario:
            print("--trace needs --scenario for obstacles", file=sys.stderr)
            return 2
        scenario = _resolve_scenario(args.scenario)
        Path(args.trace).write_text(path_trace(rows, scenario))
        print(f"wrote {args.trace}")
    return 0


def _cmd_step_response(args) -> int:
    samples = step_response(
        args.channel, args.setpoint, args.duration, 0.02, ChairParams(), PidGains()
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        fh.write("time,setpoint,measured,output\r\n")
        for s in samples:
            fh.write(f"{s.time!r},{s.setpoint!r},{s.measured!r},{s.output!r}\r\n")
    settle = settling_time(samples)
    print(
        f"{args.channel} step to {args.setpoint}: settling {settle:.2f}s, "
        f"overshoot {overshoot(samples):.1%} -> {out}"
    )
    return 0


def _cmd_serve(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    if args.seed is not None:
        scenario = with_seed(scenario, args.seed)
    config = GatewayConfig(
        session=SessionConfig(
            scenario=scenario,
            operator=OperatorSpec(kind="external"),
            duration_max=args.duration,
        ),
        host=args.host,
        port=args.port,
        decimation=args.decimation,
        strict_bci=args.strict_bci,
        ui_dir=Path(args.ui_dir) if args.ui_dir else None,
    )
    try:
        asyncio.run(serve_forever(config))
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="wheelchair navigation simulator and operator console backend",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="one headless session -> CSV + metrics")
    run_p.add_argument("--scenario", default="demo", help="built-in name or JSON path")
    run_p.add_argument("--operator", default="ideal")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--duration", type=float, default=120.0)
    run_p.add_argument("--out", default="runs")
    run_p.set_defaults(fn=_cmd_run)

    batch_p = sub.add_parser("batch", help="many sessions -> report + per-run files")
    batch_p.add_argument("--scenario", default="demo")
    batch_p.add_argument("--scenarios", default=None, help="directory of scenario JSON")
    batch_p.add_argument("--seeds", default=None, help="e.g. 0..99 or 3,5,8")
    batch_p.add_argument("--operator", default="ideal")
    batch_p.add_argument("--duration", type=float, default=120.0)
    batch_p.add_argument("--parallelism", type=int, default=1)
    batch_p.add_argument("--out", default=None)
    batch_p.set_defaults(fn=_cmd_batch)

    plot_p = sub.add_parser("plot", help="trajectory CSV -> SVG charts")
    plot_p.add_argument("--in", dest="infile", required=True)
    plot_p.add_argument("--out", required=True, help="distance-vs-time SVG")
    plot_p.add_argument("--trace", default=None, help="also write an XY path SVG here")
    plot_p.add_argument("--scenario", default=None, help="world to draw behind the trace")
    plot_p.set_defaults(fn=_cmd_plot)

    step_p = sub.add_parser("step-response", help="closed-loop PID step record -> CSV")
    step_p.add_argument("--channel", choices=("v", "w"), default="v")
    step_p.add_argument("--setpoint", type=float, default=0.5)
    step_p.add_argument("--duration", type=float, default=4.0)
    step_p.add_argument("--out", default="step.csv")
    step_p.set_defaults(fn=_cmd_step_response)

    serve_p = sub.add_parser("serve", help="live session over WebSocket + TCP line protocol")
    serve_p.add_argument("--scenario", default="demo")
    serve_p.add_argument("--seed", type=int, default=None)
    serve_p.add_argument("--duration", type=float, default=600.0)
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8765)
    serve_p.add_argument("--decimation", type=int, default=2)
    serve_p.add_argument("--strict-bci", action="store_true")
    serve_p.add_argument("--ui-dir", default=None, help="static console bundle to serve")
    serve_p.set_defaults(fn=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as error:
        _print_violations(error)
        return 1
    except FileNotFoundError as error:
        print(f"{error.filename}: not found", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
