"""Command-line interface tying the simulator, experiments, and outputs together.

Exit codes: 0 success, 1 domain/config error, 2 I/O error. Diagnostics go to
stderr; all data goes to files (or stdout when streaming).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments as xp
from .config import RunConfig, load_config, load_default_config
from .control import GaitCommand
from .errors import MorphfinError
from .metrics import steady_window
from .plotting import PlotStyle, Series, emit_plot
from .telemetry import read_telemetry, stream_records, write_telemetry


def _environment(config: RunConfig) -> xp.RunEnvironment:
    sim = config.sim
    return xp.RunEnvironment(
        params=config.fish,
        power=config.power,
        pid=config.pid,
        buoyancy=config.buoyancy,
        dt=sim.dt,
        record_every=sim.record_every,
        control_period=sim.control_period,
        depth_resolution=sim.depth_resolution_m,
        depth_hold=sim.depth_hold,
        target_depth=sim.target_depth,
        noise=sim.noise(),
    )


def _replay_metrics(records, frequency: float, mass: float, gravity: float) -> dict:
    duration = records[-1].time_s - records[0].time_s
    window = steady_window(duration, frequency)
    m = xp.condition_metrics(records, frequency)
    from .metrics import cot as cot_fn

    return {
        "window_s": list(window),
        "mean_speed_mps": m.mean_speed,
        "mean_power_w": m.mean_power,
        "cot": cot_fn(m.mean_power, mass, gravity, m.mean_speed),
        "p2p_yaw_deg": m.p2p_yaw,
    }


def _cmd_run(config: RunConfig, out: Path, stream: bool) -> int:
    env = _environment(config)
    records = xp.run_condition(
        env, config.gait, config.sim.duration, config.sim.seed
    )
    if stream:
        stream_records(records, sys.stdout)
        return 0
    out.mkdir(parents=True, exist_ok=True)
    path = out / "run.csv"
    write_telemetry(records, path)
    metrics = _replay_metrics(
        records, config.gait.frequency, config.fish.mass, config.fish.gravity
    )
    (out / "run_metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
    print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_sweep_speed(config: RunConfig, out: Path) -> int:
    env = _environment(config)
    spec = config.experiment
    if spec.kind != "speed_sweep":
        spec = xp.speed_sweep_spec(seed=config.sim.seed)
    kept: list = []
    result = xp.run_speed_sweep(env, spec, keep_records=kept)
    out.mkdir(parents=True, exist_ok=True)
    (out / "speed_sweep.csv").write_text(result.to_csv())
    for freq, amp, fin_state, records in kept:
        write_telemetry(
            records, out / f"run_f{freq:.2f}_a{amp:.0f}_{fin_state}.csv"
        )
    series = []
    for fin_state in spec.fin_states:
        rows = [r for r in result.rows if r.fin_state == fin_state]
        series.append(
            Series(
                name=fin_state,
                x=[r.frequency for r in rows],
                y=[r.mean_speed for r in rows],
            )
        )
    emit_plot(
        series,
        PlotStyle(
            title="Mean speed vs gait frequency",
            x_label="frequency (Hz)",
            y_label="speed (m/s)",
        ),
        out / "speed_vs_frequency.svg",
    )
    print(f"wrote {out / 'speed_sweep.csv'}", file=sys.stderr)
    return 0


def _cmd_yaw_study(config: RunConfig, out: Path) -> int:
    env = _environment(config)
    spec = config.experiment
    if spec.kind != "yaw_study":
        spec = xp.yaw_study_spec(seed=config.sim.seed)
    kept: list = []
    report = xp.run_yaw_study(env, spec, keep_records=kept)
    out.mkdir(parents=True, exist_ok=True)
    (out / "yaw_study.csv").write_text(report.table_csv())
    for freq, amp, fin_state, records in kept:
        write_telemetry(
            records, out / f"yaw_f{freq:.2f}_a{amp:.0f}_{fin_state}.csv"
        )
    series = [
        Series(
            name="folded",
            x=list(range(len(report.table))),
            y=[r.folded_p2p for r in report.table],
        ),
        Series(
            name="erect",
            x=list(range(len(report.table))),
            y=[r.erect_p2p for r in report.table],
        ),
    ]
    emit_plot(
        series,
        PlotStyle(
            title="Peak-to-peak yaw per condition",
            x_label="condition index",
            y_label="yaw p2p (deg)",
        ),
        out / "yaw_p2p.svg",
    )
    print(f"wrote {out / 'yaw_study.csv'}", file=sys.stderr)
    return 0


def _cmd_depth_step(config: RunConfig, out: Path) -> int:
    env = _environment(config)
    schedule = [(t, d) for t, d in config.depth_schedule]
    duration = config.sim.duration
    records, reports = xp.run_depth_step(
        env,
        schedule,
        duration,
        config.sim.seed,
        initial_depth=config.sim.initial_depth,
    )
    out.mkdir(parents=True, exist_ok=True)
    write_telemetry(records, out / "depth_step.csv")
    payload = [
        {
            "start_time_s": r.start_time,
            "target_m": r.target,
            "settling_time_s": r.settling_time,
            "overshoot_pct": r.overshoot_pct,
        }
        for r in reports
    ]
    (out / "depth_step_report.json").write_text(json.dumps(payload, indent=2) + "\n")
    emit_plot(
        [Series("depth", [r.time_s for r in records], [r.depth_m for r in records])],
        PlotStyle(title="Depth step response", x_label="time (s)", y_label="depth (m)"),
        out / "depth_step.svg",
    )
    print(f"wrote {out / 'depth_step.csv'}", file=sys.stderr)
    return 0


def _cmd_calibrate(config: RunConfig, out: Path) -> int:
    env = _environment(config)
    initial = {
        "thrust_coeff": config.fish.thrust_coeff,
        "tail_reaction_coeff": config.fish.tail_reaction_coeff,
        "yaw_damping_body": config.fish.yaw_damping_body,
        "yaw_damping_fin": config.fish.yaw_damping_fin,
        "efficiency": config.power.efficiency,
    }
    result = xp.calibrate(
        xp.default_targets(),
        env,
        initial,
        xp.DEFAULT_BOUNDS,
        seed=config.sim.seed,
        verbose=True,
    )
    out.mkdir(parents=True, exist_ok=True)
    (out / "calibration.json").write_text(
        json.dumps(
            {
                "parameters": result.parameters,
                "residuals": result.residuals,
                "final_loss": result.loss_trace[-1],
            },
            indent=2,
        )
        + "\n"
    )
    (out / "loss_trace.csv").write_text(
        "iteration,loss\n"
        + "".join(f"{i},{v:.9g}\n" for i, v in enumerate(result.loss_trace))
    )
    print(f"wrote {out / 'calibration.json'}", file=sys.stderr)
    return 0


def _cmd_replay(config: RunConfig, telemetry_path: str, out: Path | None) -> int:
    records = read_telemetry(telemetry_path)
    metrics = _replay_metrics(
        records, config.gait.frequency, config.fish.mass, config.fish.gravity
    )
    text = json.dumps(metrics, indent=2) + "\n"
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "replay_metrics.json").write_text(text)
        print(f"wrote {out / 'replay_metrics.json'}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_plot(telemetry_path: str, x: str, ys: list[str], out: Path) -> int:
    records = read_telemetry(telemetry_path)
    from dataclasses import fields as dc_fields

    names = {f.name for f in dc_fields(records[0])}
    for col in [x, *ys]:
        if col not in names:
            raise MorphfinError(f"unknown telemetry column {col!r}")
    series = [
        Series(name=col, x=[getattr(r, x) for r in records], y=[getattr(r, col) for r in records])
        for col in ys
    ]
    out.mkdir(parents=True, exist_ok=True)
    dest = out / "plot.svg"
    emit_plot(series, PlotStyle(x_label=x, y_label=", ".join(ys)), dest)
    print(f"wrote {dest}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphfin",
        description="Free-swimming robotic tuna simulator with a morphing dorsal fin",
    )
    parser.add_argument("--config", help="path to a JSON run config")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", default="results", help="output directory")
    sub = parser.add_subparsers(dest="command")
    run = sub.add_parser("run", help="single simulation of the configured gait")
    run.add_argument("--stream", action="store_true", help="stream records to stdout")
    sub.add_parser("sweep-speed", help="speed/COT sweep over the frequency grid")
    sub.add_parser("yaw-study", help="yaw stability study, folded vs erect fin")
    sub.add_parser("depth-step", help="closed-loop depth schedule tracking")
    sub.add_parser("calibrate", help="fit surrogate coefficients to the anchors")
    replay = sub.add_parser("replay", help="recompute metrics from a telemetry file")
    replay.add_argument("telemetry", help="telemetry CSV path")
    plot = sub.add_parser("plot", help="render telemetry columns as an SVG chart")
    plot.add_argument("telemetry", help="telemetry CSV path")
    plot.add_argument("--x", default="time_s")
    plot.add_argument("--y", action="append", default=None, help="repeatable y column")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        config = load_config(args.config) if args.config else load_default_config()
        if args.seed is not None:
            from dataclasses import replace

            config = replace(config, sim=replace(config.sim, seed=args.seed))
        out = Path(args.out)
        if args.command == "run":
            return _cmd_run(config, out, args.stream)
        if args.command == "sweep-speed":
            return _cmd_sweep_speed(config, out)
        if args.command == "yaw-study":
            return _cmd_yaw_study(config, out)
        if args.command == "depth-step":
            return _cmd_depth_step(config, out)
        if args.command == "calibrate":
            return _cmd_calibrate(config, out)
        if args.command == "replay":
            return _cmd_replay(config, args.telemetry, out)
        if args.command == "plot":
            ys = args.y if args.y else ["yaw_deg"]
            return _cmd_plot(args.telemetry, args.x, ys, out)
        parser.print_usage(sys.stderr)
        return 1
    except MorphfinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
