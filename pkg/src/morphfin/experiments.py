"""Experiment protocols and surrogate-coefficient calibration.

The speed/COT sweep and the yaw-stability study mirror the published
protocols (10 frequencies x 2 fin states x 5 repeats; 6 gait conditions x
2 fin states). Calibration fits surrogate coefficients to the published
anchors by derivative-free coordinate descent with shrinking steps.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field, replace
from typing import Sequence

from .control import BuoyancyState, GaitCommand, PidGains, step_schedule
from .controllers import SwimController
from .errors import ConfigError, DomainError, MorphfinError, SimulationFault
from .hydro import FishParams, FishState, NoiseConfig, simulate
from .metrics import (
    PowerModel,
    cot,
    improvement,
    mean_displacement_speed,
    mean_over_window,
    peak_to_peak,
    steady_window,
)
from .telemetry import TelemetryRecord

FIN_STATES = ("folded", "erect")

DEFAULT_FREQUENCIES = [round(0.80 + 0.17 * i, 2) for i in range(10)]  # 0.80..2.33 Hz
YAW_FREQUENCIES = [0.5, 1.0]
YAW_AMPLITUDES = [10.0, 20.0, 30.0]


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one protocol run."""

    kind: str = "speed_sweep"
    frequencies: list[float] = field(default_factory=lambda: list(DEFAULT_FREQUENCIES))
    amplitudes: list[float] = field(default_factory=lambda: [20.0])
    fin_states: list[str] = field(default_factory=lambda: list(FIN_STATES))
    repeats: int = 5
    duration: float = 25.0
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in ("speed_sweep", "yaw_study", "depth_step", "single_run"):
            raise ConfigError(f"unknown kind {self.kind!r}", "experiment.kind")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1", "experiment.repeats")
        if not self.frequencies or any(f <= 0.0 for f in self.frequencies):
            raise ConfigError("frequencies must be positive", "experiment.frequencies")
        for state in self.fin_states:
            if state not in FIN_STATES:
                raise ConfigError(
                    f"fin states must be one of {FIN_STATES}", "experiment.fin_states"
                )
        lowest = min(self.frequencies)
        if self.duration < 10.0 / lowest:
            raise ConfigError(
                f"duration must cover >= 10 cycles at {lowest} Hz",
                "experiment.duration",
            )


def speed_sweep_spec(repeats: int = 5, duration: float = 25.0, seed: int = 0) -> ExperimentSpec:
    return ExperimentSpec(kind="speed_sweep", repeats=repeats, duration=duration, seed=seed)


def yaw_study_spec(repeats: int = 1, duration: float = 25.0, seed: int = 0) -> ExperimentSpec:
    return ExperimentSpec(
        kind="yaw_study",
        frequencies=list(YAW_FREQUENCIES),
        amplitudes=list(YAW_AMPLITUDES),
        repeats=repeats,
        duration=duration,
        seed=seed,
    )


@dataclass(frozen=True)
class RunEnvironment:
    """Everything besides the gait needed to run one simulation."""

    params: FishParams = field(default_factory=FishParams)
    power: PowerModel = field(default_factory=lambda: PowerModel(0.740078125, 0.5))
    pid: PidGains | None = None
    buoyancy: BuoyancyState | None = None
    dt: float = 1e-3
    record_every: int = 10
    control_period: float = 0.02
    depth_resolution: float = 0.001
    depth_hold: bool = False
    target_depth: float = 0.2
    noise: NoiseConfig = field(default_factory=NoiseConfig)


def run_condition(
    env: RunEnvironment,
    gait: GaitCommand,
    duration: float,
    seed: int,
    *,
    initial_state: FishState | None = None,
) -> list[TelemetryRecord]:
    """One seeded simulation of a single gait condition."""
    schedule = None
    buoyancy = env.buoyancy
    if env.depth_hold and env.pid is not None and env.buoyancy is not None:
        schedule = step_schedule([(0.0, env.target_depth)])
        if initial_state is None:
            initial_state = FishState(depth=env.target_depth)
    controller = SwimController(
        env.params,
        gait,
        gains=env.pid if schedule else None,
        buoyancy=buoyancy if schedule else None,
        depth_schedule=schedule,
        control_period=env.control_period,
        depth_resolution=env.depth_resolution,
    )
    return simulate(
        env.params,
        controller,
        duration,
        env.dt,
        seed,
        initial_state=initial_state,
        power_model=env.power,
        record_every=env.record_every,
        noise=env.noise,
    )


@dataclass(frozen=True)
class ConditionMetrics:
    mean_speed: float
    mean_power: float
    cot: float
    p2p_yaw: float


def condition_metrics(
    records: Sequence[TelemetryRecord], frequency: float
) -> ConditionMetrics:
    """Steady-window metrics of one run."""
    duration = records[-1].time_s - records[0].time_s
    window = steady_window(duration, frequency)
    times = [r.time_s for r in records]
    speed = mean_displacement_speed(
        times, [r.x_m for r in records], [r.y_m for r in records], window
    )
    power = mean_over_window(times, [r.power_w for r in records], window)
    p2p = peak_to_peak(times, [r.yaw_deg for r in records], window, frequency)
    # COT needs the run's mass and gravity; recomputed by callers that have
    # params. Here we store power and speed; cot filled by caller.
    return ConditionMetrics(mean_speed=speed, mean_power=power, cot=math.nan, p2p_yaw=p2p)


def _metrics_with_cot(
    env: RunEnvironment, records: Sequence[TelemetryRecord], frequency: float
) -> ConditionMetrics:
    m = condition_metrics(records, frequency)
    value = cot(m.mean_power, env.params.mass, env.params.gravity, m.mean_speed)
    return replace(m, cot=value)


@dataclass(frozen=True)
class SweepRow:
    frequency: float
    amplitude: float
    fin_state: str
    mean_speed: float
    speed_std: float
    mean_power: float
    power_std: float
    cot: float
    cot_std: float
    p2p_yaw: float
    p2p_std: float


@dataclass(frozen=True)
class SweepResult:
    rows: list[SweepRow]

    CSV_HEADER = (
        "frequency_hz,amplitude_deg,fin_state,mean_speed_mps,speed_std,"
        "mean_power_w,power_std,cot,cot_std,p2p_yaw_deg,p2p_std"
    )

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.frequency:.9g},{r.amplitude:.9g},{r.fin_state},"
                f"{r.mean_speed:.9g},{r.speed_std:.9g},{r.mean_power:.9g},"
                f"{r.power_std:.9g},{r.cot:.9g},{r.cot_std:.9g},"
                f"{r.p2p_yaw:.9g},{r.p2p_std:.9g}"
            )
        return "\n".join(lines) + "\n"


def _erection(fin_state: str) -> float:
    if fin_state not in FIN_STATES:
        raise DomainError(f"fin state must be one of {FIN_STATES}, got {fin_state!r}")
    return 1.0 if fin_state == "erect" else 0.0


def _std(values: list[float]) -> float:
    return statistics.pstdev(values) if len(values) > 1 else 0.0


def _aggregate(
    env: RunEnvironment,
    frequency: float,
    amplitude: float,
    fin_state: str,
    duration: float,
    repeats: int,
    base_seed: int,
    keep_records: list | None = None,
) -> SweepRow:
    gait = GaitCommand(
        frequency=frequency,
        amplitude=amplitude,
        fin_erection_setpoint=_erection(fin_state),
    )
    speeds, powers, cots, p2ps = [], [], [], []
    for rep in range(repeats):
        try:
            records = run_condition(env, gait, duration, base_seed + rep)
        except SimulationFault as exc:
            raise MorphfinError(
                f"sweep aborted: condition (f={frequency} Hz, amp={amplitude} deg, "
                f"{fin_state}) repeat {rep} faulted: {exc}"
            ) from exc
        if keep_records is not None and rep == 0:
            keep_records.append((frequency, amplitude, fin_state, records))
        m = _metrics_with_cot(env, records, frequency)
        speeds.append(m.mean_speed)
        powers.append(m.mean_power)
        cots.append(m.cot)
        p2ps.append(m.p2p_yaw)
    return SweepRow(
        frequency=frequency,
        amplitude=amplitude,
        fin_state=fin_state,
        mean_speed=statistics.fmean(speeds),
        speed_std=_std(speeds),
        mean_power=statistics.fmean(powers),
        power_std=_std(powers),
        cot=statistics.fmean(cots),
        cot_std=_std(cots),
        p2p_yaw=statistics.fmean(p2ps),
        p2p_std=_std(p2ps),
    )


def run_speed_sweep(
    env: RunEnvironment,
    spec: ExperimentSpec,
    keep_records: list | None = None,
) -> SweepResult:
    """Speed/power/COT over the frequency grid for each fin state."""
    if spec.kind != "speed_sweep":
        raise DomainError(f"spec kind must be speed_sweep, got {spec.kind!r}")
    spec.validate()
    rows = []
    run_index = 0
    for fin_state in spec.fin_states:
        for amplitude in spec.amplitudes:
            for frequency in spec.frequencies:
                rows.append(
                    _aggregate(
                        env,
                        frequency,
                        amplitude,
                        fin_state,
                        spec.duration,
                        spec.repeats,
                        spec.seed + 1000 * run_index,
                        keep_records,
                    )
                )
                run_index += 1
    return SweepResult(rows=rows)


@dataclass(frozen=True)
class YawConditionRow:
    amplitude: float
    frequency: float
    folded_p2p: float
    erect_p2p: float
    improvement_pct: float


@dataclass(frozen=True)
class YawStudyReport:
    sweep: SweepResult
    table: list[YawConditionRow]

    CSV_HEADER = "amplitude_deg,frequency_hz,folded_p2p_deg,erect_p2p_deg,improvement_pct"

    def table_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.table:
            lines.append(
                f"{r.amplitude:.9g},{r.frequency:.9g},{r.folded_p2p:.9g},"
                f"{r.erect_p2p:.9g},{r.improvement_pct:.9g}"
            )
        return "\n".join(lines) + "\n"


def run_yaw_study(
    env: RunEnvironment,
    spec: ExperimentSpec,
    keep_records: list | None = None,
) -> YawStudyReport:
    """Peak-to-peak yaw per gait condition, folded vs erect fin."""
    if spec.kind != "yaw_study":
        raise DomainError(f"spec kind must be yaw_study, got {spec.kind!r}")
    spec.validate()
    rows = []
    run_index = 0
    by_condition: dict[tuple[float, float, str], SweepRow] = {}
    for fin_state in spec.fin_states:
        for amplitude in spec.amplitudes:
            for frequency in spec.frequencies:
                row = _aggregate(
                    env,
                    frequency,
                    amplitude,
                    fin_state,
                    spec.duration,
                    spec.repeats,
                    spec.seed + 1000 * run_index,
                    keep_records,
                )
                rows.append(row)
                by_condition[(amplitude, frequency, fin_state)] = row
                run_index += 1
    table = []
    if set(spec.fin_states) == set(FIN_STATES):
        for amplitude in spec.amplitudes:
            for frequency in spec.frequencies:
                folded = by_condition[(amplitude, frequency, "folded")].p2p_yaw
                erect = by_condition[(amplitude, frequency, "erect")].p2p_yaw
                table.append(
                    YawConditionRow(
                        amplitude=amplitude,
                        frequency=frequency,
                        folded_p2p=folded,
                        erect_p2p=erect,
                        improvement_pct=improvement(folded, erect),
                    )
                )
    return YawStudyReport(sweep=SweepResult(rows=rows), table=table)


@dataclass(frozen=True)
class DepthStepReport:
    start_time: float
    target: float
    settling_time: float | None  # s from step start; None if never settled
    overshoot_pct: float


def run_depth_step(
    env: RunEnvironment,
    schedule: list[tuple[float, float]],
    duration: float,
    seed: int = 0,
    *,
    gait: GaitCommand | None = None,
    initial_depth: float | None = None,
    band_fraction: float = 0.02,
) -> tuple[list[TelemetryRecord], list[DepthStepReport]]:
    """Closed-loop depth tracking of a target schedule, with per-step analysis."""
    if not schedule:
        raise DomainError("schedule must be nonempty")
    if env.pid is None or env.buoyancy is None:
        raise ConfigError("depth step needs PID gains and a buoyancy state", "env")
    gait = gait if gait is not None else GaitCommand(frequency=0.0, amplitude=0.0)
    start_depth = initial_depth if initial_depth is not None else schedule[0][1]
    controller = SwimController(
        env.params,
        gait,
        gains=env.pid,
        buoyancy=env.buoyancy,
        depth_schedule=step_schedule(list(schedule)),
        control_period=env.control_period,
        depth_resolution=env.depth_resolution,
    )
    records = simulate(
        env.params,
        controller,
        duration,
        env.dt,
        seed,
        initial_state=FishState(depth=start_depth),
        power_model=env.power,
        record_every=env.record_every,
        noise=env.noise,
    )
    ordered = sorted(schedule)
    reports = []
    for i, (t_start, target) in enumerate(ordered):
        t_end = ordered[i + 1][0] if i + 1 < len(ordered) else records[-1].time_s
        seg = [r for r in records if t_start <= r.time_s <= t_end]
        if not seg:
            continue
        step_size = abs(target - seg[0].depth_m)
        band = band_fraction * (step_size if step_size > 0.0 else max(target, 1.0))
        settled = None
        for j in range(len(seg) - 1, -1, -1):
            if abs(seg[j].depth_m - target) > band:
                settled = seg[j + 1].time_s - t_start if j + 1 < len(seg) else None
                break
        else:
            settled = 0.0
        if step_size > 0.0:
            signed = [
                (r.depth_m - target) * (1.0 if target > seg[0].depth_m else -1.0)
                for r in seg
            ]
            overshoot = max(0.0, max(signed)) / step_size * 100.0
        else:
            overshoot = 0.0
        reports.append(
            DepthStepReport(
                start_time=t_start,
                target=target,
                settling_time=settled,
                overshoot_pct=overshoot,
            )
        )
    return records, reports


# --- calibration ---------------------------------------------------------

OBSERVABLES = ("top_speed", "cot_at_fmax", "p2p_yaw")

# Parameters the default calibration is allowed to move, with bounds.
DEFAULT_BOUNDS: dict[str, tuple[float, float]] = {
    "thrust_coeff": (0.01, 1.0),
    "tail_reaction_coeff": (0.005, 0.5),
    "yaw_damping_body": (0.01, 2.0),
    "yaw_damping_fin": (0.0, 2.0),
    "efficiency": (0.05, 1.0),
}

_POWER_FIELDS = {"efficiency", "idle_power"}


@dataclass(frozen=True)
class CalibrationTarget:
    name: str
    observable: str  # top_speed | cot_at_fmax | p2p_yaw
    frequency: float
    amplitude: float
    fin_state: str
    value: float
    weight: float = 1.0

    def validate(self) -> None:
        if self.observable not in OBSERVABLES:
            raise ConfigError(f"unknown observable {self.observable!r}", self.name)
        if not (self.value > 0.0 and self.weight > 0.0):
            raise ConfigError("value and weight must be > 0", self.name)
        _erection(self.fin_state)


def default_targets() -> list[CalibrationTarget]:
    """The nine published anchors: top speed, two COT values, six yaw pairs."""
    targets = [
        CalibrationTarget("top_speed", "top_speed", 2.5, 20.0, "folded", 0.225, 4.0),
        CalibrationTarget("cot_folded_fmax", "cot_at_fmax", 2.33, 20.0, "folded", 1.42, 2.0),
        CalibrationTarget("cot_erect_fmax", "cot_at_fmax", 2.33, 20.0, "erect", 1.32, 2.0),
    ]
    # one yaw cell per condition, alternating fin states so both damping
    # coefficients are constrained; the flagship 20 deg / 1 Hz pair gets both
    # states and extra weight
    yaw_cells = [
        (10.0, 0.5, "folded", 7.65, 1.0),
        (10.0, 1.0, "erect", 6.99, 1.0),
        (20.0, 1.0, "folded", 18.47, 3.0),
        (20.0, 1.0, "erect", 14.01, 3.0),
        (30.0, 0.5, "erect", 23.32, 1.0),
        (30.0, 1.0, "folded", 26.47, 1.0),
    ]
    for amp, freq, fin_state, value, weight in yaw_cells:
        targets.append(
            CalibrationTarget(
                f"p2p_{int(amp)}deg_{freq}hz_{fin_state}",
                "p2p_yaw",
                freq,
                amp,
                fin_state,
                value,
                weight,
            )
        )
    return targets


@dataclass(frozen=True)
class CalibrationResult:
    parameters: dict[str, float]
    loss_trace: list[float]
    residuals: dict[str, float]  # relative residual per target


def _apply_parameters(
    params: FishParams, power: PowerModel, values: dict[str, float]
) -> tuple[FishParams, PowerModel]:
    fish_updates = {k: v for k, v in values.items() if k not in _POWER_FIELDS}
    power_updates = {k: v for k, v in values.items() if k in _POWER_FIELDS}
    return replace(params, **fish_updates), replace(power, **power_updates)


def _observable_duration(observable: str, frequency: float) -> float:
    if observable == "p2p_yaw":
        transient = max(5.0, 5.0 / frequency)
        return transient + 8.0 / frequency
    return 25.0


def evaluate_targets(
    env: RunEnvironment, targets: Sequence[CalibrationTarget], seed: int = 0
) -> dict[str, float]:
    """Simulated value of each target observable; one run per unique condition."""
    cache: dict[tuple, list[TelemetryRecord]] = {}
    out: dict[str, float] = {}
    for t in targets:
        duration = _observable_duration(t.observable, t.frequency)
        key = (t.frequency, t.amplitude, t.fin_state, duration)
        if key not in cache:
            gait = GaitCommand(
                frequency=t.frequency,
                amplitude=t.amplitude,
                fin_erection_setpoint=_erection(t.fin_state),
            )
            cache[key] = run_condition(env, gait, duration, seed)
        records = cache[key]
        m = _metrics_with_cot(env, records, t.frequency)
        if t.observable == "top_speed":
            out[t.name] = m.mean_speed
        elif t.observable == "cot_at_fmax":
            out[t.name] = m.cot
        else:
            out[t.name] = m.p2p_yaw
    return out


def calibrate(
    targets: Sequence[CalibrationTarget],
    env: RunEnvironment,
    initial: dict[str, float],
    bounds: dict[str, tuple[float, float]],
    *,
    seed: int = 0,
    max_rounds: int = 60,
    step_fraction: float = 0.2,
    tol: float = 1e-3,
    verbose: bool = False,
) -> CalibrationResult:
    """Minimize the weighted sum of squared relative residuals.

    Derivative-free coordinate descent: probe each free parameter up and down
    by its current step, accept improvements, halve all steps after a sweep
    with no improvement. A trial point whose simulation faults scores +inf.
    """
    if not targets:
        raise DomainError("need at least one calibration target")
    for t in targets:
        t.validate()
    names = list(initial)
    for n in names:
        if n not in bounds:
            raise ConfigError(f"no bounds for parameter {n!r}", "calibrate.bounds")
        lo, hi = bounds[n]
        if not (lo <= initial[n] <= hi):
            raise ConfigError(f"initial {n}={initial[n]} outside [{lo}, {hi}]", n)

    def loss_of(values: dict[str, float]) -> tuple[float, dict[str, float]]:
        fish, power = _apply_parameters(env.params, env.power, values)
        trial_env = replace(env, params=fish, power=power)
        try:
            simulated = evaluate_targets(trial_env, targets, seed)
        except MorphfinError:
            return math.inf, {}
        residuals = {
            t.name: (simulated[t.name] - t.value) / t.value for t in targets
        }
        loss = sum(t.weight * residuals[t.name] ** 2 for t in targets)
        return loss, residuals

    current = dict(initial)
    best_loss, best_res = loss_of(current)
    trace = [best_loss]
    steps = {n: step_fraction * (bounds[n][1] - bounds[n][0]) for n in names}

    for _ in range(max_rounds):
        improved = False
        for n in names:
            lo, hi = bounds[n]
            for direction in (1.0, -1.0):
                candidate = dict(current)
                candidate[n] = min(max(current[n] + direction * steps[n], lo), hi)
                if candidate[n] == current[n]:
                    continue
                cand_loss, cand_res = loss_of(candidate)
                if cand_loss < best_loss:
                    current, best_loss, best_res = candidate, cand_loss, cand_res
                    trace.append(best_loss)
                    improved = True
                    if verbose:
                        print(f"  {n} -> {current[n]:.6g}  loss {best_loss:.6g}")
                    break
        if not improved:
            for n in names:
                steps[n] *= 0.5
            if all(
                steps[n] / (bounds[n][1] - bounds[n][0]) < tol for n in names
            ):
                break
    return CalibrationResult(parameters=current, loss_trace=trace, residuals=best_res)
