"""Rigid-body dynamics of the free-swimming robotic tuna.

Planar pose (x, y, yaw) plus depth, with body-frame surge/sway velocities,
yaw rate, and heave velocity. Forces are quasi-steady surrogates: quadratic
hull drag, a cycle-mean thrust law driven by the caudal gait, a tail reaction
moment exciting head yaw, quadratic yaw damping scaled by dorsal-fin
erection, and syringe buoyancy acting on heave. States advance with a fixed
step classical Runge-Kutta (RK4) integrator.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Protocol

from .errors import ConfigError, DomainError, SimulationFault
from .metrics import PowerModel, servo_power
from .telemetry import TelemetryRecord

MAX_DT = 0.01  # s, stability envelope of the fixed-step integrator

_DEG = math.pi / 180.0


@dataclass(frozen=True)
class FishParams:
    """Physical constants and surrogate-model coefficients.

    Defaults are the committed calibrated set reproducing the published
    speed, COT, and yaw-stability anchors (see configs/default.json).
    """

    mass: float = 2.305  # kg
    yaw_inertia: float = 0.02  # kg*m^2
    body_length: float = 0.544  # m
    tail_length: float = 0.288  # m
    frontal_area: float = 0.0458  # m^2, ellipse through the 290x201 mm section
    frontal_drag_coeff: float = 0.30
    water_density: float = 1000.0  # kg/m^3
    thrust_coeff: float = 0.121546875
    thrust_freq_exponent: float = 2.0
    thrust_amp_exponent: float = 2.0
    tail_reaction_coeff: float = 0.0784  # N*m per (rad/s)^2
    yaw_damping_body: float = 0.3399625  # N*m per (rad/s)^2
    yaw_damping_fin: float = 0.245  # N*m per (rad/s)^2 at full erection
    heave_drag_coeff: float = 95.0  # N per (m/s)^2
    heave_added_mass: float = 1.5  # kg
    gravity: float = 9.81  # m/s^2

    def validate(self) -> None:
        positives = (
            "mass",
            "yaw_inertia",
            "water_density",
            "gravity",
            "frontal_area",
            "frontal_drag_coeff",
        )
        for name in positives:
            if not (getattr(self, name) > 0.0):
                raise ConfigError("must be > 0", f"fish.{name}")
        if not (self.yaw_damping_fin >= 0.0):
            raise ConfigError("must be >= 0", "fish.yaw_damping_fin")
        nonnegatives = (
            "body_length",
            "tail_length",
            "thrust_coeff",
            "tail_reaction_coeff",
            "yaw_damping_body",
            "heave_drag_coeff",
            "heave_added_mass",
        )
        for name in nonnegatives:
            if not (getattr(self, name) >= 0.0):
                raise ConfigError("must be >= 0", f"fish.{name}")


@dataclass(frozen=True)
class FishState:
    """Kinematic state. Depth is positive down; the free surface is depth 0."""

    x: float = 0.0
    y: float = 0.0
    depth: float = 0.0
    yaw: float = 0.0  # rad
    surge_vel: float = 0.0  # m/s, body frame
    sway_vel: float = 0.0  # m/s, body frame
    yaw_rate: float = 0.0  # rad/s
    heave_vel: float = 0.0  # m/s, positive down
    servo_angle: float = 0.0  # rad
    time: float = 0.0  # s

    def validate(self) -> None:
        for name in (
            "x",
            "y",
            "depth",
            "yaw",
            "surge_vel",
            "sway_vel",
            "yaw_rate",
            "heave_vel",
            "servo_angle",
            "time",
        ):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"state field {name} is not finite")
        if self.depth < 0.0:
            raise DomainError(f"depth must be >= 0, got {self.depth}")


@dataclass(frozen=True)
class ForceBreakdown:
    thrust: float  # N, forward
    drag: float  # N, signed against surge
    tail_yaw_moment: float  # N*m
    yaw_damping_moment: float  # N*m
    net_buoyancy: float  # N, positive up
    heave_drag: float  # N, signed against heave


@dataclass(frozen=True)
class ControlInput:
    """Instantaneous actuation fed to the force model for one step."""

    servo_angle: float = 0.0  # rad
    servo_rate: float = 0.0  # rad/s
    gait_frequency: float = 0.0  # Hz
    gait_amplitude: float = 0.0  # rad
    erection: float = 0.0  # [0, 1]
    buoyancy: float = 0.0  # N, positive up
    syringe_volume: float = 0.0  # m^3, carried for telemetry only

    def is_finite(self) -> bool:
        return all(
            math.isfinite(v)
            for v in (
                self.servo_angle,
                self.servo_rate,
                self.gait_frequency,
                self.gait_amplitude,
                self.erection,
                self.buoyancy,
            )
        )


def drag_force(params: FishParams, speed: float) -> float:
    """Quadratic hull drag, signed so it always opposes the motion."""
    return (
        -0.5
        * params.water_density
        * speed
        * abs(speed)
        * params.frontal_drag_coeff
        * params.frontal_area
    )


def mean_thrust(params: FishParams, freq: float, amp: float) -> float:
    """Cycle-mean propulsive force of the caudal gait (freq in Hz, amp in rad).

    Power-law surrogate k_T * rho * A * L_tail^2 * f^a * amp^b, strictly
    increasing in both arguments; the exponents are calibration variables.
    """
    if freq < 0.0 or amp < 0.0:
        raise DomainError(f"freq and amp must be >= 0, got freq={freq}, amp={amp}")
    if freq == 0.0 or amp == 0.0:
        return 0.0
    return (
        params.thrust_coeff
        * params.water_density
        * params.frontal_area
        * params.tail_length**2
        * freq**params.thrust_freq_exponent
        * amp**params.thrust_amp_exponent
    )


def net_forces(
    params: FishParams, state: FishState, control: ControlInput
) -> ForceBreakdown:
    """Quasi-steady force and moment breakdown for one instant."""
    if not (0.0 <= control.erection <= 1.0):
        raise DomainError(f"erection must be in [0, 1], got {control.erection}")
    thrust = mean_thrust(params, control.gait_frequency, control.gait_amplitude)
    sr = control.servo_rate
    # Reaction moment of the oscillating tail plus thrust-vectoring from the
    # instantaneous tail deflection; the second term is zero-mean over a
    # symmetric cycle and carries the turning bias into a mean yaw drift.
    tail_moment = params.tail_reaction_coeff * sr * abs(sr) + thrust * math.sin(
        control.servo_angle
    ) * (params.tail_length / 2.0)
    damping_coeff = params.yaw_damping_body + control.erection * params.yaw_damping_fin
    yaw_damping = -damping_coeff * state.yaw_rate * abs(state.yaw_rate)
    return ForceBreakdown(
        thrust=thrust,
        drag=drag_force(params, state.surge_vel),
        tail_yaw_moment=tail_moment,
        yaw_damping_moment=yaw_damping,
        net_buoyancy=control.buoyancy,
        heave_drag=-params.heave_drag_coeff * state.heave_vel * abs(state.heave_vel),
    )


# Internal fast path: state as a flat tuple (x, y, depth, yaw, u, v, r, w).


def _derivs(params: FishParams, sv, control: ControlInput, thrust: float):
    x, y, depth, yaw, u, v, r, w = sv
    rho_cda = 0.5 * params.water_density * params.frontal_drag_coeff * params.frontal_area
    du = (thrust - rho_cda * u * abs(u)) / params.mass
    dv = -rho_cda * v * abs(v) / params.mass  # lightly damped, unforced at zero bias
    sr = control.servo_rate
    tail_moment = params.tail_reaction_coeff * sr * abs(sr) + thrust * math.sin(
        control.servo_angle
    ) * (params.tail_length / 2.0)
    damping = params.yaw_damping_body + control.erection * params.yaw_damping_fin
    dr = (tail_moment - damping * r * abs(r)) / params.yaw_inertia
    dw = (-control.buoyancy - params.heave_drag_coeff * w * abs(w)) / (
        params.mass + params.heave_added_mass
    )
    cos_y, sin_y = math.cos(yaw), math.sin(yaw)
    return (u * cos_y - v * sin_y, u * sin_y + v * cos_y, w, r, du, dv, dr, dw)


def _rk4(params: FishParams, sv, control: ControlInput, dt: float):
    thrust = mean_thrust(params, control.gait_frequency, control.gait_amplitude)
    k1 = _derivs(params, sv, control, thrust)
    half = dt / 2.0
    s2 = tuple(s + half * k for s, k in zip(sv, k1))
    k2 = _derivs(params, s2, control, thrust)
    s3 = tuple(s + half * k for s, k in zip(sv, k2))
    k3 = _derivs(params, s3, control, thrust)
    s4 = tuple(s + dt * k for s, k in zip(sv, k3))
    k4 = _derivs(params, s4, control, thrust)
    sixth = dt / 6.0
    out = tuple(
        s + sixth * (a + 2.0 * b + 2.0 * c + d)
        for s, a, b, c, d in zip(sv, k1, k2, k3, k4)
    )
    # hard free-surface boundary: clamp depth, kill upward heave on contact
    if out[2] < 0.0:
        out = out[:2] + (0.0,) + out[3:7] + (max(out[7], 0.0),)
    return out


def step(
    params: FishParams, state: FishState, control: ControlInput, dt: float
) -> FishState:
    """Advance the state by exactly dt with one RK4 step (controls held)."""
    if not (0.0 < dt <= MAX_DT):
        raise ConfigError(f"dt must be in (0, {MAX_DT}] s, got {dt}", "sim.dt")
    sv = (
        state.x,
        state.y,
        state.depth,
        state.yaw,
        state.surge_vel,
        state.sway_vel,
        state.yaw_rate,
        state.heave_vel,
    )
    x, y, depth, yaw, u, v, r, w = _rk4(params, sv, control, dt)
    new = FishState(
        x=x,
        y=y,
        depth=depth,
        yaw=yaw,
        surge_vel=u,
        sway_vel=v,
        yaw_rate=r,
        heave_vel=w,
        servo_angle=control.servo_angle,
        time=state.time + dt,
    )
    new.validate()
    return new


@dataclass(frozen=True)
class Measurement:
    """Sensor view of the state handed to controllers (possibly noisy/quantized)."""

    time: float
    depth: float
    yaw: float  # rad


class Controller(Protocol):
    def command(self, measurement: Measurement) -> ControlInput: ...


@dataclass(frozen=True)
class NoiseConfig:
    """Seeded white sensor noise on the yaw and depth channels; off by default."""

    enabled: bool = False
    yaw_std_deg: float = 0.1
    depth_std_m: float = 0.001


def simulate(
    params: FishParams,
    controller: Controller,
    duration: float,
    dt: float = 1e-3,
    seed: int = 0,
    *,
    initial_state: FishState | None = None,
    power_model: PowerModel | None = None,
    record_every: int = 1,
    noise: NoiseConfig | None = None,
) -> list[TelemetryRecord]:
    """Run a closed-loop simulation and return sampled telemetry.

    Every `record_every`-th step is sampled (1 keeps all steps, so a run of
    duration/dt steps yields ceil(duration/dt)+1 records, the first being the
    initial state). Reproducible bit-for-bit for a fixed seed.
    """
    if duration <= 0.0:
        raise ConfigError("duration must be > 0", "sim.duration")
    if not (0.0 < dt <= MAX_DT):
        raise ConfigError(f"dt must be in (0, {MAX_DT}] s, got {dt}", "sim.dt")
    if record_every < 1:
        raise ConfigError("record_every must be >= 1", "sim.record_every")
    params.validate()
    state = initial_state if initial_state is not None else FishState()
    state.validate()
    pm = power_model if power_model is not None else PowerModel(efficiency=0.740078125, idle_power=0.5)
    noise = noise if noise is not None else NoiseConfig()
    rng = random.Random(seed)

    n_steps = math.ceil(duration / dt)
    sv = (
        state.x,
        state.y,
        state.depth,
        state.yaw,
        state.surge_vel,
        state.sway_vel,
        state.yaw_rate,
        state.heave_vel,
    )
    t0 = state.time
    records: list[TelemetryRecord] = []

    def measure(t: float, sv) -> Measurement:
        depth, yaw = sv[2], sv[3]
        if noise.enabled:
            yaw = yaw + rng.gauss(0.0, noise.yaw_std_deg * _DEG)
            depth = max(0.0, depth + rng.gauss(0.0, noise.depth_std_m))
        return Measurement(time=t, depth=depth, yaw=yaw)

    def emit(t: float, sv, control: ControlInput) -> None:
        x, y, depth, yaw, u, v, r, w = sv
        sr = control.servo_rate
        torque = abs(
            params.tail_reaction_coeff * sr * abs(sr)
            + mean_thrust(params, control.gait_frequency, control.gait_amplitude)
            * math.sin(control.servo_angle)
            * (params.tail_length / 2.0)
        )
        records.append(
            TelemetryRecord(
                time_s=t,
                x_m=x,
                y_m=y,
                depth_m=depth,
                yaw_deg=yaw / _DEG,
                yaw_rate_dps=r / _DEG,
                surge_mps=u,
                sway_mps=v,
                servo_deg=control.servo_angle / _DEG,
                torque_nm=torque,
                power_w=servo_power(pm, torque, abs(sr)),
                erection=control.erection,
                syringe_ml=control.syringe_volume * 1e6,
            )
        )

    control = controller.command(measure(t0, sv))
    if not control.is_finite():
        raise SimulationFault(t0)
    emit(t0, sv, control)

    for i in range(n_steps):
        sv = _rk4(params, sv, control, dt)
        t = t0 + (i + 1) * dt
        control = controller.command(measure(t, sv))
        if not control.is_finite():
            raise SimulationFault(t)
        if (i + 1) % record_every == 0 or i + 1 == n_steps:
            emit(t, sv, control)
    return records


def final_state(params: FishParams, records: list[TelemetryRecord]) -> FishState:
    """Reconstruct a FishState from the last telemetry record."""
    r = records[-1]
    return FishState(
        x=r.x_m,
        y=r.y_m,
        depth=r.depth_m,
        yaw=r.yaw_deg * _DEG,
        surge_vel=r.surge_mps,
        sway_vel=r.sway_mps,
        yaw_rate=r.yaw_rate_dps * _DEG,
        heave_vel=0.0,
        servo_angle=r.servo_deg * _DEG,
        time=r.time_s,
    )
