"""Closed-loop controllers advanced by the simulation clock.

SwimController combines the open-loop caudal gait with the optional PID
depth hold. The PID updates at the control rate (default 50 Hz) while the
commanded servo angle is evaluated analytically every simulation step.
"""

from __future__ import annotations

import math

from .control import (
    BuoyancyState,
    DepthSchedule,
    GaitCommand,
    PidGains,
    PidMemory,
    apply_volume_rate,
    buoyancy_force,
    depth_controller,
    servo_angle,
    servo_rate,
)
from .hydro import ControlInput, FishParams, Measurement

_DEG = math.pi / 180.0


class SwimController:
    """Gait generation plus optional depth hold through the buoyancy syringe."""

    def __init__(
        self,
        params: FishParams,
        gait: GaitCommand,
        *,
        gains: PidGains | None = None,
        buoyancy: BuoyancyState | None = None,
        depth_schedule: DepthSchedule | None = None,
        control_period: float = 0.02,
        depth_resolution: float = 0.001,
    ):
        gait.validate()
        if gains is not None:
            gains.validate()
        if buoyancy is not None:
            buoyancy.validate()
        self.params = params
        self.gait = gait
        self.gains = gains
        self.buoyancy = buoyancy
        self.depth_schedule = depth_schedule
        self.control_period = control_period
        self.depth_resolution = depth_resolution
        self._memory = PidMemory()
        self._rate = 0.0
        self._last_update: float | None = None
        self._last_time: float | None = None
        self.depth_hold = (
            gains is not None and buoyancy is not None and depth_schedule is not None
        )

    def command(self, measurement: Measurement) -> ControlInput:
        t = measurement.time
        buoyancy_n = 0.0
        volume = self.buoyancy.syringe_volume if self.buoyancy is not None else 0.0
        if self.depth_hold:
            # integrate the syringe between calls, then refresh the PID at
            # the control rate on the quantized depth measurement
            if self._last_time is not None and t > self._last_time:
                self.buoyancy = apply_volume_rate(
                    self.buoyancy, self._rate, t - self._last_time
                )
            if (
                self._last_update is None
                or t - self._last_update >= self.control_period - 1e-12
            ):
                quantum = self.depth_resolution
                measured = (
                    round(measurement.depth / quantum) * quantum
                    if quantum > 0.0
                    else measurement.depth
                )
                dt = (
                    self.control_period
                    if self._last_update is None
                    else t - self._last_update
                )
                self._rate, self._memory = depth_controller(
                    self.depth_schedule(t),
                    measured,
                    self.gains,
                    self.buoyancy,
                    dt,
                    self._memory,
                )
                self._last_update = t
            buoyancy_n = buoyancy_force(
                self.params.water_density, self.params.gravity, self.buoyancy
            )
            volume = self.buoyancy.syringe_volume
        self._last_time = t
        return ControlInput(
            servo_angle=servo_angle(self.gait, t) * _DEG,
            servo_rate=servo_rate(self.gait, t) * _DEG,
            gait_frequency=self.gait.frequency,
            gait_amplitude=self.gait.amplitude * _DEG,
            erection=self.gait.fin_erection_setpoint,
            buoyancy=buoyancy_n,
            syringe_volume=volume,
        )


class ConstantController:
    """Fixed actuation every step; handy for open-loop and test scenarios."""

    def __init__(self, control: ControlInput):
        self.control = control

    def command(self, measurement: Measurement) -> ControlInput:
        return self.control
