"""Tests for the experiment harness: sweeps, yaw study, depth steps, calibration."""

import math

import pytest

from morphfin.control import GaitCommand
from morphfin.errors import MorphfinError
from morphfin.experiments import (
    DEFAULT_FREQUENCIES,
    YAW_AMPLITUDES,
    YAW_FREQUENCIES,
    CalibrationTarget,
    ExperimentSpec,
    RunEnvironment,
    calibrate,
    run_condition,
    run_depth_step,
    run_speed_sweep,
    run_yaw_study,
    speed_sweep_spec,
    yaw_study_spec,
)
from morphfin.hydro import FishParams
from morphfin.metrics import PowerModel


def fast_env(**overrides) -> RunEnvironment:
    """Coarse-step environment so protocol tests stay quick."""
    from morphfin.control import BuoyancyState, PidGains

    defaults = dict(
        dt=0.01,
        record_every=2,
        pid=PidGains(4e-4, 5e-7, 5e-4, 1.0, 3e-5),
        buoyancy=BuoyancyState(3e-5, 0.0, 6e-5, 1.2e-5, 3e-5),
    )
    defaults.update(overrides)
    return RunEnvironment(**defaults)


class TestProtocolShape:
    def test_speed_sweep_grid(self):
        spec = speed_sweep_spec()
        assert spec.frequencies == DEFAULT_FREQUENCIES
        assert len(spec.frequencies) == 10
        assert spec.fin_states == ["folded", "erect"]
        assert spec.repeats == 5
        # 10 frequencies x 2 fin states x 5 repeats = 100 runs
        assert len(spec.frequencies) * len(spec.fin_states) * spec.repeats == 100

    def test_yaw_study_grid(self):
        spec = yaw_study_spec()
        assert spec.frequencies == YAW_FREQUENCIES == [0.5, 1.0]
        assert spec.amplitudes == YAW_AMPLITUDES == [10.0, 20.0, 30.0]
        assert spec.fin_states == ["folded", "erect"]

    def test_duration_guard(self):
        with pytest.raises(MorphfinError):
            ExperimentSpec(frequencies=[0.5], duration=5.0).validate()  # < 10 / 0.5

    def test_sweep_row_count_and_order(self):
        spec = ExperimentSpec(
            frequencies=[1.0, 2.0],
            amplitudes=[20.0],
            fin_states=["folded", "erect"],
            repeats=2,
            duration=12.0,
        )
        result = run_speed_sweep(fast_env(), spec)
        assert len(result.rows) == 4
        keys = [(r.frequency, r.fin_state) for r in result.rows]
        assert len(set(keys)) == 4

    def test_yaw_study_table_shape(self):
        spec = ExperimentSpec(
            kind="yaw_study",
            frequencies=[1.0],
            amplitudes=[20.0],
            fin_states=["folded", "erect"],
            repeats=1,
            duration=15.0,
        )
        report = run_yaw_study(fast_env(), spec)
        assert len(report.table) == 1
        row = report.table[0]
        assert row.folded_p2p > 0 and row.erect_p2p > 0
        assert row.improvement_pct == pytest.approx(
            100.0 * (row.folded_p2p - row.erect_p2p) / row.folded_p2p
        )


class TestDeterminism:
    def test_sweep_csv_identical_across_calls(self):
        spec = ExperimentSpec(
            frequencies=[1.5], amplitudes=[20.0], fin_states=["folded"],
            repeats=2, duration=12.0, seed=7,
        )
        a = run_speed_sweep(fast_env(), spec).to_csv()
        b = run_speed_sweep(fast_env(), spec).to_csv()
        assert a == b

    def test_repeats_identical_without_noise(self):
        # with noise disabled every repeat is the same trajectory
        spec = ExperimentSpec(
            frequencies=[1.5], amplitudes=[20.0], fin_states=["folded"],
            repeats=3, duration=12.0,
        )
        row = run_speed_sweep(fast_env(), spec).rows[0]
        assert row.speed_std == 0.0
        assert row.power_std == 0.0
        assert row.p2p_std == 0.0

    def test_repeats_differ_with_noise(self):
        from morphfin.hydro import NoiseConfig

        spec = ExperimentSpec(
            frequencies=[1.5], amplitudes=[20.0], fin_states=["folded"],
            repeats=3, duration=12.0,
        )
        env = fast_env(noise=NoiseConfig(enabled=True), depth_hold=True)
        row = run_speed_sweep(env, spec).rows[0]
        assert row.speed_std >= 0.0  # finite, computed
        assert math.isfinite(row.speed_std)


class TestDepthStep:
    def test_constant_schedule_holds_depth(self):
        env = fast_env(depth_hold=True, target_depth=0.2)
        records, reports = run_depth_step(env, [(0.0, 0.2)], 20.0, initial_depth=0.2)
        # already at target: stays within 2 cm throughout
        assert all(abs(r.depth_m - 0.2) < 0.02 for r in records)
        assert reports == [] or all(rep.target == 0.2 for rep in reports)

    def test_step_down_settles(self):
        env = fast_env(depth_hold=True)
        records, reports = run_depth_step(
            env, [(0.0, 0.2), (5.0, 0.5)], 60.0, initial_depth=0.2
        )
        (report,) = [r for r in reports if r.target == 0.5]
        assert report.settling_time is not None
        assert records[-1].depth_m == pytest.approx(0.5, abs=0.01)

    def test_surface_clamp(self):
        # commanding depth 0 from shallow start never yields negative depth
        env = fast_env(depth_hold=True)
        records, _ = run_depth_step(env, [(0.0, 0.0)], 20.0, initial_depth=0.05)
        assert all(r.depth_m >= 0.0 for r in records)


class GoldenSection:
    """Independent 1-D minimizer used as an oracle for the calibrator."""

    @staticmethod
    def minimize(fun, lo, hi, iters=60):
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c, d = b - phi * (b - a), a + phi * (b - a)
        fc, fd = fun(c), fun(d)
        for _ in range(iters):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - phi * (b - a)
                fc = fun(c)
            else:
                a, c, fc = c, d, fd
                d = a + phi * (b - a)
                fd = fun(d)
        return (a + b) / 2.0


class TestCalibration:
    TARGET = [
        CalibrationTarget(
            name="speed", observable="top_speed", frequency=2.5,
            amplitude=20.0, fin_state="folded", value=0.225, weight=1.0,
        )
    ]

    def test_fixed_point_loss_is_tiny(self):
        # calibrating against the model's own output converges to ~zero loss
        env = fast_env()
        records = run_condition(env, GaitCommand(2.5, 20.0), 25.0, 0)
        from morphfin.experiments import _metrics_with_cot

        observed = _metrics_with_cot(env, records, 2.5).mean_speed
        target = [
            CalibrationTarget(
                name="speed", observable="top_speed", frequency=2.5,
                amplitude=20.0, fin_state="folded", value=observed,
            )
        ]
        result = calibrate(
            target, env,
            initial={"thrust_coeff": env.params.thrust_coeff},
            bounds={"thrust_coeff": (0.01, 1.0)},
            max_rounds=5,
        )
        assert result.loss_trace[-1] <= 1e-12

    def test_loss_trace_nonincreasing_and_bounds(self):
        env = fast_env()
        result = calibrate(
            self.TARGET, env,
            initial={"thrust_coeff": 0.08},
            bounds={"thrust_coeff": (0.05, 0.2)},
            max_rounds=8,
        )
        trace = result.loss_trace
        assert all(b <= a + 1e-15 for a, b in zip(trace, trace[1:]))
        assert 0.05 <= result.parameters["thrust_coeff"] <= 0.2

    def test_matches_golden_section_oracle(self):
        env = fast_env()
        from morphfin.experiments import evaluate_targets
        from dataclasses import replace

        def loss(k):
            e = replace(env, params=FishParams(thrust_coeff=k))
            v = evaluate_targets(e, self.TARGET)["speed"]
            return ((v - 0.225) / 0.225) ** 2

        oracle = GoldenSection.minimize(loss, 0.05, 0.3, iters=25)
        result = calibrate(
            self.TARGET, env,
            initial={"thrust_coeff": 0.08},
            bounds={"thrust_coeff": (0.05, 0.3)},
            max_rounds=20,
            step_fraction=0.2,
        )
        assert result.parameters["thrust_coeff"] == pytest.approx(oracle, rel=0.01)

    def test_residuals_reported(self):
        env = fast_env()
        result = calibrate(
            self.TARGET, env,
            initial={"thrust_coeff": 0.12},
            bounds={"thrust_coeff": (0.05, 0.3)},
            max_rounds=3,
        )
        assert set(result.residuals) == {"speed"}
        assert abs(result.residuals["speed"]) < 0.5
