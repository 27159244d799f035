#!/usr/bin/env python3
"""Tuning procedure for the default depth-hold PID gains.

The loop drives a commanded syringe-volume offset (position-form PID), so the
plant seen by the controller is a rate-limited actuator in front of a
quadratically damped double integrator, measured through a 1 mm depth sensor.
This script grid-searches the gains on a 0.3 m step (0.2 m -> 0.5 m) and
scores each candidate by settling time into the +/-2% band, overshoot, and
final error. The winning gains are committed to
src/morphfin/configs/default.json; tests pin the closed-loop behavior, not
the gain values.
"""

import itertools

from morphfin.cli import _environment
from morphfin.config import load_default_config
from morphfin.control import PidGains
from morphfin.experiments import run_depth_step

from dataclasses import replace


def main() -> None:
    cfg = load_default_config()
    base_env = _environment(cfg)
    candidates = itertools.product(
        (1e-4, 2e-4, 4e-4, 8e-4),  # kp: m^3 commanded per m of depth error
        (0.0, 5e-7, 1e-6, 2e-6),   # ki
        (2e-4, 5e-4, 1e-3),        # kd: m^3 per m/s
    )
    results = []
    for kp, ki, kd in candidates:
        env = replace(base_env, pid=PidGains(kp, ki, kd, 1.0, 3e-5), dt=0.01)
        records, reports = run_depth_step(
            env, [(0.0, 0.2), (5.0, 0.5)], 80.0, initial_depth=0.2
        )
        rep = next(r for r in reports if r.target == 0.5)
        final_err = abs(records[-1].depth_m - 0.5)
        results.append((kp, ki, kd, rep.settling_time, rep.overshoot_pct, final_err))
        settle = f"{rep.settling_time:6.1f}" if rep.settling_time else "  None"
        print(
            f"kp={kp:g} ki={ki:g} kd={kd:g}: settle={settle} s "
            f"overshoot={rep.overshoot_pct:5.1f}% final_err={final_err:.4f} m"
        )

    # keep a nonzero integral term for steady-state disturbance rejection;
    # settling times within ~5 s of each other are treated as equivalent and
    # broken by overshoot
    viable = [r for r in results if r[1] > 0.0 and r[3] is not None and r[4] <= 20.0]
    if not viable:
        print("\nno candidate settled within the band")
        return
    kp, ki, kd, settle, overshoot, _ = min(
        viable, key=lambda r: (round(r[3] / 5.0), r[4])
    )
    print(
        f"\nbest: kp={kp:g} ki={ki:g} kd={kd:g} "
        f"(settles in {settle:.1f} s, {overshoot:.1f}% overshoot)"
    )


if __name__ == "__main__":
    main()
