"""Fixed-step session engine: ties sensing, intent, planning, and control
into one deterministic 50 Hz loop.

Every tick runs the same eight stages in the same order: sense and smooth,
project hits, advance the intent channel and the target mover, plan (or
pass the joystick through), close the velocity loops, integrate the plant,
record, and evaluate the end conditions.  Two seeded random streams (one
for sensor noise, one for the operator) make whole runs bit-reproducible.
"""

from __future__ import annotations

import json
import math
import statistics
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from .control import ControllerState, controller_tick, estimate_velocity
from .geometry import Vec2
from .intent import (
    IntentParams,
    IntentSample,
    MoverState,
    TrainingProfile,
    level_switch,
    mover_tick,
    smooth_power,
)
from .navigation import (
    ForceBreakdown,
    detect_local_minimum,
    force_to_setpoints,
    net_force,
    speed_scale,
)
from .operators import (
    ExternalOperator,
    OperatorView,
    ScriptedOperator,
    ideal_operator,
    stochastic_operator,
)
from .records import RunMetrics, TrajectoryRow, metrics_json, write_metrics, write_trajectory
from .sensing import RangeScan, measure, moving_average, to_world_hits
from .vehicle import (
    EncoderState,
    Pose,
    WheelCommand,
    apply_command,
    odometry_update,
    step_kinematics,
    update_encoders,
)
from .world import Mode, Scenario, clearance, validate_scenario

ARRIVE_EPS = 0.05  # m, target counts as delivered within this of destination
MIN_PROGRESS_WINDOW_S = 5.0  # s, how long the chair may stand still before halting


@dataclass(frozen=True)
class OperatorSpec:
    """Which operator runs the intent channel, in picklable form."""

    kind: str = "ideal"  # ideal | stochastic | scripted | external
    table: tuple[tuple[float, float], ...] = ()  # scripted only
    high: float = 0.85  # stochastic only
    low: float = 0.10
    sigma: float = 0.08

    def build(self):
        if self.kind == "ideal":
            return ideal_operator()
        if self.kind == "stochastic":
            return stochastic_operator(self.high, self.low, self.sigma)
        if self.kind == "scripted":
            return ScriptedOperator(self.table)
        if self.kind == "external":
            return ExternalOperator()
        raise ValueError(f"unknown operator kind {self.kind!r}")


@dataclass(frozen=True)
class SessionConfig:
    """Everything a run needs; immutable and safe to ship across processes."""

    scenario: Scenario
    operator: OperatorSpec = OperatorSpec()
    duration_max: float = 120.0
    mode: Mode = Mode.AUTO_DRIVE
    record_every: int = 1


class CommandRejected(ValueError):
    """A live command was valid JSON but cannot apply to this session."""


class Session:
    """One running simulation.

    Public attributes are the live state the gateway streams; the mutating
    ``set_*`` methods are the only sanctioned way commands reach the loop,
    and they must be called between ticks.
    """

    def __init__(self, config: SessionConfig):
        validate_scenario(config.scenario)
        if config.record_every < 1:
            raise ValueError("record_every must be at least 1")
        self.config = config
        self.scenario = config.scenario
        self.dt = config.scenario.dt
        self.mode = config.mode
        self.operator = config.operator.build()
        self.intent_params: IntentParams = config.scenario.intent

        seed = config.scenario.seed
        self._rng_sense = np.random.default_rng([seed, 0])
        self._rng_intent = np.random.default_rng([seed, 1])

        self.tick_index = 0
        self.sim_time = 0.0
        self.status = "running"
        self.chair_pose: Pose = config.scenario.start_pose
        self.odom_pose: Pose = config.scenario.start_pose
        self.command = WheelCommand(0.0, 0.0)
        self.setpoints = WheelCommand(0.0, 0.0)
        self.encoders = EncoderState()
        self.controller = ControllerState()
        self.mover = MoverState(target=config.scenario.target)
        self.power_raw = 0.0
        self.power_smoothed = 0.0
        self.joystick = (0.0, 0.0)
        self.scan: RangeScan = RangeScan((), (), ())
        self.forces: ForceBreakdown = ForceBreakdown(Vec2(0, 0), (), Vec2(0, 0))
        self.min_clearance = clearance(self.chair_pose.position, self.scenario)

        self._history: deque[tuple[float, ...]] = deque(
            maxlen=max(config.scenario.sensors.window - 1, 0)
        )
        self._tick_deltas = (0, 0)
        window_ticks = int(round(MIN_PROGRESS_WINDOW_S / self.dt)) + 1
        self._pose_window: deque[Pose] = deque(maxlen=window_ticks)
        self._max_ticks = max(int(math.ceil(config.duration_max / self.dt)), 1)

        self._path_length = 0.0
        self._min_clearance_overall = self.min_clearance
        self._time_to_target: float | None = None
        self._time_to_destination: float | None = None
        self.rows: list[TrajectoryRow] = []

    # -- live command surface -------------------------------------------------

    def set_mode(self, mode: Mode) -> None:
        self.mode = mode
        if mode is Mode.MANUAL:
            self._pose_window.clear()

    def set_joystick(self, x: float, y: float) -> None:
        self.joystick = (min(max(x, -1.0), 1.0), min(max(y, -1.0), 1.0))

    def push_power(self, power: float) -> None:
        if not isinstance(self.operator, ExternalOperator):
            raise CommandRejected("intent_power needs an external operator session")
        self.operator.push(power)

    def set_threshold(self, value: float) -> None:
        if not 0.0 < value <= 1.0:
            raise CommandRejected(f"threshold {value} outside (0, 1]")
        if value <= self.intent_params.hysteresis:
            raise CommandRejected(
                f"threshold {value} must exceed hysteresis {self.intent_params.hysteresis}"
            )
        self.intent_params = replace(self.intent_params, threshold=value)

    def set_target(self, target: Vec2) -> None:
        if not self.scenario.bounds.contains(target):
            raise CommandRejected("target outside the arena")
        self.mover = replace(self.mover, target=target)

    def apply_profile(self, profile: TrainingProfile) -> None:
        self.intent_params = profile.apply(self.intent_params)
        if isinstance(self.operator, ExternalOperator):
            self.operator.gain = profile.calibration_gain

    # -- the loop --------------------------------------------------------------

    def tick(self) -> TrajectoryRow:
        """Advance one step; returns the row recorded for this tick."""
        scenario = self.scenario
        dt = self.dt

        # (1) sense and smooth
        raw = measure(
            self.chair_pose, scenario.obstacles, scenario.bounds, scenario.sensors,
            self._rng_sense,
        )
        smoothed = moving_average(self._history, raw, scenario.sensors.window)
        self._history.append(raw)

        # (2) world-frame hit points
        hits = to_world_hits(self.chair_pose, smoothed, scenario.sensors)
        self.scan = RangeScan(raw=raw, smoothed=smoothed, hits=hits)

        # (3) intent channel, then the target mover
        view = OperatorView(
            time=self.sim_time,
            dt=dt,
            power_smoothed=self.power_smoothed,
            engaged=self.mover.engaged,
            scan_angle=self.mover.scan_angle,
            target=self.mover.target,
            destination=scenario.destination,
            params=self.intent_params,
        )
        self.power_raw = min(max(self.operator.decide(view, self._rng_intent), 0.0), 1.0)
        self.power_smoothed = smooth_power(
            self.power_smoothed,
            IntentSample(self.sim_time, self.power_raw),
            self.intent_params.smoothing_alpha,
        )
        engaged = level_switch(self.mover.engaged, self.power_smoothed, self.intent_params)
        self.mover = mover_tick(self.mover, engaged, dt, self.intent_params, scenario.bounds)

        # (4) plan, or pass the joystick through the same safety governor
        scale = speed_scale(min(smoothed), scenario.field_params)
        self.forces = net_force(
            self.chair_pose, self.mover.target, hits, scenario.field_params
        )
        if self.mode is Mode.AUTO_DRIVE:
            self.setpoints = force_to_setpoints(
                self.chair_pose, self.forces, scale, self.mover.target,
                scenario.field_params, scenario.chair,
            )
        else:
            jx, jy = self.joystick
            self.setpoints = WheelCommand(
                jy * scenario.chair.v_max * scale, -jx * scenario.chair.w_max
            )

        # (5) close the velocity loops on encoder feedback
        measured = estimate_velocity(self._tick_deltas, dt, scenario.chair)
        if (
            self.setpoints.v == 0.0
            and self.setpoints.w == 0.0
            and measured.v == 0.0
            and measured.w == 0.0
        ):
            # Parking brake: commanded stop and no measurable wheel motion.
            # Without this the integrator residual plus tick-quantized
            # feedback leaves a millimeters-per-second limit cycle forever.
            actuation = WheelCommand(0.0, 0.0)
            self.controller = ControllerState()
        else:
            actuation, self.controller = controller_tick(
                self.setpoints, measured, self.controller, dt,
                scenario.pid_v, scenario.pid_w, scenario.chair,
            )

        # (6) drive and integrate the plant
        prev_pose = self.chair_pose
        self.command = apply_command(self.command, actuation, dt, scenario.chair)
        self.chair_pose = step_kinematics(self.chair_pose, self.command.v, self.command.w, dt)
        new_enc = update_encoders(self.encoders, self.command.v, self.command.w, dt, scenario.chair)
        self._tick_deltas = (
            new_enc.left_ticks - self.encoders.left_ticks,
            new_enc.right_ticks - self.encoders.right_ticks,
        )
        self.encoders = new_enc
        self.odom_pose = odometry_update(self.odom_pose, self._tick_deltas, scenario.chair)

        # (7) record
        self.tick_index += 1
        self.sim_time = self.tick_index * dt
        self.min_clearance = clearance(self.chair_pose.position, scenario)
        self._min_clearance_overall = min(self._min_clearance_overall, self.min_clearance)
        self._path_length += prev_pose.position.distance_to(self.chair_pose.position)
        row = self._make_row()
        # Entrapment evidence accumulates only while the planner is being
        # asked to move; ticks spent parked at the target (or under manual
        # control) say nothing about force traps.
        if (
            self.mode is Mode.AUTO_DRIVE
            and row.dist_to_target > scenario.field_params.arrive_radius
        ):
            self._pose_window.append(self.chair_pose)
        else:
            self._pose_window.clear()
        if self.tick_index % self.config.record_every == 0:
            self.rows.append(row)

        # (8) end conditions
        dist_to_target = row.dist_to_target
        dist_target_dest = row.dist_target_dest
        if self._time_to_target is None and dist_to_target <= scenario.field_params.arrive_radius:
            self._time_to_target = self.sim_time
        if self.min_clearance < 0.0:
            self.status = "collision"
        elif (
            dist_target_dest <= ARRIVE_EPS
            and dist_to_target <= scenario.field_params.arrive_radius
        ):
            self.status = "reached"
            self._time_to_destination = self.sim_time
        elif (
            self.mode is Mode.AUTO_DRIVE
            and len(self._pose_window) == self._pose_window.maxlen
            and detect_local_minimum(
                self._pose_window, self.mover.target, scenario.field_params
            )
        ):
            self.status = "local_minimum"
        elif self.tick_index >= self._max_ticks:
            self.status = "timeout"
        if self.status != "running" and (not self.rows or self.rows[-1] is not row):
            self.rows.append(row)  # terminal tick always lands in the record
        return row

    def _make_row(self) -> TrajectoryRow:
        target = self.mover.target
        return TrajectoryRow(
            tick=self.tick_index,
            time=self.sim_time,
            x=self.chair_pose.position.x,
            y=self.chair_pose.position.y,
            heading=self.chair_pose.heading,
            odom_x=self.odom_pose.position.x,
            odom_y=self.odom_pose.position.y,
            odom_heading=self.odom_pose.heading,
            v_set=self.setpoints.v,
            w_set=self.setpoints.w,
            v_act=self.command.v,
            w_act=self.command.w,
            ranges=self.scan.smoothed,
            power=self.power_smoothed,
            engaged=self.mover.engaged,
            target_x=target.x,
            target_y=target.y,
            dist_to_target=self.chair_pose.position.distance_to(target),
            dist_target_dest=target.distance_to(self.scenario.destination),
            min_clearance=self.min_clearance,
        )

    def run(self) -> tuple[list[TrajectoryRow], RunMetrics]:
        """Tick until an end condition; returns the record and its metrics."""
        while self.status == "running":
            self.tick()
        return self.rows, self.metrics()

    def metrics(self) -> RunMetrics:
        return RunMetrics(
            reached_destination=self.status == "reached",
            time_to_destination=self._time_to_destination,
            reached_target=self._time_to_target is not None,
            time_to_target=self._time_to_target,
            min_clearance_overall=self._min_clearance_overall,
            path_length=self._path_length,
            local_minimum_halts=1 if self.status == "local_minimum" else 0,
            status=self.status,
            ticks=self.tick_index,
            duration=self.sim_time,
            seed=self.scenario.seed,
            scenario=self.scenario.name,
        )


def run_session(config: SessionConfig) -> tuple[list[TrajectoryRow], RunMetrics]:
    """Build, run, and tear down one session."""
    return Session(config).run()


# -- batches ----------------------------------------------------------------------


def _run_indexed(args: tuple[int, SessionConfig, str | None]) -> tuple[int, RunMetrics]:
    index, config, out_dir = args
    rows, metrics = run_session(config)
    if out_dir is not None:
        run_dir = Path(out_dir) / f"run_{index:03d}"
        run_dir.mkdir(parents=True, exist_ok=True)
        write_trajectory(rows, run_dir / "trajectory.csv")
        write_metrics(metrics, run_dir / "metrics.json")
    return index, metrics


def batch_run(
    configs: list[SessionConfig],
    parallelism: int = 1,
    out_dir: str | Path | None = None,
) -> dict[str, Any]:
    """Run many sessions and aggregate their metrics.

    Each run is independent; results are keyed by index so the report is
    the same no matter how workers interleave.  A failed run (collision,
    timeout, halt) is a row in the report, never an abort.
    """
    jobs = [(i, cfg, str(out_dir) if out_dir else None) for i, cfg in enumerate(configs)]
    results: list[RunMetrics | None] = [None] * len(configs)
    if parallelism <= 1 or len(configs) <= 1:
        for job in jobs:
            i, metrics = _run_indexed(job)
            results[i] = metrics
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            for i, metrics in pool.map(_run_indexed, jobs):
                results[i] = metrics
    per_run = [metrics_json(m) for m in results if m is not None]
    times = [m.time_to_destination for m in results if m and m.reached_destination]
    successes = len(times)
    report = {
        "runs": per_run,
        "aggregate": {
            "count": len(per_run),
            "successes": successes,
            "success_rate": successes / len(per_run) if per_run else 0.0,
            "collisions": sum(1 for m in results if m and m.status == "collision"),
            "mean_time_to_destination": statistics.mean(times) if times else None,
            "sd_time_to_destination": (
                statistics.stdev(times) if len(times) >= 2 else None
            ),
            "worst_clearance": min(
                (m.min_clearance_overall for m in results if m), default=None
            ),
        },
    }
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        (Path(out_dir) / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    return report
