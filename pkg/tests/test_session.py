"""End-to-end behavior of the fixed-step session loop."""

import math
from pathlib import Path

import pytest

from neuronav.geometry import Rect, Vec2
from neuronav.records import metrics_json, trajectory_csv
from neuronav.scenarios import demo_scenario, open_scenario, trap_scenario
from neuronav.session import (
    ARRIVE_EPS,
    CommandRejected,
    OperatorSpec,
    Session,
    SessionConfig,
    batch_run,
    run_session,
)
from neuronav.vehicle import Pose
from neuronav.world import Mode, Scenario, load_scenario

ARENA = Rect(0.0, 0.0, 10.0, 10.0)

FIXTURES = Path(__file__).parent / "fixtures"


def straight_task() -> Scenario:
    """Empty arena, target parked at the destination dead ahead."""
    return Scenario(
        name="straight",
        bounds=ARENA,
        start_pose=Pose(Vec2(2.0, 2.0), 0.0),
        target=Vec2(7.0, 2.0),
        destination=Vec2(7.0, 2.0),
    )


def test_fixed_target_distance_strictly_decreases():
    rows, metrics = run_session(SessionConfig(scenario=straight_task()))
    assert metrics.status == "reached"
    assert all(b.dist_to_target < a.dist_to_target for a, b in zip(rows, rows[1:]))
    assert rows[-1].dist_to_target <= 0.3


def test_manual_zero_joystick_decays_to_rest():
    session = Session(SessionConfig(scenario=straight_task(), mode=Mode.MANUAL))
    session.set_joystick(0.0, 1.0)
    for _ in range(50):
        session.tick()
    assert session.command.v > 0.5
    session.set_joystick(0.0, 0.0)
    for _ in range(150):
        session.tick()
    assert session.command.v == 0.0
    assert session.command.w == 0.0
    frozen = session.chair_pose
    for _ in range(25):
        session.tick()
    assert session.chair_pose.position.x == frozen.position.x
    assert session.chair_pose.position.y == frozen.position.y
    assert session.chair_pose.heading == frozen.heading


def test_timeout_records_exactly_fifty_rows():
    rows, metrics = run_session(
        SessionConfig(scenario=straight_task(), duration_max=1.0)
    )
    assert metrics.status == "timeout"
    assert not metrics.reached_destination
    assert not metrics.reached_target
    assert len(rows) == 50
    for row in rows:
        assert row.time == row.tick * 0.02


def test_degenerate_task_times_match():
    """Destination equals the target's start: arrival is just driving there."""
    rows, metrics = run_session(SessionConfig(scenario=straight_task()))
    assert metrics.reached_destination
    assert metrics.time_to_destination == metrics.time_to_target


def test_same_config_same_bytes():
    cfg = SessionConfig(scenario=demo_scenario(), operator=OperatorSpec(kind="ideal"))
    rows_a, metrics_a = run_session(cfg)
    rows_b, metrics_b = run_session(cfg)
    assert trajectory_csv(rows_a) == trajectory_csv(rows_b)
    assert metrics_json(metrics_a) == metrics_json(metrics_b)


def test_record_every_keeps_terminal_row():
    rows, metrics = run_session(
        SessionConfig(scenario=straight_task(), duration_max=1.02, record_every=5)
    )
    assert metrics.status == "timeout"
    assert [r.tick for r in rows[:-1]] == [5, 10, 15, 20, 25, 30, 35, 40, 45, 50]
    assert rows[-1].tick == 51


def test_ideal_operator_delivers_target_monotonically():
    rows, metrics = run_session(
        SessionConfig(scenario=open_scenario(), operator=OperatorSpec(kind="ideal"))
    )
    assert metrics.status == "reached"
    assert rows[-1].dist_target_dest <= ARRIVE_EPS
    engaged_pairs = [
        (a, b) for a, b in zip(rows, rows[1:]) if a.engaged and b.engaged
    ]
    assert engaged_pairs
    assert all(b.dist_target_dest <= a.dist_target_dest for a, b in engaged_pairs)


def test_trap_scenario_halts_with_local_minimum():
    rows, metrics = run_session(
        SessionConfig(scenario=trap_scenario(), operator=OperatorSpec(kind="ideal"))
    )
    assert metrics.status == "local_minimum"
    assert metrics.local_minimum_halts == 1
    assert not metrics.reached_destination
    assert metrics.min_clearance_overall > 0.0


def test_manual_mode_never_halts_as_local_minimum():
    rows, metrics = run_session(
        SessionConfig(scenario=trap_scenario(), mode=Mode.MANUAL, duration_max=8.0)
    )
    assert metrics.status == "timeout"


def test_collision_fixture_aborts():
    scenario = load_scenario(FIXTURES / "collision.json")
    rows, metrics = run_session(
        SessionConfig(scenario=scenario, operator=OperatorSpec(kind="ideal"))
    )
    assert metrics.status == "collision"
    assert metrics.min_clearance_overall < 0.0
    assert not metrics.reached_destination


def test_set_target_outside_bounds_rejected():
    session = Session(SessionConfig(scenario=straight_task()))
    with pytest.raises(CommandRejected):
        session.set_target(Vec2(11.0, 5.0))
    session.set_target(Vec2(4.0, 4.0))
    assert session.mover.target == Vec2(4.0, 4.0)


def test_set_threshold_validated():
    session = Session(SessionConfig(scenario=straight_task()))
    with pytest.raises(CommandRejected):
        session.set_threshold(0.0)
    with pytest.raises(CommandRejected):
        session.set_threshold(1.5)
    with pytest.raises(CommandRejected):
        session.set_threshold(session.intent_params.hysteresis / 2)
    session.set_threshold(0.75)
    assert session.intent_params.threshold == 0.75


def test_push_power_needs_external_operator():
    session = Session(SessionConfig(scenario=straight_task()))
    with pytest.raises(CommandRejected):
        session.push_power(0.9)
    external = Session(
        SessionConfig(scenario=straight_task(), operator=OperatorSpec(kind="external"))
    )
    external.push_power(0.9)
    external.tick()
    assert external.power_raw == 0.9


def test_joystick_clamped_to_unit_box():
    session = Session(SessionConfig(scenario=straight_task(), mode=Mode.MANUAL))
    session.set_joystick(3.0, -7.0)
    assert session.joystick == (1.0, -1.0)


def test_batch_report_shape_and_determinism(tmp_path):
    configs = [
        SessionConfig(scenario=straight_task()),
        SessionConfig(scenario=open_scenario(), operator=OperatorSpec(kind="ideal")),
        SessionConfig(scenario=straight_task(), duration_max=1.0),
    ]
    serial = batch_run(configs, parallelism=1, out_dir=tmp_path / "serial")
    parallel = batch_run(configs, parallelism=2, out_dir=tmp_path / "parallel")
    assert serial == parallel
    agg = serial["aggregate"]
    assert agg["count"] == 3
    assert agg["successes"] == 2
    assert agg["success_rate"] == pytest.approx(2 / 3)
    assert agg["collisions"] == 0
    assert agg["mean_time_to_destination"] is not None
    assert agg["sd_time_to_destination"] is not None
    assert agg["worst_clearance"] is not None
    for i in range(3):
        a = (tmp_path / "serial" / f"run_{i:03d}" / "trajectory.csv").read_bytes()
        b = (tmp_path / "parallel" / f"run_{i:03d}" / "trajectory.csv").read_bytes()
        assert a == b


def test_batch_aggregate_times_only_over_successes():
    configs = [
        SessionConfig(scenario=straight_task()),
        SessionConfig(scenario=straight_task(), duration_max=1.0),
    ]
    report = batch_run(configs)
    agg = report["aggregate"]
    assert agg["successes"] == 1
    assert agg["sd_time_to_destination"] is None
    statuses = [run["status"] for run in report["runs"]]
    assert statuses == ["reached", "timeout"]
