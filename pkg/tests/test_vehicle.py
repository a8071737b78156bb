"""Tests for the differential-drive model, encoders, and odometry."""

from __future__ import annotations

import math

import numpy as np
import pytest

from neuronav.geometry import Vec2
from neuronav.vehicle import (
    ChairParams,
    EncoderState,
    Pose,
    WheelCommand,
    advance_arc,
    apply_command,
    odometry_update,
    step_kinematics,
    update_encoders,
    wheel_speeds,
)

CHAIR = ChairParams()


def euler_reference(x, y, th, v, w, dt, n=1_000_000):
    """Forward-Euler unicycle integration with n substeps.

    The heading sequence is known in closed form, so the position integral
    reduces to a vectorized sum of cosines and sines.
    """
    h = dt / n
    k = np.arange(n, dtype=np.float64)
    ang = th + w * h * k
    xe = x + v * h * float(np.sum(np.cos(ang)))
    ye = y + v * h * float(np.sum(np.sin(ang)))
    return xe, ye, th + w * dt


def test_quarter_turn_worked_example():
    p = step_kinematics(Pose(Vec2(0.0, 0.0), 0.0), 1.0, math.pi / 2, 1.0)
    assert p.position.x == pytest.approx(2.0 / math.pi, abs=1e-12)
    assert p.position.y == pytest.approx(2.0 / math.pi, abs=1e-12)
    assert p.heading == pytest.approx(math.pi / 2, abs=1e-12)


def test_arc_matches_euler_reference():
    rng = np.random.default_rng(7)
    for _ in range(25):
        x, y = rng.uniform(-5, 5, 2)
        th = float(rng.uniform(-math.pi, math.pi))
        v = float(rng.uniform(-1.0, 1.0))
        w = float(rng.uniform(-1.2, 1.2))
        dt = float(rng.uniform(0.01, 0.5))
        p = step_kinematics(Pose(Vec2(x, y), th), v, w, dt)
        xe, ye, the = euler_reference(x, y, th, v, w, dt)
        assert abs(p.position.x - xe) < 1e-4
        assert abs(p.position.y - ye) < 1e-4
        assert abs(p.heading - the) < 1e-6 or abs(
            p.heading - the + 2 * math.pi
        ) < 1e-6 or abs(p.heading - the - 2 * math.pi) < 1e-6


def test_straight_line_branch_continuity():
    # The straight branch and the arc branch must agree as w -> 0.
    pose = Pose(Vec2(1.0, -2.0), 0.7)
    straight = step_kinematics(pose, 0.8, 0.0, 0.02)
    tiny = step_kinematics(pose, 0.8, 1e-8, 0.02)
    assert straight.position.distance_to(tiny.position) < 1e-9
    below = step_kinematics(pose, 0.8, 0.5e-9, 0.02)
    assert below.heading == pose.heading


def test_heading_stays_wrapped():
    pose = Pose(Vec2(0.0, 0.0), 3.0)
    for _ in range(500):
        pose = step_kinematics(pose, 0.3, 1.1, 0.05)
        assert -math.pi < pose.heading <= math.pi


def test_zero_speed_spin_in_place():
    pose = Pose(Vec2(2.0, 3.0), 0.0)
    out = step_kinematics(pose, 0.0, 1.0, 0.5)
    assert out.position == pose.position
    assert out.heading == pytest.approx(0.5)


def test_wheel_speeds_split():
    left, right = wheel_speeds(1.0, 0.5, CHAIR)
    assert left == pytest.approx(1.0 - 0.5 * 0.3)
    assert right == pytest.approx(1.0 + 0.5 * 0.3)
    left, right = wheel_speeds(0.0, 1.0, CHAIR)
    assert left == -right


def test_encoder_tick_worked_example():
    # 2.0 s at 0.5 m/s: wheel angle 1/0.17 rad, tick size 2*pi/1024.
    enc = EncoderState()
    for _ in range(100):
        enc = update_encoders(enc, 0.5, 0.0, 0.02, CHAIR)
    assert enc.left_ticks == 958
    assert enc.right_ticks == 958
    exact = math.floor((1.0 / 0.17) / (2 * math.pi / 1024))
    assert enc.left_ticks == exact


def test_encoder_ticks_monotone_forward():
    enc = EncoderState()
    rng = np.random.default_rng(3)
    prev = enc
    for _ in range(400):
        v = float(rng.uniform(0.0, 1.0))
        w = float(rng.uniform(-0.8, 0.8))
        enc = update_encoders(prev, v, w, 0.02, CHAIR)
        if v - abs(w) * CHAIR.wheel_base / 2 >= 0.0:
            assert enc.left_ticks >= prev.left_ticks
            assert enc.right_ticks >= prev.right_ticks
        prev = enc


def test_encoder_reverse_counts_down():
    enc = EncoderState()
    for _ in range(50):
        enc = update_encoders(enc, -0.5, 0.0, 0.02, CHAIR)
    assert enc.left_ticks < 0
    assert enc.right_ticks < 0


def test_odometry_tracks_true_pose():
    # Drive a wavy path; tick-quantized dead reckoning should stay close.
    rng = np.random.default_rng(19)
    true = Pose(Vec2(0.0, 0.0), 0.0)
    odom = Pose(Vec2(0.0, 0.0), 0.0)
    enc = EncoderState()
    for k in range(3000):
        v = 0.6 + 0.3 * math.sin(0.01 * k)
        w = 0.7 * math.sin(0.003 * k + 1.0)
        true = step_kinematics(true, v, w, 0.02)
        new_enc = update_encoders(enc, v, w, 0.02, CHAIR)
        deltas = (
            new_enc.left_ticks - enc.left_ticks,
            new_enc.right_ticks - enc.right_ticks,
        )
        odom = odometry_update(odom, deltas, CHAIR)
        enc = new_enc
    assert true.position.distance_to(odom.position) < 0.05


def test_odometry_zero_deltas_is_identity():
    pose = Pose(Vec2(4.0, 5.0), 1.2)
    assert odometry_update(pose, (0, 0), CHAIR) == pose


def test_advance_arc_full_circle_returns_home():
    pose = Pose(Vec2(1.0, 1.0), 0.3)
    out = advance_arc(pose, 2.0 * math.pi * 2.0, 2.0 * math.pi - 1e-12)
    assert out.position.distance_to(pose.position) < 1e-8


def test_apply_command_rate_limit_worked_example():
    out = apply_command(WheelCommand(0.0, 0.0), WheelCommand(1.0, 0.0), 0.05, CHAIR)
    assert out.v == pytest.approx(0.04)
    assert out.w == 0.0


def test_apply_command_reaches_and_holds_setpoint():
    cmd = WheelCommand(0.0, 0.0)
    for _ in range(200):
        cmd = apply_command(cmd, WheelCommand(0.5, -0.4), 0.02, CHAIR)
    assert cmd.v == pytest.approx(0.5, abs=1e-12)
    assert cmd.w == pytest.approx(-0.4, abs=1e-12)


def test_apply_command_saturates_at_limits():
    cmd = WheelCommand(0.0, 0.0)
    for _ in range(2000):
        cmd = apply_command(cmd, WheelCommand(9.0, -9.0), 0.02, CHAIR)
    assert cmd.v == CHAIR.v_max
    assert cmd.w == -CHAIR.w_max


def test_apply_command_never_overshoots_step_bound():
    rng = np.random.default_rng(5)
    cmd = WheelCommand(0.0, 0.0)
    dv = CHAIR.accel_max * 0.02
    dw = 2.0 * CHAIR.accel_max / CHAIR.wheel_base * 0.02
    for _ in range(1000):
        req = WheelCommand(float(rng.uniform(-2, 2)), float(rng.uniform(-3, 3)))
        nxt = apply_command(cmd, req, 0.02, CHAIR)
        assert abs(nxt.v - cmd.v) <= dv + 1e-15
        assert abs(nxt.w - cmd.w) <= dw + 1e-15
        assert abs(nxt.v) <= CHAIR.v_max
        assert abs(nxt.w) <= CHAIR.w_max
        cmd = nxt
