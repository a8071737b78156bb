"""Tests for the potential-field planner."""

from __future__ import annotations

import math

import numpy as np
import pytest

from neuronav.geometry import Vec2
from neuronav.navigation import (
    FieldParams,
    ForceBreakdown,
    attractive_force,
    attractive_potential,
    detect_local_minimum,
    force_to_setpoints,
    net_force,
    repulsive_force,
    repulsive_potential,
    speed_scale,
)
from neuronav.vehicle import ChairParams, Pose

CHAIR = ChairParams()
FIELD = FieldParams()


def pose_at(x, y, heading=0.0):
    return Pose(Vec2(x, y), heading)


def test_attractive_force_points_at_target():
    f = attractive_force(pose_at(0.0, 0.0), Vec2(1.0, 0.0), FIELD)
    assert f.x == pytest.approx(FIELD.k_att * 1.0)
    assert f.y == 0.0


def test_attractive_force_capped():
    f = attractive_force(pose_at(0.0, 0.0), Vec2(100.0, 0.0), FIELD)
    assert f.norm() == pytest.approx(FIELD.f_att_max)
    # Direction preserved under the cap.
    g = attractive_force(pose_at(0.0, 0.0), Vec2(100.0, 100.0), FIELD)
    assert g.x == pytest.approx(g.y)


def test_attractive_force_zero_at_target():
    f = attractive_force(pose_at(3.0, 4.0), Vec2(3.0, 4.0), FIELD)
    assert (f.x, f.y) == (0.0, 0.0)


def test_repulsive_force_worked_example():
    params = FieldParams(k_rep=1.0, d0=2.0)
    f = repulsive_force(pose_at(0.0, 0.0), Vec2(1.0, 0.0), params)
    assert f.x == pytest.approx(-0.5, abs=1e-12)
    assert f.y == pytest.approx(0.0, abs=1e-12)


def test_repulsive_force_zero_beyond_influence():
    f = repulsive_force(pose_at(0.0, 0.0), Vec2(FIELD.d0 + 0.01, 0.0), FIELD)
    assert (f.x, f.y) == (0.0, 0.0)
    # Exactly at the boundary counts as outside.
    g = repulsive_force(pose_at(0.0, 0.0), Vec2(FIELD.d0, 0.0), FIELD)
    assert (g.x, g.y) == (0.0, 0.0)


def test_repulsive_force_capped_close_in():
    f = repulsive_force(pose_at(0.0, 0.0), Vec2(1e-4, 0.0), FIELD)
    assert f.norm() == pytest.approx(10.0 * FIELD.f_att_max)


def test_repulsive_force_degenerate_contact_pushes_backward():
    heading = 0.7
    f = repulsive_force(Pose(Vec2(2.0, 2.0), heading), Vec2(2.0, 2.0), FIELD)
    assert f.norm() == pytest.approx(10.0 * FIELD.f_att_max)
    ang = math.atan2(f.y, f.x)
    assert ang == pytest.approx(heading - math.pi, abs=1e-9)


def test_attractive_gradient_matches_finite_difference():
    # Uncapped spring force must equal -grad of the quadratic well.
    params = FieldParams(k_att=1.3, f_att_max=1e9)
    rng = np.random.default_rng(41)
    h = 1e-5
    for _ in range(300):
        pos = Vec2(*rng.uniform(-4, 4, 2))
        target = Vec2(*rng.uniform(-4, 4, 2))
        if pos.distance_to(target) < 1e-3:
            continue
        f = attractive_force(Pose(pos, 0.0), target, params)
        gx = (
            attractive_potential(Vec2(pos.x + h, pos.y), target, params)
            - attractive_potential(Vec2(pos.x - h, pos.y), target, params)
        ) / (2 * h)
        gy = (
            attractive_potential(Vec2(pos.x, pos.y + h), target, params)
            - attractive_potential(Vec2(pos.x, pos.y - h), target, params)
        ) / (2 * h)
        scale = max(f.norm(), 1e-9)
        assert abs(f.x + gx) / scale < 1e-4
        assert abs(f.y + gy) / scale < 1e-4


def test_repulsive_gradient_matches_finite_difference():
    params = FieldParams(k_rep=0.4, d0=1.5, f_att_max=1e9)
    rng = np.random.default_rng(43)
    h = 1e-5
    checked = 0
    for _ in range(400):
        hit = Vec2(*rng.uniform(-2, 2, 2))
        ang = rng.uniform(-math.pi, math.pi)
        d = float(rng.uniform(0.05, params.d0 - 1e-3))
        if abs(d - params.d0) < 1e-3 or d < 1e-3:
            continue
        pos = Vec2(hit.x + d * math.cos(ang), hit.y + d * math.sin(ang))
        f = repulsive_force(Pose(pos, 0.0), hit, params)
        if f.norm() >= 10.0 * params.f_att_max * (1 - 1e-9):
            continue  # cap engaged, gradient identity does not apply
        gx = (
            repulsive_potential(Vec2(pos.x + h, pos.y), hit, params)
            - repulsive_potential(Vec2(pos.x - h, pos.y), hit, params)
        ) / (2 * h)
        gy = (
            repulsive_potential(Vec2(pos.x, pos.y + h), hit, params)
            - repulsive_potential(Vec2(pos.x, pos.y - h), hit, params)
        ) / (2 * h)
        scale = max(f.norm(), 1e-9)
        assert abs(f.x + gx) / scale < 1e-4
        assert abs(f.y + gy) / scale < 1e-4
        checked += 1
    assert checked > 300


def test_net_force_is_exact_superposition():
    rng = np.random.default_rng(47)
    for _ in range(100):
        pose = pose_at(*rng.uniform(-3, 3, 2))
        target = Vec2(*rng.uniform(-3, 3, 2))
        hits = tuple(
            (i, Vec2(*rng.uniform(-3, 3, 2))) for i in range(int(rng.integers(0, 6)))
        )
        fb = net_force(pose, target, hits, FIELD)
        # Bit-for-bit: the same summation order must reproduce net exactly.
        acc = fb.attractive
        for _, r in fb.repulsive:
            acc = acc + r
        assert acc == fb.net
        assert len(fb.repulsive) == len(hits)
        assert [i for i, _ in fb.repulsive] == [i for i, _ in hits]


def test_speed_scale_piecewise_linear():
    assert speed_scale(FIELD.d_stop, FIELD) == 0.0
    assert speed_scale(0.0, FIELD) == 0.0
    assert speed_scale(FIELD.d_slow, FIELD) == 1.0
    assert speed_scale(10.0, FIELD) == 1.0
    mid = 0.5 * (FIELD.d_stop + FIELD.d_slow)
    assert speed_scale(mid, FIELD) == pytest.approx(0.5)
    # Monotone over the ramp.
    xs = np.linspace(FIELD.d_stop, FIELD.d_slow, 50)
    ys = [speed_scale(float(x), FIELD) for x in xs]
    assert all(b >= a for a, b in zip(ys, ys[1:]))


def force(x, y):
    return ForceBreakdown(attractive=Vec2(x, y), repulsive=(), net=Vec2(x, y))


def test_setpoints_straight_ahead_full_speed():
    cmd = force_to_setpoints(
        pose_at(0, 0, 0.0), force(5.0, 0.0), 1.0, Vec2(9.0, 0.0), FIELD, CHAIR
    )
    assert cmd.v == pytest.approx(CHAIR.v_max)
    assert cmd.w == pytest.approx(0.0)


def test_setpoints_sideways_turns_in_place():
    cmd = force_to_setpoints(
        pose_at(0, 0, 0.0), force(0.0, 5.0), 1.0, Vec2(0.0, 9.0), FIELD, CHAIR
    )
    assert cmd.w == pytest.approx(CHAIR.w_max)
    assert cmd.v == pytest.approx(0.0, abs=1e-12)


def test_setpoints_behind_clamps_turn():
    cmd = force_to_setpoints(
        pose_at(0, 0, 0.0), force(-5.0, 1e-9), 1.0, Vec2(-9.0, 0.0), FIELD, CHAIR
    )
    assert abs(cmd.w) == pytest.approx(CHAIR.w_max)
    assert cmd.v == 0.0


def test_setpoints_zero_inside_arrive_radius():
    cmd = force_to_setpoints(
        pose_at(0, 0, 0.0), force(1.0, 0.0), 1.0, Vec2(0.2, 0.0), FIELD, CHAIR
    )
    assert (cmd.v, cmd.w) == (0.0, 0.0)


def test_setpoints_zero_on_vanishing_force():
    cmd = force_to_setpoints(
        pose_at(0, 0, 0.0), force(5e-5, 5e-5), 1.0, Vec2(9.0, 9.0), FIELD, CHAIR
    )
    assert (cmd.v, cmd.w) == (0.0, 0.0)


def test_setpoints_speed_scales_with_force_and_clearance():
    weak = force_to_setpoints(
        pose_at(0, 0, 0.0), force(0.5 * FIELD.f_att_max, 0.0), 1.0,
        Vec2(9.0, 0.0), FIELD, CHAIR,
    )
    assert weak.v == pytest.approx(0.5 * CHAIR.v_max)
    half = force_to_setpoints(
        pose_at(0, 0, 0.0), force(5.0, 0.0), 0.5, Vec2(9.0, 0.0), FIELD, CHAIR
    )
    assert half.v == pytest.approx(0.5 * CHAIR.v_max)


def test_setpoints_never_exceed_limits():
    rng = np.random.default_rng(53)
    for _ in range(500):
        fx, fy = rng.uniform(-30, 30, 2)
        heading = float(rng.uniform(-math.pi, math.pi))
        scale = float(rng.uniform(0, 1))
        cmd = force_to_setpoints(
            pose_at(0, 0, heading), force(float(fx), float(fy)), scale,
            Vec2(9.0, 9.0), FIELD, CHAIR,
        )
        assert 0.0 <= cmd.v <= CHAIR.v_max + 1e-12
        assert abs(cmd.w) <= CHAIR.w_max + 1e-12


def test_local_minimum_detector():
    target = Vec2(9.0, 9.0)
    still = [pose_at(1.0 + 0.001 * k, 1.0) for k in range(20)]
    assert detect_local_minimum(still, target, FIELD)
    moving = [pose_at(1.0 + 0.05 * k, 1.0) for k in range(20)]
    assert not detect_local_minimum(moving, target, FIELD)
    # Parked at the target is not a trap.
    arrived = [pose_at(9.0, 9.0) for _ in range(20)]
    assert not detect_local_minimum(arrived, target, FIELD)
    assert not detect_local_minimum([], target, FIELD)
    assert not detect_local_minimum([pose_at(0, 0)], target, FIELD)
