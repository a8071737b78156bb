"""Differential-drive chair model: kinematics, wheel encoders, odometry.

The chair is a rigid body on two driven wheels.  Between control updates the
wheel speeds are constant, so the true motion over one step is a circular arc
(or a straight line when the turn rate vanishes).  Encoders quantize wheel
rotation into ticks; odometry integrates those ticks with the same arc
geometry, which is why it drifts only through quantization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Vec2, wrap_angle


@dataclass(frozen=True, slots=True)
class Pose:
    """Planar pose; heading is kept wrapped to (-pi, pi]."""

    position: Vec2
    heading: float


@dataclass(frozen=True, slots=True)
class ChairParams:
    """Physical limits and geometry of the chair."""

    wheel_radius: float = 0.17  # m
    wheel_base: float = 0.60  # m, distance between wheel contact points
    chair_radius: float = 0.45  # m, disc footprint used for collision
    v_max: float = 1.0  # m/s
    w_max: float = 1.2  # rad/s
    accel_max: float = 0.8  # m/s^2, shared linear accel limit
    encoder_counts_per_rev: int = 1024


@dataclass(frozen=True, slots=True)
class WheelCommand:
    """Body-frame velocity pair: forward speed v and turn rate w."""

    v: float
    w: float


@dataclass(frozen=True, slots=True)
class EncoderState:
    """Accumulated wheel rotation and its tick quantization."""

    left_angle: float = 0.0  # rad, continuous
    right_angle: float = 0.0
    left_ticks: int = 0
    right_ticks: int = 0


def advance_arc(pose: Pose, ds: float, dtheta: float) -> Pose:
    """Move a pose along a constant-curvature arc.

    ``ds`` is the arc length traveled by the body center and ``dtheta`` the
    heading change over the same step.  A vanishing ``dtheta`` degenerates to
    a straight segment.
    """
    if abs(dtheta) < 1e-12:
        d = Vec2(ds * math.cos(pose.heading), ds * math.sin(pose.heading))
        return Pose(pose.position + d, wrap_angle(pose.heading + dtheta))
    radius = ds / dtheta
    local = Vec2(radius * math.sin(dtheta), radius * (1.0 - math.cos(dtheta)))
    return Pose(
        pose.position + local.rotated(pose.heading),
        wrap_angle(pose.heading + dtheta),
    )


def step_kinematics(pose: Pose, v: float, w: float, dt: float) -> Pose:
    """Integrate the unicycle model exactly over one step of length ``dt``."""
    if abs(w) < 1e-9:
        d = Vec2(v * dt * math.cos(pose.heading), v * dt * math.sin(pose.heading))
        return Pose(pose.position + d, pose.heading)
    return advance_arc(pose, v * dt, w * dt)


def wheel_speeds(v: float, w: float, chair: ChairParams) -> tuple[float, float]:
    """Left and right wheel rim speeds (m/s) for a body velocity pair."""
    half = 0.5 * chair.wheel_base
    return v - w * half, v + w * half


def _ticks(angle: float, counts_per_rev: int) -> int:
    return math.floor(angle / (2.0 * math.pi / counts_per_rev))


def update_encoders(
    enc: EncoderState, v: float, w: float, dt: float, chair: ChairParams
) -> EncoderState:
    """Advance both wheel encoders for one step at constant body velocity."""
    left_v, right_v = wheel_speeds(v, w, chair)
    left_angle = enc.left_angle + left_v * dt / chair.wheel_radius
    right_angle = enc.right_angle + right_v * dt / chair.wheel_radius
    cpr = chair.encoder_counts_per_rev
    return EncoderState(
        left_angle=left_angle,
        right_angle=right_angle,
        left_ticks=_ticks(left_angle, cpr),
        right_ticks=_ticks(right_angle, cpr),
    )


def odometry_update(
    pose: Pose, tick_deltas: tuple[int, int], chair: ChairParams
) -> Pose:
    """Dead-reckon one step from encoder tick deltas ``(left, right)``."""
    meters_per_tick = 2.0 * math.pi * chair.wheel_radius / chair.encoder_counts_per_rev
    ds_left = tick_deltas[0] * meters_per_tick
    ds_right = tick_deltas[1] * meters_per_tick
    ds = 0.5 * (ds_left + ds_right)
    dtheta = (ds_right - ds_left) / chair.wheel_base
    return advance_arc(pose, ds, dtheta)


def _toward(value: float, goal: float, max_step: float) -> float:
    if goal > value:
        return min(goal, value + max_step)
    return max(goal, value - max_step)


def apply_command(
    current: WheelCommand, requested: WheelCommand, dt: float, chair: ChairParams
) -> WheelCommand:
    """Rate-limit and saturate a requested velocity pair.

    Linear speed may change by at most ``accel_max * dt`` per step.  The turn
    rate limit follows from applying the same linear acceleration bound to
    both wheel rims in opposition.
    """
    dv = chair.accel_max * dt
    dw = 2.0 * chair.accel_max / chair.wheel_base * dt
    v = _toward(current.v, requested.v, dv)
    w = _toward(current.w, requested.w, dw)
    v = min(max(v, -chair.v_max), chair.v_max)
    w = min(max(w, -chair.w_max), chair.w_max)
    return WheelCommand(v, w)
