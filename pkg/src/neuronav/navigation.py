"""Potential-field planner.

The target pulls the chair with a spring force, and every sensed obstacle
point pushes back with a short-range barrier force that grows without bound
near contact.  The resultant of the two families steers the chair: its
direction sets the turn, its magnitude scales the forward speed.  Far from
everything the pull dominates, so the chair moves; near the target both
terms fade and the chair settles.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import Vec2, wrap_angle
from .vehicle import ChairParams, Pose, WheelCommand

logger = logging.getLogger(__name__)

_FORCE_DEADBAND = 1e-4  # net forces below this mean "stay put"
_DEGENERATE_DIST = 1e-6  # hit distances below this get the fallback push


@dataclass(frozen=True, slots=True)
class FieldParams:
    """Gains and ranges of the potential field and the speed governor."""

    k_att: float = 1.0  # 1/s^2, spring pull toward the target
    f_att_max: float = 2.0  # cap on the pull magnitude
    k_rep: float = 0.25  # barrier gain
    d0: float = 1.2  # m, barrier influence range
    d_stop: float = 0.30  # m, full stop clearance
    d_slow: float = 1.00  # m, clearance where slowing begins
    v_floor: float = 0.0  # m/s, reserved minimum crawl speed
    arrive_radius: float = 0.30  # m, close enough to the target


@dataclass(frozen=True, slots=True)
class ForceBreakdown:
    """Net steering force with its parts, for display and inspection."""

    attractive: Vec2
    repulsive: tuple[tuple[int, Vec2], ...]  # per contributing sensor
    net: Vec2


def attractive_force(pose: Pose, target: Vec2, params: FieldParams) -> Vec2:
    """Spring pull toward the target, capped at ``f_att_max``."""
    f = (target - pose.position).scaled(params.k_att)
    mag = f.norm()
    if mag > params.f_att_max:
        f = f.scaled(params.f_att_max / mag)
    return f


def repulsive_force(pose: Pose, hit: Vec2, params: FieldParams) -> Vec2:
    """Barrier push away from one sensed obstacle point.

    Zero beyond the influence range ``d0``; otherwise directed from the hit
    toward the chair with magnitude ``k_rep * (1/d - 1/d0) / d^2``, capped at
    ten times the attraction cap so a single graze cannot produce a numeric
    blow-up.
    """
    away = pose.position - hit
    d = away.norm()
    if d >= params.d0:
        return Vec2(0.0, 0.0)
    f_cap = 10.0 * params.f_att_max
    if d < _DEGENERATE_DIST:
        # Hit on top of the chair center: push straight back along the
        # current heading, since the geometry gives no direction.
        logger.warning("degenerate repulsion: hit within %g m of center", _DEGENERATE_DIST)
        return Vec2(-math.cos(pose.heading), -math.sin(pose.heading)).scaled(f_cap)
    mag = params.k_rep * (1.0 / d - 1.0 / params.d0) / (d * d)
    mag = min(mag, f_cap)
    return away.scaled(mag / d)


def net_force(
    pose: Pose,
    target: Vec2,
    hits: Sequence[tuple[int, Vec2]],
    params: FieldParams,
) -> ForceBreakdown:
    """Superpose the pull and every push, keeping the parts for display."""
    att = attractive_force(pose, target, params)
    reps = []
    net = att
    for idx, point in hits:
        r = repulsive_force(pose, point, params)
        reps.append((idx, r))
        net = net + r
    return ForceBreakdown(attractive=att, repulsive=tuple(reps), net=net)


def speed_scale(min_reading: float, params: FieldParams) -> float:
    """Clearance-based speed multiplier in [0, 1].

    Zero at ``d_stop`` or less, one at ``d_slow`` or more, linear between.
    """
    if min_reading <= params.d_stop:
        return 0.0
    if min_reading >= params.d_slow:
        return 1.0
    return (min_reading - params.d_stop) / (params.d_slow - params.d_stop)


def force_to_setpoints(
    pose: Pose,
    forces: ForceBreakdown,
    scale: float,
    target: Vec2,
    params: FieldParams,
    chair: ChairParams,
) -> WheelCommand:
    """Turn the net force into body velocity setpoints.

    The turn rate tracks the bearing error to the force direction; forward
    speed follows the force magnitude, faded by heading misalignment and the
    clearance governor.  Inside the arrival radius, or when the force all
    but vanishes, both setpoints are zero.
    """
    net = forces.net
    if net.norm() < _FORCE_DEADBAND:
        return WheelCommand(0.0, 0.0)
    if pose.position.distance_to(target) <= params.arrive_radius:
        return WheelCommand(0.0, 0.0)
    err = wrap_angle(math.atan2(net.y, net.x) - pose.heading)
    w = chair.w_max * min(max(err / (math.pi / 2.0), -1.0), 1.0)
    align = max(math.cos(err), 0.0)
    v = chair.v_max * scale * align * min(net.norm() / params.f_att_max, 1.0)
    return WheelCommand(v, w)


def detect_local_minimum(
    recent: Sequence[Pose], target: Vec2, params: FieldParams, min_progress: float = 0.05
) -> bool:
    """True when the chair has stopped making progress away from the target.

    ``recent`` is a pose window spanning the watch interval; displacement
    between its ends under ``min_progress`` while still outside the arrival
    radius means the field has pinned the chair.
    """
    if len(recent) < 2:
        return False
    first, last = recent[0], recent[-1]
    if first.position.distance_to(last.position) >= min_progress:
        return False
    return last.position.distance_to(target) > params.arrive_radius


def attractive_potential(pos: Vec2, target: Vec2, params: FieldParams) -> float:
    """Quadratic well whose negative gradient is the (uncapped) pull."""
    d = pos.distance_to(target)
    return 0.5 * params.k_att * d * d


def repulsive_potential(pos: Vec2, hit: Vec2, params: FieldParams) -> float:
    """Barrier well whose negative gradient is the (uncapped) push."""
    d = pos.distance_to(hit)
    if d >= params.d0:
        return 0.0
    return 0.5 * params.k_rep * (1.0 / d - 1.0 / params.d0) ** 2
