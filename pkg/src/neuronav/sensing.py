"""Ultrasonic range sensing.

Eight sensors sit on the chair perimeter, four per side.  Each one sounds a
narrow cone, modeled as three rays (center and both cone edges); the reading
is the nearest return over those rays against every obstacle and the arena
walls.  Gaussian noise corrupts true returns only, and a short moving
average smooths each channel before anything downstream sees it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .geometry import Obstacle, Rect, Vec2
from .vehicle import Pose

_MIN_READING = 0.01  # m, readings never collapse to zero
_HIT_MARGIN = 1e-6  # smoothed readings this close to max range count as no-hit

# Mount bearings in degrees, symmetric about the nose, four per side.
DEFAULT_BEARINGS_DEG = (-130.0, -90.0, -50.0, -20.0, 20.0, 50.0, 90.0, 130.0)


@dataclass(frozen=True, slots=True)
class SensorMount:
    """One sensor's pose on the chair body."""

    offset: Vec2  # body frame, m
    bearing: float  # rad, relative to the chair heading


def default_mounts(chair_radius: float = 0.45) -> tuple[SensorMount, ...]:
    """Perimeter ring of eight mounts, each looking radially outward."""
    mounts = []
    for deg in DEFAULT_BEARINGS_DEG:
        b = math.radians(deg)
        mounts.append(
            SensorMount(Vec2(chair_radius * math.cos(b), chair_radius * math.sin(b)), b)
        )
    return tuple(mounts)


@dataclass(frozen=True, slots=True)
class SensorParams:
    """Array layout and noise model."""

    mounts: tuple[SensorMount, ...] = field(default_factory=default_mounts)
    max_range: float = 3.0  # m
    cone_half_angle: float = 0.13  # rad, beam spread per side
    noise_sigma: float = 0.02  # m, stddev on true returns
    window: int = 3  # moving-average length


@dataclass(frozen=True, slots=True)
class RangeScan:
    """One tick of sensor output."""

    raw: tuple[float, ...]
    smoothed: tuple[float, ...]
    hits: tuple[tuple[int, Vec2], ...]  # (sensor index, world point)


@lru_cache(maxsize=16)
def _mount_arrays(params: SensorParams) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.array([(m.offset.x, m.offset.y) for m in params.mounts])
    rel = np.array(
        [
            m.bearing + da
            for m in params.mounts
            for da in (-params.cone_half_angle, 0.0, params.cone_half_angle)
        ]
    )
    return offsets, rel


@lru_cache(maxsize=16)
def _obstacle_arrays(obstacles: tuple[Obstacle, ...]) -> tuple[np.ndarray, np.ndarray]:
    centers = np.array([(o.center.x, o.center.y) for o in obstacles]).reshape(-1, 2)
    radii = np.array([o.radius for o in obstacles])
    return centers, radii


def measure(
    pose: Pose,
    obstacles: tuple[Obstacle, ...],
    bounds: Rect,
    params: SensorParams,
    rng: np.random.Generator,
) -> tuple[float, ...]:
    """Raw readings for every sensor at the given chair pose.

    Noise is drawn once per sensor on every call (whether or not that sensor
    hit anything) so the stream of random numbers depends only on the tick
    count, never on the geometry.
    """
    n = len(params.mounts)
    offsets, rel = _mount_arrays(params)
    cos_h, sin_h = math.cos(pose.heading), math.sin(pose.heading)

    # World-frame ray origins (one per sensor, shared by its cone rays).
    ox = pose.position.x + offsets[:, 0] * cos_h - offsets[:, 1] * sin_h
    oy = pose.position.y + offsets[:, 0] * sin_h + offsets[:, 1] * cos_h
    ang = pose.heading + rel  # (3n,)
    dx, dy = np.cos(ang), np.sin(ang)
    rox, roy = np.repeat(ox, 3), np.repeat(oy, 3)

    t_best = np.full(ang.shape, np.inf)
    if obstacles:
        centers, radii = _obstacle_arrays(obstacles)
        ocx = rox[:, None] - centers[None, :, 0]
        ocy = roy[:, None] - centers[None, :, 1]
        b = ocx * dx[:, None] + ocy * dy[:, None]
        c = ocx * ocx + ocy * ocy - radii[None, :] ** 2
        disc = b * b - c
        with np.errstate(invalid="ignore"):
            t = -b - np.sqrt(disc)
        t = np.where(c <= 0.0, 0.0, t)
        t = np.where((disc >= 0.0) & (t >= 0.0), t, np.inf)
        t_best = t.min(axis=1)

    # Walls: exit distance from an axis-aligned box along each ray.
    with np.errstate(divide="ignore"):
        tx = np.where(
            dx > 0.0,
            (bounds.xmax - rox) / dx,
            np.where(dx < 0.0, (bounds.xmin - rox) / dx, np.inf),
        )
        ty = np.where(
            dy > 0.0,
            (bounds.ymax - roy) / dy,
            np.where(dy < 0.0, (bounds.ymin - roy) / dy, np.inf),
        )
    t_wall = np.maximum(np.minimum(tx, ty), 0.0)
    t_best = np.minimum(t_best, t_wall)

    per_sensor = t_best.reshape(n, 3).min(axis=1)
    noise = rng.normal(0.0, params.noise_sigma, n)
    hit = per_sensor <= params.max_range
    readings = np.where(
        hit,
        np.clip(per_sensor + noise, _MIN_READING, params.max_range),
        params.max_range,
    )
    return tuple(float(r) for r in readings)


def moving_average(
    history: Sequence[Sequence[float]], latest: Sequence[float], window: int = 3
) -> tuple[float, ...]:
    """Per-sensor mean of the last ``window`` raw scans, ending at ``latest``.

    During warm-up, when fewer scans exist than the window wants, the mean
    runs over whatever is available.
    """
    rows = (list(history) + [list(latest)])[-window:]
    out = []
    for i in range(len(latest)):
        vals = [row[i] for row in rows]
        out.append(sum(vals) / len(vals))
    return tuple(out)


def to_world_hits(
    pose: Pose, smoothed: Sequence[float], params: SensorParams
) -> tuple[tuple[int, Vec2], ...]:
    """Project smoothed returns into world points along each central bearing.

    Sensors reading at (or within a hair of) max range report nothing.
    """
    hits = []
    cos_h, sin_h = math.cos(pose.heading), math.sin(pose.heading)
    for i, dist in enumerate(smoothed):
        if dist >= params.max_range - _HIT_MARGIN:
            continue
        m = params.mounts[i]
        mx = pose.position.x + m.offset.x * cos_h - m.offset.y * sin_h
        my = pose.position.y + m.offset.x * sin_h + m.offset.y * cos_h
        a = pose.heading + m.bearing
        hits.append((i, Vec2(mx + dist * math.cos(a), my + dist * math.sin(a))))
    return tuple(hits)


def measure_reference(
    pose: Pose,
    obstacles: tuple[Obstacle, ...],
    bounds: Rect,
    params: SensorParams,
) -> tuple[float, ...]:
    """Scalar noise-free re-derivation of ``measure`` for cross-checking.

    Walks every sensor, cone ray, and obstacle one at a time with the shared
    ray-circle routine plus explicit wall crossings.
    """
    from .geometry import segment_circle_intersect

    readings = []
    cos_h, sin_h = math.cos(pose.heading), math.sin(pose.heading)
    for m in params.mounts:
        origin = Vec2(
            pose.position.x + m.offset.x * cos_h - m.offset.y * sin_h,
            pose.position.y + m.offset.x * sin_h + m.offset.y * cos_h,
        )
        best = math.inf
        for da in (-params.cone_half_angle, 0.0, params.cone_half_angle):
            a = pose.heading + m.bearing + da
            d = Vec2(math.cos(a), math.sin(a))
            for obs in obstacles:
                t = segment_circle_intersect(origin, d, params.max_range, obs)
                if t is not None:
                    best = min(best, t)
            for t_wall in _wall_crossings(origin, d, bounds):
                best = min(best, t_wall)
        if best <= params.max_range:
            readings.append(min(max(best, _MIN_READING), params.max_range))
        else:
            readings.append(params.max_range)
    return tuple(readings)


def _wall_crossings(origin: Vec2, d: Vec2, bounds: Rect) -> list[float]:
    out = []
    if d.x > 0.0:
        out.append(max((bounds.xmax - origin.x) / d.x, 0.0))
    elif d.x < 0.0:
        out.append(max((bounds.xmin - origin.x) / d.x, 0.0))
    if d.y > 0.0:
        out.append(max((bounds.ymax - origin.y) / d.y, 0.0))
    elif d.y < 0.0:
        out.append(max((bounds.ymin - origin.y) / d.y, 0.0))
    return out
