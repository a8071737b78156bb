"""Planar geometry primitives shared by the simulator and planner."""

from __future__ import annotations

import math
from dataclasses import dataclass


def wrap_angle(a: float) -> float:
    """Wrap an angle in radians to the interval (-pi, pi]."""
    if -math.pi < a <= math.pi:
        return a
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


@dataclass(frozen=True, slots=True)
class Vec2:
    """Immutable 2-D vector, doubling as a point in meters."""

    x: float
    y: float

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def scaled(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance_to(self, other: Vec2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def rotated(self, angle: float) -> Vec2:
        c, s = math.cos(angle), math.sin(angle)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


@dataclass(frozen=True, slots=True)
class Rect:
    """Axis-aligned rectangle given by its min and max corners."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def center(self) -> Vec2:
        return Vec2(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))

    def contains(self, p: Vec2, margin: float = 0.0) -> bool:
        """True when ``p`` lies inside, at least ``margin`` away from every edge."""
        return (
            self.xmin + margin <= p.x <= self.xmax - margin
            and self.ymin + margin <= p.y <= self.ymax - margin
        )

    def clamp(self, p: Vec2, margin: float = 0.0) -> Vec2:
        """Project ``p`` onto the rectangle shrunk by ``margin`` on every side."""
        x = min(max(p.x, self.xmin + margin), self.xmax - margin)
        y = min(max(p.y, self.ymin + margin), self.ymax - margin)
        return Vec2(x, y)

    def edge_distance(self, p: Vec2) -> float:
        """Distance from an interior point to the nearest edge (negative outside)."""
        return min(p.x - self.xmin, self.xmax - p.x, p.y - self.ymin, self.ymax - p.y)


@dataclass(frozen=True, slots=True)
class Obstacle:
    """Circular obstacle: a vertical cylinder seen from above."""

    center: Vec2
    radius: float


def segment_circle_intersect(
    origin: Vec2, direction: Vec2, max_len: float, obstacle: Obstacle
) -> float | None:
    """Distance along a ray segment to the first circle crossing.

    ``direction`` must be unit length.  Returns the smallest ``t`` in
    ``[0, max_len]`` with ``origin + t * direction`` on the circle, ``0.0``
    when the origin is already inside or on it, and ``None`` when the
    segment misses.
    """
    oc = origin - obstacle.center
    c = oc.dot(oc) - obstacle.radius * obstacle.radius
    if c <= 0.0:
        return 0.0
    b = oc.dot(direction)
    disc = b * b - c
    if disc < 0.0:
        return None
    t = -b - math.sqrt(disc)
    # c > 0 means the origin is outside, so a negative near root puts the
    # whole circle behind the origin.
    if t < 0.0 or t > max_len:
        return None
    return t


def point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> float:
    """Distance from point ``p`` to the closed segment ``ab``."""
    ab = b - a
    denom = ab.dot(ab)
    if denom <= 0.0:
        return p.distance_to(a)
    t = (p - a).dot(ab) / denom
    t = min(max(t, 0.0), 1.0)
    return p.distance_to(a + ab.scaled(t))
