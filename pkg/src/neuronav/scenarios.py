"""Built-in scenarios and the random scenario generator.

The generator rejects obstacle placements that would block the straight
corridor between start and destination, so every generated world is
feasible for a planner that cannot plan around dead ends.  Hand-built
scenarios cover the demo task, an empty arena, a slalom, and a deliberate
trap that demonstrates the local-minimum failure mode.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import Obstacle, Rect, Vec2, point_segment_distance
from .vehicle import Pose
from .world import Scenario, validate_scenario

ARENA = Rect(0.0, 0.0, 10.0, 10.0)


def demo_scenario() -> Scenario:
    """Diagonal task through four scattered obstacles.

    The target starts on the chair and gets steered to the far corner; the
    obstacles sit off the straight line but close enough that the chair has
    to bend around them.
    """
    return Scenario(
        name="demo",
        bounds=ARENA,
        obstacles=(
            Obstacle(Vec2(5.2, 3.0), 0.5),
            Obstacle(Vec2(3.2, 5.6), 0.45),
            Obstacle(Vec2(7.3, 5.1), 0.5),
            Obstacle(Vec2(4.2, 6.2), 0.4),
        ),
        start_pose=Pose(Vec2(2.0, 2.0), math.pi / 4),
        target=Vec2(2.0, 2.0),
        destination=Vec2(8.0, 8.0),
    )


def open_scenario() -> Scenario:
    """Empty arena; useful as a control case."""
    return Scenario(
        name="open",
        bounds=ARENA,
        start_pose=Pose(Vec2(2.0, 2.0), 0.0),
        target=Vec2(2.0, 2.0),
        destination=Vec2(8.0, 8.0),
    )


def slalom_scenario() -> Scenario:
    """Obstacles alternating across the route, forcing repeated weaving."""
    return Scenario(
        name="slalom",
        bounds=ARENA,
        obstacles=(
            Obstacle(Vec2(2.8, 3.5), 0.5),
            Obstacle(Vec2(5.0, 6.5), 0.5),
            Obstacle(Vec2(7.2, 3.5), 0.5),
        ),
        start_pose=Pose(Vec2(1.0, 5.0), 0.0),
        target=Vec2(1.0, 5.0),
        destination=Vec2(9.0, 5.0),
    )


def trap_scenario() -> Scenario:
    """Concave pocket facing the chair: the honest failure mode.

    The attractive pull and the pocket's repulsion cancel inside the
    opening, so the run ends with a local-minimum halt instead of arrival.
    """
    pocket = []
    cx, cy = 6.0, 5.0
    for ang in np.linspace(-0.9, 0.9, 7):
        pocket.append(
            Obstacle(Vec2(cx + 1.4 * math.cos(ang), cy + 1.4 * math.sin(ang)), 0.45)
        )
    return Scenario(
        name="trap",
        bounds=ARENA,
        obstacles=tuple(pocket),
        start_pose=Pose(Vec2(2.0, 5.0), 0.0),
        target=Vec2(8.5, 5.0),
        destination=Vec2(8.5, 5.0),
    )


def generate_scenario(
    seed: int,
    arena: Rect = ARENA,
    n_obstacles: tuple[int, int] = (5, 15),
    radius_range: tuple[float, float] = (0.3, 0.8),
    corridor: float = 0.9,
    endpoint_clear: float = 1.2,
) -> Scenario:
    """Random feasibility-screened world for the avoidance suite.

    Start and destination land in opposite quadrants at least 5 m apart;
    obstacles are rejected until their surface keeps ``corridor`` meters
    away from the straight start-destination segment and
    ``endpoint_clear`` meters from both endpoints.  The target starts at
    the destination, so these runs exercise pure driving.
    """
    rng = np.random.default_rng([seed, 7])
    start = Vec2(float(rng.uniform(1.2, 3.2)), float(rng.uniform(1.2, 3.2)))
    dest = Vec2(float(rng.uniform(6.8, 8.8)), float(rng.uniform(6.8, 8.8)))
    heading = math.atan2(dest.y - start.y, dest.x - start.x) + float(
        rng.uniform(-0.4, 0.4)
    )

    count = int(rng.integers(n_obstacles[0], n_obstacles[1] + 1))
    obstacles: list[Obstacle] = []
    attempts = 0
    while len(obstacles) < count and attempts < 4000:
        attempts += 1
        r = float(rng.uniform(*radius_range))
        margin = r + 0.2
        c = Vec2(
            float(rng.uniform(arena.xmin + margin, arena.xmax - margin)),
            float(rng.uniform(arena.ymin + margin, arena.ymax - margin)),
        )
        if point_segment_distance(c, start, dest) - r < corridor:
            continue
        if c.distance_to(start) - r < endpoint_clear:
            continue
        if c.distance_to(dest) - r < endpoint_clear:
            continue
        obstacles.append(Obstacle(c, r))
    if len(obstacles) < count:
        raise RuntimeError(
            f"seed {seed}: placed only {len(obstacles)}/{count} obstacles"
        )

    return validate_scenario(
        Scenario(
            name=f"generated-{seed}",
            bounds=arena,
            obstacles=tuple(obstacles),
            start_pose=Pose(start, heading),
            target=dest,
            destination=dest,
            seed=seed,
        )
    )


def builtin_scenarios() -> dict[str, Scenario]:
    """Name -> scenario for everything shipped by hand."""
    out = {}
    for s in (demo_scenario(), open_scenario(), slalom_scenario(), trap_scenario()):
        out[s.name] = s
    return out
