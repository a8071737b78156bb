"""Standalone SVG charts for recorded runs.

No raster or plotting dependencies: the two figures are assembled as SVG
text.  Series points are written in data coordinates inside a transform
group, so a reader can recover the plotted values exactly (floats are
emitted with repr, which round-trips).  Strokes carry
``vector-effect="non-scaling-stroke"`` to stay hairline under the scale.
"""

from __future__ import annotations

from collections.abc import Sequence

from .records import TrajectoryRow
from .world import Scenario

WIDTH = 720
HEIGHT = 420
MARGIN = 54

COLOR_PATH = "#2457a0"
COLOR_TARGET = "#1e8449"
COLOR_OBSTACLE = "#c0392b"
COLOR_AXIS = "#444444"
COLOR_GRID = "#cccccc"


def _points(xs: Sequence[float], ys: Sequence[float]) -> str:
    return " ".join(f"{x!r},{y!r}" for x, y in zip(xs, ys))


def _polyline(xs, ys, color: str, *, pid: str | None = None, dash: str | None = None) -> str:
    attrs = [
        f'points="{_points(xs, ys)}"',
        f'stroke="{color}"',
        'fill="none"',
        'stroke-width="1.5"',
        'vector-effect="non-scaling-stroke"',
    ]
    if pid:
        attrs.insert(0, f'id="{pid}"')
    if dash:
        attrs.append(f'stroke-dasharray="{dash}"')
    return f"<polyline {' '.join(attrs)}/>"


def _svg(body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    span = hi - lo
    return [lo + span * i / (n - 1) for i in range(n)]


def distance_chart(rows: Sequence[TrajectoryRow]) -> str:
    """Distance curves against time.

    The target-to-destination series carries id ``dist-target-dest`` and its
    points are the recorded column values verbatim; chair-to-target is the
    thinner dashed companion.
    """
    if not rows:
        raise ValueError("cannot plot an empty record")
    times = [r.time for r in rows]
    dest = [r.dist_target_dest for r in rows]
    chair = [r.dist_to_target for r in rows]

    t_lo, t_hi = times[0], times[-1]
    y_hi = max(max(dest), max(chair), 1e-9)
    t_span = max(t_hi - t_lo, 1e-9)
    sx = (WIDTH - 2 * MARGIN) / t_span
    sy = (HEIGHT - 2 * MARGIN) / y_hi
    tx = MARGIN - sx * t_lo
    ty = HEIGHT - MARGIN

    body = []
    for y in _ticks(0.0, y_hi):
        py = ty - sy * y
        body.append(
            f'<line x1="{MARGIN}" y1="{py:.1f}" x2="{WIDTH - MARGIN}" y2="{py:.1f}" '
            f'stroke="{COLOR_GRID}" stroke-width="0.5"/>'
        )
        body.append(
            f'<text x="{MARGIN - 6}" y="{py + 4:.1f}" text-anchor="end">{y:.2f}</text>'
        )
    for t in _ticks(t_lo, t_hi):
        px = tx + sx * t
        body.append(
            f'<text x="{px:.1f}" y="{HEIGHT - MARGIN + 18}" text-anchor="middle">{t:.1f}</text>'
        )
    body.append(
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="{COLOR_AXIS}"/>'
    )
    body.append(
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" '
        f'stroke="{COLOR_AXIS}"/>'
    )
    body.append(
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">time [s]</text>'
    )
    body.append(
        f'<text x="16" y="{HEIGHT / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {HEIGHT / 2})">distance [m]</text>'
    )
    body.append(f'<g transform="translate({tx!r} {ty!r}) scale({sx!r} {-sy!r})">')
    body.append(_polyline(times, dest, COLOR_TARGET, pid="dist-target-dest"))
    body.append(_polyline(times, chair, COLOR_PATH, pid="dist-to-target", dash="0.4 0.2"))
    body.append("</g>")
    body.append(
        f'<text x="{WIDTH - MARGIN}" y="{MARGIN - 24}" text-anchor="end" '
        f'fill="{COLOR_TARGET}">target to destination</text>'
    )
    body.append(
        f'<text x="{WIDTH - MARGIN}" y="{MARGIN - 8}" text-anchor="end" '
        f'fill="{COLOR_PATH}">chair to target</text>'
    )
    return _svg(body)


def path_trace(rows: Sequence[TrajectoryRow], scenario: Scenario) -> str:
    """Top view of the run: chair path, target path, obstacles, destination.

    One uniform scale maps arena meters to pixels (circles stay circles);
    y is flipped so north is up.
    """
    if not rows:
        raise ValueError("cannot plot an empty record")
    b = scenario.bounds
    span_x = max(b.width, 1e-9)
    span_y = max(b.height, 1e-9)
    s = min((WIDTH - 2 * MARGIN) / span_x, (HEIGHT - 2 * MARGIN) / span_y)
    tx = MARGIN - s * b.xmin + ((WIDTH - 2 * MARGIN) - s * span_x) / 2
    ty = HEIGHT - MARGIN + s * b.ymin - ((HEIGHT - 2 * MARGIN) - s * span_y) / 2

    body = [f'<g transform="translate({tx!r} {ty!r}) scale({s!r} {-s!r})">']
    body.append(
        f'<rect x="{b.xmin!r}" y="{b.ymin!r}" width="{b.width!r}" height="{b.height!r}" '
        f'fill="none" stroke="{COLOR_AXIS}" vector-effect="non-scaling-stroke"/>'
    )
    for obs in scenario.obstacles:
        body.append(
            f'<circle cx="{obs.center.x!r}" cy="{obs.center.y!r}" r="{obs.radius!r}" '
            f'fill="{COLOR_OBSTACLE}" fill-opacity="0.8"/>'
        )
    body.append(
        _polyline([r.target_x for r in rows], [r.target_y for r in rows],
                  COLOR_TARGET, pid="target-path", dash="0.15 0.1")
    )
    body.append(
        _polyline([r.x for r in rows], [r.y for r in rows], COLOR_PATH, pid="chair-path")
    )
    dest = scenario.destination
    body.append(
        f'<circle id="destination" cx="{dest.x!r}" cy="{dest.y!r}" '
        f'r="{scenario.field_params.arrive_radius!r}" fill="none" '
        f'stroke="{COLOR_TARGET}" stroke-width="2" vector-effect="non-scaling-stroke"/>'
    )
    start = rows[0]
    body.append(
        f'<circle id="start" cx="{start.x!r}" cy="{start.y!r}" r="0.08" '
        f'fill="{COLOR_PATH}"/>'
    )
    body.append("</g>")
    body.append(
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">'
        f"{scenario.name}: chair path (blue), target (green), obstacles (red)</text>"
    )
    return _svg(body)
