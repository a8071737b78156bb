"""SVG chart emission: parseability and the plotting-identity contract."""

import re
import xml.etree.ElementTree as ET

import pytest

from neuronav.plots import distance_chart, path_trace
from neuronav.scenarios import demo_scenario
from neuronav.session import OperatorSpec, SessionConfig, run_session


@pytest.fixture(scope="module")
def demo_run():
    rows, metrics = run_session(
        SessionConfig(scenario=demo_scenario(), operator=OperatorSpec(kind="ideal"))
    )
    return rows, metrics


def _polyline_points(svg: str, pid: str) -> list[tuple[float, float]]:
    match = re.search(rf'<polyline id="{pid}" points="([^"]*)"', svg)
    assert match, f"polyline {pid} missing"
    return [
        (float(pair.split(",")[0]), float(pair.split(",")[1]))
        for pair in match.group(1).split()
    ]


def test_distance_chart_is_valid_xml(demo_run):
    rows, _ = demo_run
    ET.fromstring(distance_chart(rows))


def test_path_trace_is_valid_xml(demo_run):
    rows, _ = demo_run
    ET.fromstring(path_trace(rows, demo_scenario()))


def test_distance_chart_plots_the_column_verbatim(demo_run):
    rows, _ = demo_run
    points = _polyline_points(distance_chart(rows), "dist-target-dest")
    assert [p[0] for p in points] == [r.time for r in rows]
    assert [p[1] for p in points] == [r.dist_target_dest for r in rows]


def test_path_trace_plots_the_pose_columns_verbatim(demo_run):
    rows, _ = demo_run
    points = _polyline_points(path_trace(rows, demo_scenario()), "chair-path")
    assert [p[0] for p in points] == [r.x for r in rows]
    assert [p[1] for p in points] == [r.y for r in rows]


def test_path_trace_draws_every_obstacle_red(demo_run):
    rows, _ = demo_run
    scenario = demo_scenario()
    svg = path_trace(rows, scenario)
    assert svg.count('fill="#c0392b"') == len(scenario.obstacles)
    assert '<circle id="destination"' in svg
    assert 'stroke="#1e8449"' in svg


def test_empty_record_is_an_error():
    with pytest.raises(ValueError):
        distance_chart([])
    with pytest.raises(ValueError):
        path_trace([], demo_scenario())
