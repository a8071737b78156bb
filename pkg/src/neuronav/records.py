"""Run records: per-tick trajectory rows, run metrics, and their file forms."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any


@dataclass(frozen=True, slots=True)
class TrajectoryRow:
    """Everything recorded about one tick."""

    tick: int
    time: float
    x: float
    y: float
    heading: float
    odom_x: float
    odom_y: float
    odom_heading: float
    v_set: float
    w_set: float
    v_act: float
    w_act: float
    ranges: tuple[float, ...]  # smoothed, one per sensor
    power: float  # smoothed intent level
    engaged: bool
    target_x: float
    target_y: float
    dist_to_target: float
    dist_target_dest: float
    min_clearance: float


@dataclass(frozen=True, slots=True)
class RunMetrics:
    """Outcome summary of one run."""

    reached_destination: bool
    time_to_destination: float | None
    reached_target: bool
    time_to_target: float | None
    min_clearance_overall: float
    path_length: float
    local_minimum_halts: int
    status: str  # reached | timeout | collision | local_minimum | running
    ticks: int
    duration: float
    seed: int
    scenario: str


CSV_COLUMNS = (
    "tick", "time", "x", "y", "heading", "odom_x", "odom_y", "odom_heading",
    "v_set", "w_set", "v_act", "w_act",
    "range_0", "range_1", "range_2", "range_3",
    "range_4", "range_5", "range_6", "range_7",
    "power", "engaged", "target_x", "target_y",
    "dist_to_target", "dist_target_dest", "min_clearance",
)


def trajectory_csv(rows: list[TrajectoryRow]) -> str:
    """Render rows as RFC-4180 CSV text (CRLF lines, header first).

    Floats go through ``repr`` so every recorded bit survives the trip and
    two identical runs produce identical bytes.
    """
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [r.tick, repr(r.time), repr(r.x), repr(r.y), repr(r.heading),
             repr(r.odom_x), repr(r.odom_y), repr(r.odom_heading),
             repr(r.v_set), repr(r.w_set), repr(r.v_act), repr(r.w_act)]
            + [repr(v) for v in r.ranges]
            + [repr(r.power), int(r.engaged), repr(r.target_x), repr(r.target_y),
               repr(r.dist_to_target), repr(r.dist_target_dest), repr(r.min_clearance)]
        )
    return buf.getvalue()


def write_trajectory(rows: list[TrajectoryRow], path: str | Path) -> None:
    Path(path).write_text(trajectory_csv(rows), newline="")


def read_trajectory(path: str | Path) -> list[TrajectoryRow]:
    """Read a trajectory CSV back into rows, every float exactly restored."""
    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            fields: dict[str, Any] = {}
            for key, val in rec.items():
                if key.startswith("range_"):
                    continue
                if key == "tick":
                    fields[key] = int(val)
                elif key == "engaged":
                    fields[key] = bool(int(val))
                else:
                    fields[key] = float(val)
            fields["ranges"] = tuple(
                float(rec[f"range_{i}"]) for i in range(8)
            )
            out.append(TrajectoryRow(**fields))
    return out


def metrics_json(metrics: RunMetrics) -> dict[str, Any]:
    return {
        "reached_destination": metrics.reached_destination,
        "time_to_destination": metrics.time_to_destination,
        "reached_target": metrics.reached_target,
        "time_to_target": metrics.time_to_target,
        "min_clearance_overall": metrics.min_clearance_overall,
        "path_length": metrics.path_length,
        "local_minimum_halts": metrics.local_minimum_halts,
        "status": metrics.status,
        "ticks": metrics.ticks,
        "duration": metrics.duration,
        "seed": metrics.seed,
        "scenario": metrics.scenario,
    }


def write_metrics(metrics: RunMetrics, path: str | Path) -> None:
    Path(path).write_text(json.dumps(metrics_json(metrics), indent=2) + "\n")
