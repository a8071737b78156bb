"""Scenario description, validation, and world-state snapshots.

A scenario is the full immutable description of one simulated world: arena
bounds, obstacles, the chair's starting pose, the movable target and the
destination, plus every parameter block the subsystems need.  Scenarios
serialize to JSON documents with the same shape; parsing is strict, so a
typo in a key fails loudly with its path instead of silently acquiring a
default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

from .control import PidGains
from .geometry import Obstacle, Rect, Vec2
from .intent import IntentParams
from .navigation import FieldParams, ForceBreakdown
from .sensing import RangeScan, SensorMount, SensorParams, default_mounts
from .vehicle import ChairParams, Pose


class Mode(str, Enum):
    """Who steers: the operator's joystick or the planner."""

    MANUAL = "manual"
    AUTO_DRIVE = "autodrive"


@dataclass(frozen=True)
class Scenario:
    """Complete immutable description of one simulated world."""

    name: str = "unnamed"
    bounds: Rect = Rect(0.0, 0.0, 10.0, 10.0)
    obstacles: tuple[Obstacle, ...] = ()
    start_pose: Pose = Pose(Vec2(2.0, 2.0), 0.0)
    target: Vec2 = Vec2(2.0, 2.0)
    destination: Vec2 = Vec2(8.0, 8.0)
    chair: ChairParams = ChairParams()
    sensors: SensorParams = field(default_factory=SensorParams)
    field_params: FieldParams = FieldParams()
    pid_v: PidGains = PidGains()
    pid_w: PidGains = PidGains()
    intent: IntentParams = IntentParams()
    dt: float = 0.02
    seed: int = 0


@dataclass(frozen=True)
class WorldState:
    """One tick's full observable state, for recording and streaming."""

    tick: int
    time: float
    chair_pose: Pose
    odom_pose: Pose
    target: Vec2
    scan: RangeScan
    forces: ForceBreakdown
    mode: Mode
    power_smoothed: float
    engaged: bool
    scan_angle: float


@dataclass(frozen=True, slots=True)
class Violation:
    """One validation failure, addressed by JSON-ish field path."""

    path: str
    message: str


class ScenarioError(ValueError):
    """Scenario failed validation or parsing."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "; ".join(f"{v.path}: {v.message}" for v in violations)
        super().__init__(lines or "invalid scenario")


def clearance(position: Vec2, scenario: Scenario) -> float:
    """Smallest signed gap between the chair disc and anything solid.

    Negative means overlap.  Accounts for every obstacle and all four
    walls.
    """
    r = scenario.chair.chair_radius
    best = scenario.bounds.edge_distance(position) - r
    for obs in scenario.obstacles:
        d = position.distance_to(obs.center) - obs.radius - r
        best = min(best, d)
    return best


def validate_scenario(scenario: Scenario) -> Scenario:
    """Check every structural invariant; returns the scenario unchanged.

    Raises ScenarioError listing all violations at once, so a bad file can
    be fixed in one pass.
    """
    v: list[Violation] = []
    b = scenario.bounds
    if not (b.xmax > b.xmin and b.ymax > b.ymin):
        v.append(Violation("bounds", "min corner must lie strictly below max corner"))
    for name, val in (("dt", scenario.dt),):
        if not (val > 0.0 and math.isfinite(val)):
            v.append(Violation(name, f"must be positive and finite, got {val}"))
    for i, obs in enumerate(scenario.obstacles):
        if not (obs.radius > 0.0 and math.isfinite(obs.radius)):
            v.append(Violation(f"obstacles[{i}].radius", f"must be positive, got {obs.radius}"))
        if not obs.center.is_finite():
            v.append(Violation(f"obstacles[{i}].center", "must be finite"))

    c = scenario.chair
    for name, val in (
        ("chair.wheel_radius", c.wheel_radius),
        ("chair.wheel_base", c.wheel_base),
        ("chair.chair_radius", c.chair_radius),
        ("chair.v_max", c.v_max),
        ("chair.w_max", c.w_max),
        ("chair.accel_max", c.accel_max),
    ):
        if not (val > 0.0 and math.isfinite(val)):
            v.append(Violation(name, f"must be positive and finite, got {val}"))
    if c.encoder_counts_per_rev < 1:
        v.append(Violation("chair.encoder_counts_per_rev", "must be at least 1"))

    s = scenario.sensors
    if not s.mounts:
        v.append(Violation("sensors.mounts", "need at least one sensor"))
    if not (s.max_range > 0.0):
        v.append(Violation("sensors.max_range", f"must be positive, got {s.max_range}"))
    if s.noise_sigma < 0.0:
        v.append(Violation("sensors.noise_sigma", "must be nonnegative"))
    if s.cone_half_angle < 0.0:
        v.append(Violation("sensors.cone_half_angle", "must be nonnegative"))
    if s.window < 1:
        v.append(Violation("sensors.window", "must be at least 1"))

    f = scenario.field_params
    for name, val in (
        ("field.k_att", f.k_att),
        ("field.f_att_max", f.f_att_max),
        ("field.k_rep", f.k_rep),
        ("field.d0", f.d0),
        ("field.arrive_radius", f.arrive_radius),
    ):
        if not (val > 0.0 and math.isfinite(val)):
            v.append(Violation(name, f"must be positive and finite, got {val}"))
    if not (0.0 <= f.d_stop < f.d_slow):
        v.append(Violation("field.d_stop", "need 0 <= d_stop < d_slow"))
    if f.v_floor < 0.0:
        v.append(Violation("field.v_floor", "must be nonnegative"))

    for ch, g in (("v", scenario.pid_v), ("w", scenario.pid_w)):
        if g.kp < 0 or g.ki < 0 or g.kd < 0:
            v.append(Violation(f"pid.{ch}", "gains must be nonnegative"))
        if not g.i_min <= g.i_max:
            v.append(Violation(f"pid.{ch}", "need i_min <= i_max"))

    it = scenario.intent
    if not (0.0 < it.threshold <= 1.0):
        v.append(Violation("intent.threshold", f"must sit in (0, 1], got {it.threshold}"))
    if not (0.0 <= it.hysteresis < it.threshold):
        v.append(Violation("intent.hysteresis", "need 0 <= hysteresis < threshold"))
    if not (0.0 < it.smoothing_alpha <= 1.0):
        v.append(Violation("intent.smoothing_alpha", "must sit in (0, 1]"))
    if it.scan_rate <= 0.0:
        v.append(Violation("intent.scan_rate", "must be positive"))
    if it.target_speed <= 0.0:
        v.append(Violation("intent.target_speed", "must be positive"))

    if not isinstance(scenario.seed, int):
        v.append(Violation("seed", "must be an integer"))

    # Placement checks only make sense once the pieces above are sane.
    if not v:
        margin = c.chair_radius
        if not b.contains(scenario.start_pose.position, margin):
            v.append(Violation("start_pose", "chair disc must start inside the arena"))
        elif clearance(scenario.start_pose.position, scenario) <= 0.0:
            v.append(Violation("start_pose", "chair starts in collision"))
        if not b.contains(scenario.target):
            v.append(Violation("target", "must lie inside the arena"))
        if not b.contains(scenario.destination):
            v.append(Violation("destination", "must lie inside the arena"))
    if v:
        raise ScenarioError(v)
    return scenario


def _dict_of_vec(p: Vec2) -> dict[str, float]:
    return {"x": p.x, "y": p.y}


def scenario_to_json(scenario: Scenario) -> dict[str, Any]:
    """Plain-JSON document with the same shape the parser accepts."""
    s = scenario
    return {
        "name": s.name,
        "bounds": {
            "xmin": s.bounds.xmin, "ymin": s.bounds.ymin,
            "xmax": s.bounds.xmax, "ymax": s.bounds.ymax,
        },
        "obstacles": [
            {"center": _dict_of_vec(o.center), "radius": o.radius} for o in s.obstacles
        ],
        "start_pose": {
            "position": _dict_of_vec(s.start_pose.position),
            "heading": s.start_pose.heading,
        },
        "target": _dict_of_vec(s.target),
        "destination": _dict_of_vec(s.destination),
        "chair": {
            "wheel_radius": s.chair.wheel_radius,
            "wheel_base": s.chair.wheel_base,
            "chair_radius": s.chair.chair_radius,
            "v_max": s.chair.v_max,
            "w_max": s.chair.w_max,
            "accel_max": s.chair.accel_max,
            "encoder_counts_per_rev": s.chair.encoder_counts_per_rev,
        },
        "sensors": {
            "mounts": [
                {"offset": _dict_of_vec(m.offset), "bearing": m.bearing}
                for m in s.sensors.mounts
            ],
            "max_range": s.sensors.max_range,
            "cone_half_angle": s.sensors.cone_half_angle,
            "noise_sigma": s.sensors.noise_sigma,
            "window": s.sensors.window,
        },
        "field": {
            "k_att": s.field_params.k_att,
            "f_att_max": s.field_params.f_att_max,
            "k_rep": s.field_params.k_rep,
            "d0": s.field_params.d0,
            "d_stop": s.field_params.d_stop,
            "d_slow": s.field_params.d_slow,
            "v_floor": s.field_params.v_floor,
            "arrive_radius": s.field_params.arrive_radius,
        },
        "pid": {
            "v": _pid_doc(s.pid_v),
            "w": _pid_doc(s.pid_w),
        },
        "intent": {
            "threshold": s.intent.threshold,
            "hysteresis": s.intent.hysteresis,
            "smoothing_alpha": s.intent.smoothing_alpha,
            "scan_rate": s.intent.scan_rate,
            "target_speed": s.intent.target_speed,
        },
        "dt": s.dt,
        "seed": s.seed,
    }


def _pid_doc(g: PidGains) -> dict[str, float]:
    return {"kp": g.kp, "ki": g.ki, "kd": g.kd, "i_min": g.i_min, "i_max": g.i_max}


class _Reader:
    """Strict dict walker: typed lookups, defaults, unknown-key detection."""

    def __init__(self, doc: dict[str, Any], path: str, errors: list[Violation]):
        if not isinstance(doc, dict):
            errors.append(Violation(path or "$", f"expected an object, got {type(doc).__name__}"))
            doc = {}
        self.doc = doc
        self.path = path
        self.errors = errors
        self.seen: set[str] = set()

    def _label(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def number(self, key: str, default: float) -> float:
        self.seen.add(key)
        val = self.doc.get(key, default)
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self.errors.append(Violation(self._label(key), f"expected a number, got {val!r}"))
            return default
        return float(val)

    def integer(self, key: str, default: int) -> int:
        self.seen.add(key)
        val = self.doc.get(key, default)
        if isinstance(val, bool) or not isinstance(val, int):
            self.errors.append(Violation(self._label(key), f"expected an integer, got {val!r}"))
            return default
        return val

    def text(self, key: str, default: str) -> str:
        self.seen.add(key)
        val = self.doc.get(key, default)
        if not isinstance(val, str):
            self.errors.append(Violation(self._label(key), f"expected a string, got {val!r}"))
            return default
        return val

    def child(self, key: str) -> "_Reader | None":
        self.seen.add(key)
        if key not in self.doc:
            return None
        return _Reader(self.doc[key], self._label(key), self.errors)

    def items(self, key: str) -> list["_Reader"]:
        self.seen.add(key)
        val = self.doc.get(key, [])
        if not isinstance(val, list):
            self.errors.append(Violation(self._label(key), "expected a list"))
            return []
        return [
            _Reader(item, f"{self._label(key)}[{i}]", self.errors)
            for i, item in enumerate(val)
        ]

    def finish(self) -> None:
        for key in self.doc:
            if key not in self.seen:
                self.errors.append(Violation(self._label(key), "unknown key"))


def _read_vec(r: _Reader | None, default: Vec2) -> Vec2:
    if r is None:
        return default
    out = Vec2(r.number("x", default.x), r.number("y", default.y))
    r.finish()
    return out


def _read_pid(r: _Reader | None, default: PidGains) -> PidGains:
    if r is None:
        return default
    out = PidGains(
        kp=r.number("kp", default.kp),
        ki=r.number("ki", default.ki),
        kd=r.number("kd", default.kd),
        i_min=r.number("i_min", default.i_min),
        i_max=r.number("i_max", default.i_max),
    )
    r.finish()
    return out


def scenario_from_json(doc: dict[str, Any]) -> Scenario:
    """Parse and validate a scenario document.

    Unknown keys anywhere in the document are errors; missing sections fall
    back to defaults.  All problems are reported together.
    """
    errors: list[Violation] = []
    root = _Reader(doc, "", errors)
    defaults = Scenario()

    name = root.text("name", defaults.name)

    br = root.child("bounds")
    if br is None:
        bounds = defaults.bounds
    else:
        bounds = Rect(
            br.number("xmin", 0.0), br.number("ymin", 0.0),
            br.number("xmax", 10.0), br.number("ymax", 10.0),
        )
        br.finish()

    obstacles = []
    for orr in root.items("obstacles"):
        center = _read_vec(orr.child("center"), Vec2(0.0, 0.0))
        radius = orr.number("radius", 0.5)
        orr.finish()
        obstacles.append(Obstacle(center, radius))

    pr = root.child("start_pose")
    if pr is None:
        start_pose = defaults.start_pose
    else:
        start_pose = Pose(
            _read_vec(pr.child("position"), defaults.start_pose.position),
            pr.number("heading", defaults.start_pose.heading),
        )
        pr.finish()

    target = _read_vec(root.child("target"), defaults.target)
    destination = _read_vec(root.child("destination"), defaults.destination)

    cr = root.child("chair")
    if cr is None:
        chair = defaults.chair
    else:
        d = defaults.chair
        chair = ChairParams(
            wheel_radius=cr.number("wheel_radius", d.wheel_radius),
            wheel_base=cr.number("wheel_base", d.wheel_base),
            chair_radius=cr.number("chair_radius", d.chair_radius),
            v_max=cr.number("v_max", d.v_max),
            w_max=cr.number("w_max", d.w_max),
            accel_max=cr.number("accel_max", d.accel_max),
            encoder_counts_per_rev=cr.integer("encoder_counts_per_rev", d.encoder_counts_per_rev),
        )
        cr.finish()

    sr = root.child("sensors")
    if sr is None:
        sensors = SensorParams(mounts=default_mounts(chair.chair_radius))
    else:
        d2 = SensorParams()
        mount_readers = sr.items("mounts")
        if mount_readers:
            mounts = []
            for mr in mount_readers:
                offset = _read_vec(mr.child("offset"), Vec2(0.0, 0.0))
                bearing = mr.number("bearing", 0.0)
                mr.finish()
                mounts.append(SensorMount(offset, bearing))
            mounts_t = tuple(mounts)
        else:
            mounts_t = default_mounts(chair.chair_radius)
        sensors = SensorParams(
            mounts=mounts_t,
            max_range=sr.number("max_range", d2.max_range),
            cone_half_angle=sr.number("cone_half_angle", d2.cone_half_angle),
            noise_sigma=sr.number("noise_sigma", d2.noise_sigma),
            window=sr.integer("window", d2.window),
        )
        sr.finish()

    fr = root.child("field")
    if fr is None:
        field_params = defaults.field_params
    else:
        d3 = defaults.field_params
        field_params = FieldParams(
            k_att=fr.number("k_att", d3.k_att),
            f_att_max=fr.number("f_att_max", d3.f_att_max),
            k_rep=fr.number("k_rep", d3.k_rep),
            d0=fr.number("d0", d3.d0),
            d_stop=fr.number("d_stop", d3.d_stop),
            d_slow=fr.number("d_slow", d3.d_slow),
            v_floor=fr.number("v_floor", d3.v_floor),
            arrive_radius=fr.number("arrive_radius", d3.arrive_radius),
        )
        fr.finish()

    pid_v, pid_w = defaults.pid_v, defaults.pid_w
    pgr = root.child("pid")
    if pgr is not None:
        pid_v = _read_pid(pgr.child("v"), pid_v)
        pid_w = _read_pid(pgr.child("w"), pid_w)
        pgr.finish()

    ir = root.child("intent")
    if ir is None:
        intent = defaults.intent
    else:
        d4 = defaults.intent
        intent = IntentParams(
            threshold=ir.number("threshold", d4.threshold),
            hysteresis=ir.number("hysteresis", d4.hysteresis),
            smoothing_alpha=ir.number("smoothing_alpha", d4.smoothing_alpha),
            scan_rate=ir.number("scan_rate", d4.scan_rate),
            target_speed=ir.number("target_speed", d4.target_speed),
        )
        ir.finish()

    dt = root.number("dt", defaults.dt)
    seed = root.integer("seed", defaults.seed)
    root.finish()

    if errors:
        raise ScenarioError(errors)

    return validate_scenario(
        Scenario(
            name=name,
            bounds=bounds,
            obstacles=tuple(obstacles),
            start_pose=start_pose,
            target=target,
            destination=destination,
            chair=chair,
            sensors=sensors,
            field_params=field_params,
            pid_v=pid_v,
            pid_w=pid_w,
            intent=intent,
            dt=dt,
            seed=seed,
        )
    )


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario JSON file."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([Violation("$", f"not valid JSON: {exc}")]) from exc
    return scenario_from_json(doc)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    """Write a scenario as indented JSON."""
    Path(path).write_text(json.dumps(scenario_to_json(scenario), indent=2) + "\n")


def with_seed(scenario: Scenario, seed: int) -> Scenario:
    """Same world, different random seed."""
    return replace(scenario, seed=seed)
