"""Wire protocol between a live session and its console clients.

One JSON object per message in both directions.  The server greets with a
hello (protocol version plus the full scenario document), then streams
state snapshots; clients send commands.  Parsing enforces payload ranges
here so the engine only ever sees well-formed commands; anything else
raises :class:`ProtocolError` with a message naming the offending field.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

from .geometry import Vec2
from .world import Mode, Scenario, scenario_to_json

PROTOCOL_VERSION = 1


class ProtocolError(ValueError):
    """Malformed or out-of-range client message."""


# -- commands ----------------------------------------------------------------------


@dataclass(frozen=True)
class SetMode:
    mode: Mode


@dataclass(frozen=True)
class Joystick:
    x: float
    y: float


@dataclass(frozen=True)
class IntentPower:
    power: float


@dataclass(frozen=True)
class SetThreshold:
    value: float


@dataclass(frozen=True)
class SetTarget:
    x: float
    y: float


@dataclass(frozen=True)
class LoadScenario:
    """Either a shipped scenario by name or an inline document."""

    name: str | None = None
    document: Any = None


@dataclass(frozen=True)
class Reset:
    pass


@dataclass(frozen=True)
class ProfileSave:
    name: str


@dataclass(frozen=True)
class ProfileLoad:
    name: str


Command = Union[
    SetMode,
    Joystick,
    IntentPower,
    SetThreshold,
    SetTarget,
    LoadScenario,
    Reset,
    ProfileSave,
    ProfileLoad,
]

COMMAND_TAGS = (
    "set_mode",
    "joystick",
    "intent_power",
    "set_threshold",
    "set_target",
    "load_scenario",
    "reset",
    "profile_save",
    "profile_load",
)


def _number(obj: dict, key: str, lo: float, hi: float) -> float:
    value = obj.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProtocolError(f"{key}: expected a number")
    value = float(value)
    if not lo <= value <= hi:
        raise ProtocolError(f"{key}: {value} outside [{lo}, {hi}]")
    return value


def _name(obj: dict, key: str = "name") -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value:
        raise ProtocolError(f"{key}: expected a non-empty string")
    return value


def parse_command(obj: Any) -> Command:
    """Dict from the wire -> typed command, or :class:`ProtocolError`."""
    if not isinstance(obj, dict):
        raise ProtocolError("command must be a JSON object")
    tag = obj.get("type")
    if tag == "set_mode":
        mode = obj.get("mode")
        if mode not in (Mode.MANUAL.value, Mode.AUTO_DRIVE.value):
            raise ProtocolError(f"mode: {mode!r} is not manual or autodrive")
        return SetMode(Mode(mode))
    if tag == "joystick":
        return Joystick(
            _number(obj, "x", -1.0, 1.0), _number(obj, "y", -1.0, 1.0)
        )
    if tag == "intent_power":
        return IntentPower(_number(obj, "power", 0.0, 1.0))
    if tag == "set_threshold":
        value = _number(obj, "value", 0.0, 1.0)
        if value == 0.0:
            raise ProtocolError("value: threshold must be positive")
        return SetThreshold(value)
    if tag == "set_target":
        return SetTarget(
            _number(obj, "x", -1e6, 1e6), _number(obj, "y", -1e6, 1e6)
        )
    if tag == "load_scenario":
        name = obj.get("name")
        document = obj.get("scenario")
        if (name is None) == (document is None):
            raise ProtocolError("load_scenario needs exactly one of name, scenario")
        if name is not None and (not isinstance(name, str) or not name):
            raise ProtocolError("name: expected a non-empty string")
        if document is not None and not isinstance(document, dict):
            raise ProtocolError("scenario: expected an object")
        return LoadScenario(name=name, document=document)
    if tag == "reset":
        return Reset()
    if tag == "profile_save":
        return ProfileSave(_name(obj))
    if tag == "profile_load":
        return ProfileLoad(_name(obj))
    raise ProtocolError(f"unknown command type {tag!r}")


def encode_command(command: Command) -> dict[str, Any]:
    """Typed command -> the dict :func:`parse_command` accepts."""
    if isinstance(command, SetMode):
        return {"type": "set_mode", "mode": command.mode.value}
    if isinstance(command, Joystick):
        return {"type": "joystick", "x": command.x, "y": command.y}
    if isinstance(command, IntentPower):
        return {"type": "intent_power", "power": command.power}
    if isinstance(command, SetThreshold):
        return {"type": "set_threshold", "value": command.value}
    if isinstance(command, SetTarget):
        return {"type": "set_target", "x": command.x, "y": command.y}
    if isinstance(command, LoadScenario):
        if command.name is not None:
            return {"type": "load_scenario", "name": command.name}
        return {"type": "load_scenario", "scenario": command.document}
    if isinstance(command, Reset):
        return {"type": "reset"}
    if isinstance(command, ProfileSave):
        return {"type": "profile_save", "name": command.name}
    if isinstance(command, ProfileLoad):
        return {"type": "profile_load", "name": command.name}
    raise TypeError(f"not a command: {command!r}")


# -- server messages ---------------------------------------------------------------


def _vec(v: Vec2) -> dict[str, float]:
    return {"x": v.x, "y": v.y}


def hello_message(
    scenario: Scenario, decimation: int, strict_bci: bool
) -> dict[str, Any]:
    """First message on every connection: version and the world being run."""
    return {
        "type": "hello",
        "version": PROTOCOL_VERSION,
        "decimation": decimation,
        "strict_bci": strict_bci,
        "scenario": scenario_to_json(scenario),
    }


def error_message(message: str) -> dict[str, Any]:
    return {"type": "error", "message": message}


def state_message(session: Any) -> dict[str, Any]:
    """Snapshot of one tick, straight off the live session's public state."""
    pose = session.chair_pose
    odom = session.odom_pose
    target = session.mover.target
    dest = session.scenario.destination
    forces = session.forces
    return {
        "type": "state",
        "tick": session.tick_index,
        "time": session.sim_time,
        "status": session.status,
        "pose": {"x": pose.position.x, "y": pose.position.y, "heading": pose.heading},
        "odom": {"x": odom.position.x, "y": odom.position.y, "heading": odom.heading},
        "mode": session.mode.value,
        "power": session.power_smoothed,
        "engaged": session.mover.engaged,
        "threshold": session.intent_params.threshold,
        "target": _vec(target),
        "destination": _vec(dest),
        "forces": {
            "attractive": _vec(forces.attractive),
            "repulsive": [
                {"sensor": idx, **_vec(f)} for idx, f in forces.repulsive
            ],
            "net": _vec(forces.net),
        },
        "ranges": list(session.scan.smoothed),
        "hits": [{"sensor": idx, **_vec(p)} for idx, p in session.scan.hits],
        "dist_to_target": pose.position.distance_to(target),
        "dist_target_dest": target.distance_to(dest),
        "min_clearance": session.min_clearance,
    }
