"""Single-action intent channel and the scanning target mover.

The operator controls exactly one scalar: a power level in [0, 1].  An
exponential moving average smooths it, and a level switch with hysteresis
turns the smoothed level into a binary engaged flag.  While disengaged, a
direction ray sweeps around the target at a fixed rate; engaging freezes
the ray and pushes the target outward along it, so the single channel is
enough to steer anywhere.  Per-operator calibration (threshold, hysteresis,
smoothing, gain) lives in small JSON profiles that can be saved and loaded
between sessions.
"""

from __future__ import annotations

import bisect
import json
import math
import os
import re
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .geometry import Rect, Vec2, wrap_angle

_NAME_RE = re.compile(r"^[A-Za-z0-9._-]+$")


@dataclass(frozen=True, slots=True)
class IntentParams:
    """Calibration of the intent channel."""

    threshold: float = 0.60  # engage when smoothed power reaches this
    hysteresis: float = 0.10  # disengage below threshold - hysteresis
    smoothing_alpha: float = 0.20  # EMA weight on the newest sample
    scan_rate: float = 0.60  # rad/s, direction sweep while disengaged
    target_speed: float = 0.25  # m/s, target motion while engaged


@dataclass(frozen=True, slots=True)
class IntentSample:
    """One raw power reading."""

    time: float
    power: float  # [0, 1]


@dataclass(frozen=True, slots=True)
class MoverState:
    """Scanning-direction state of the movable target."""

    target: Vec2
    scan_angle: float = 0.0  # rad, world frame
    engaged: bool = False


def smooth_power(previous: float, sample: IntentSample, alpha: float) -> float:
    """Exponential moving average of the power channel."""
    return previous + alpha * (sample.power - previous)


def level_switch(engaged: bool, smoothed: float, params: IntentParams) -> bool:
    """Hysteretic on/off decision on the smoothed power.

    Engages at or above the threshold, releases strictly below
    ``threshold - hysteresis``, and holds in between.
    """
    if engaged:
        return smoothed >= params.threshold - params.hysteresis
    return smoothed >= params.threshold


def mover_tick(
    state: MoverState,
    engaged: bool,
    dt: float,
    params: IntentParams,
    bounds: Rect,
) -> MoverState:
    """Advance the scanning mover by one step.

    Disengaged: the direction ray sweeps at ``scan_rate`` and the target
    holds still.  Engaged: the ray freezes and the target slides along it at
    ``target_speed``, clamped to the arena.
    """
    if not engaged:
        return MoverState(
            target=state.target,
            scan_angle=wrap_angle(state.scan_angle + params.scan_rate * dt),
            engaged=False,
        )
    step = params.target_speed * dt
    moved = Vec2(
        state.target.x + step * math.cos(state.scan_angle),
        state.target.y + step * math.sin(state.scan_angle),
    )
    return MoverState(
        target=bounds.clamp(moved),
        scan_angle=state.scan_angle,
        engaged=True,
    )


@dataclass(frozen=True, slots=True)
class TrainingProfile:
    """Per-operator calibration persisted between sessions."""

    name: str
    threshold: float
    hysteresis: float
    smoothing_alpha: float
    calibration_gain: float = 1.0
    created_at: str = ""

    def apply(self, params: IntentParams) -> IntentParams:
        """Overlay this profile's calibration onto existing parameters."""
        return replace(
            params,
            threshold=self.threshold,
            hysteresis=self.hysteresis,
            smoothing_alpha=self.smoothing_alpha,
        )


class ProfileError(ValueError):
    """Bad profile name or malformed profile file."""


def profile_dir() -> Path:
    """Directory for stored profiles; NEURONAV_PROFILE_DIR overrides it."""
    env = os.environ.get("NEURONAV_PROFILE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".neuronav" / "profiles"


def _check_name(name: str) -> None:
    if not _NAME_RE.match(name):
        raise ProfileError(
            f"profile name {name!r} must match [A-Za-z0-9._-]+ (no path separators)"
        )


def save_profile(profile: TrainingProfile, store: Path | None = None) -> Path:
    """Write a profile as JSON, overwriting any previous one of that name."""
    _check_name(profile.name)
    base = store if store is not None else profile_dir()
    base.mkdir(parents=True, exist_ok=True)
    if not profile.created_at:
        profile = replace(
            profile, created_at=datetime.now(timezone.utc).isoformat()
        )
    path = base / f"{profile.name}.json"
    doc = {
        "name": profile.name,
        "threshold": profile.threshold,
        "hysteresis": profile.hysteresis,
        "smoothing_alpha": profile.smoothing_alpha,
        "calibration_gain": profile.calibration_gain,
        "created_at": profile.created_at,
    }
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def load_profile(name: str, store: Path | None = None) -> TrainingProfile:
    """Read a stored profile back; raises ProfileError when absent or bad."""
    _check_name(name)
    base = store if store is not None else profile_dir()
    path = base / f"{name}.json"
    if not path.exists():
        raise ProfileError(f"no profile named {name!r} in {base}")
    try:
        doc = json.loads(path.read_text())
        profile = TrainingProfile(
            name=str(doc["name"]),
            threshold=float(doc["threshold"]),
            hysteresis=float(doc["hysteresis"]),
            smoothing_alpha=float(doc["smoothing_alpha"]),
            calibration_gain=float(doc.get("calibration_gain", 1.0)),
            created_at=str(doc.get("created_at", "")),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ProfileError(f"malformed profile file {path}: {exc}") from exc
    if not 0.0 < profile.threshold <= 1.0:
        raise ProfileError(f"profile threshold {profile.threshold} outside (0, 1]")
    if not 0.0 <= profile.hysteresis < profile.threshold:
        raise ProfileError("profile hysteresis must sit in [0, threshold)")
    if not 0.0 < profile.smoothing_alpha <= 1.0:
        raise ProfileError("profile smoothing_alpha outside (0, 1]")
    return profile


def list_profiles(store: Path | None = None) -> list[str]:
    base = store if store is not None else profile_dir()
    if not base.is_dir():
        return []
    return sorted(p.stem for p in base.glob("*.json"))


class PowerSource(Protocol):
    """Anything that produces the raw power channel, one sample per tick."""

    def next_power(self, time: float, rng: np.random.Generator) -> float: ...


class ScriptedSource:
    """Replays a (time, power) table with step interpolation.

    Before the first entry the power is the first value; after the last it
    holds the last value.
    """

    def __init__(self, table: Sequence[tuple[float, float]]):
        if not table:
            raise ValueError("scripted source needs at least one (time, power) row")
        pairs = sorted((float(t), float(p)) for t, p in table)
        self._times = [t for t, _ in pairs]
        self._powers = [min(max(p, 0.0), 1.0) for _, p in pairs]

    def next_power(self, time: float, rng: np.random.Generator) -> float:
        idx = bisect.bisect_right(self._times, time) - 1
        return self._powers[max(idx, 0)]


class StochasticSource:
    """Noisy engagement windows.

    Inside any window the mean power is high; outside it is low.  Gaussian
    noise rides on top and the sample is clipped to [0, 1].
    """

    def __init__(
        self,
        windows: Sequence[tuple[float, float]],
        high: float = 0.85,
        low: float = 0.10,
        sigma: float = 0.08,
    ):
        self.windows = [(float(a), float(b)) for a, b in windows]
        self.high = high
        self.low = low
        self.sigma = sigma

    def next_power(self, time: float, rng: np.random.Generator) -> float:
        mean = self.low
        for a, b in self.windows:
            if a <= time < b:
                mean = self.high
                break
        return float(np.clip(mean + rng.normal(0.0, self.sigma), 0.0, 1.0))


class ExternalSource:
    """Latest-value register fed from outside (a console, a test, a pipe)."""

    def __init__(self, initial: float = 0.0):
        self._value = float(min(max(initial, 0.0), 1.0))

    def push(self, power: float) -> None:
        self._value = float(min(max(power, 0.0), 1.0))

    def next_power(self, time: float, rng: np.random.Generator) -> float:
        return self._value
