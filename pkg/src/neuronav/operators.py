"""Scripted operators that drive the intent channel closed loop.

A human steers the target by raising and dropping one power level at the
right moments.  These operators do the same from code: they watch the
sweeping direction ray, start pushing early enough that the smoothing lag
lands the engagement exactly when the ray points at the destination, hold
while the target travels, and let go early enough that the release lag does
not overshoot.  The ideal operator pushes clean 0/1 power; the stochastic
one pushes noisy levels and so jitters its timing, which is the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Vec2, wrap_angle
from .intent import (
    ExternalSource,
    IntentParams,
    IntentSample,
    ScriptedSource,
    smooth_power,
)

_MAX_LAG_TICKS = 1000  # prediction loops give up past this (degenerate params)


@dataclass(frozen=True, slots=True)
class OperatorView:
    """What an operator gets to see before choosing this tick's power."""

    time: float
    dt: float
    power_smoothed: float
    engaged: bool
    scan_angle: float
    target: Vec2
    destination: Vec2
    params: IntentParams


class ClosedLoopOperator:
    """Steers the target to the destination through the gate alone.

    ``high`` and ``low`` are the power levels it pushes; ``sigma`` adds
    Gaussian noise on top.  With ``high=1, low=0, sigma=0`` the timing
    predictions are exact and every engaged move shortens the
    target-to-destination distance.
    """

    def __init__(self, high: float = 1.0, low: float = 0.0, sigma: float = 0.0,
                 done_at: float = 0.04):
        self.high = high
        self.low = low
        self.sigma = sigma
        self.done_at = done_at
        self._committed = False  # holding high until the gate closes the loop
        self._releasing = False  # holding low until the gate lets go
        self._done = False

    def _noisy(self, base: float, rng: np.random.Generator) -> float:
        if self.sigma == 0.0:
            return base
        return float(np.clip(base + rng.normal(0.0, self.sigma), 0.0, 1.0))

    def _ticks_to_engage(self, smoothed: float, params: IntentParams) -> int:
        """EMA steps of pushing ``high`` until the switch engages.

        Replays the exact smoothing arithmetic so the count is not an
        estimate for noise-free pushes.
        """
        s = smoothed
        for n in range(1, _MAX_LAG_TICKS):
            s = smooth_power(s, IntentSample(0.0, self.high), params.smoothing_alpha)
            if s >= params.threshold:
                return n
        return _MAX_LAG_TICKS

    def _ticks_to_release(self, smoothed: float, params: IntentParams) -> int:
        """EMA steps of pushing ``low`` until the switch lets go."""
        release = params.threshold - params.hysteresis
        s = smoothed
        for n in range(_MAX_LAG_TICKS):
            if s < release:
                return n
            s = smooth_power(s, IntentSample(0.0, self.low), params.smoothing_alpha)
        return _MAX_LAG_TICKS

    def decide(self, view: OperatorView, rng: np.random.Generator) -> float:
        p = view.params
        u = p.target_speed * view.dt
        remaining = view.target.distance_to(view.destination)

        if self._done or remaining <= self.done_at:
            self._done = True
            return self._noisy(self.low, rng)

        if view.engaged:
            self._committed = False
            ray = Vec2(math.cos(view.scan_angle), math.sin(view.scan_angle))
            along = (view.destination - view.target).dot(ray)
            n_close = self._ticks_to_release(view.power_smoothed, p)
            if self._releasing or along <= (n_close + 0.5) * u:
                self._releasing = True
                return self._noisy(self.low, rng)
            return self._noisy(self.high, rng)

        self._releasing = False
        if self._committed:
            return self._noisy(self.high, rng)

        # Disengaged: wait for the sweep.  Starting to push now costs
        # n_open ticks of smoothing lag, during which the ray keeps moving;
        # commit when the predicted frozen angle lines up with the bearing
        # to the destination.
        n_open = self._ticks_to_engage(view.power_smoothed, p)
        if n_open >= _MAX_LAG_TICKS:
            return self._noisy(self.low, rng)
        step = p.scan_rate * view.dt
        frozen = wrap_angle(view.scan_angle + (n_open - 1) * step)
        bearing = math.atan2(
            view.destination.y - view.target.y, view.destination.x - view.target.x
        )
        err = wrap_angle(frozen - bearing)
        if abs(err) <= 1.01 * step:
            self._committed = True
            return self._noisy(self.high, rng)
        return self._noisy(self.low, rng)


class ScriptedOperator:
    """Plays back a fixed (time, power) table, blind to the task."""

    def __init__(self, table):
        self._source = ScriptedSource(table)

    def decide(self, view: OperatorView, rng: np.random.Generator) -> float:
        return self._source.next_power(view.time, rng)


class ExternalOperator:
    """Forwards whatever was last pushed in from outside (console, test)."""

    def __init__(self, initial: float = 0.0):
        self.source = ExternalSource(initial)
        self.gain = 1.0  # calibration gain from a loaded profile

    def push(self, power: float) -> None:
        self.source.push(power * self.gain)

    def decide(self, view: OperatorView, rng: np.random.Generator) -> float:
        return self.source.next_power(view.time, rng)


def ideal_operator() -> ClosedLoopOperator:
    """Noise-free operator with exact gate timing."""
    return ClosedLoopOperator(high=1.0, low=0.0, sigma=0.0)


def stochastic_operator(
    high: float = 0.85, low: float = 0.10, sigma: float = 0.08
) -> ClosedLoopOperator:
    """Same strategy pushed through a noisy channel."""
    return ClosedLoopOperator(high=high, low=low, sigma=sigma)
