"""Discrete PID wheel control with encoder feedback.

Two independent loops track the forward-speed and turn-rate setpoints.  Each
one adds a correction on top of the setpoint feedforward, so a zero-gain
controller still drives the plant open loop.  Velocity feedback comes from
encoder tick deltas, which makes the measurement quantized; the integrator
handles the residual bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .vehicle import ChairParams, WheelCommand


@dataclass(frozen=True, slots=True)
class PidGains:
    """Gains and integral clamp for one loop.

    The defaults were tuned against the rate-limited drive model; the tight
    integral clamp is what keeps windup from the acceleration-limited ramp
    out of the response.  A derivative term is supported but defaults to
    zero: the encoder feedback is tick-quantized and differentiating it
    mostly amplifies that staircase.
    """

    kp: float = 0.4
    ki: float = 2.0
    kd: float = 0.0
    i_min: float = -0.02
    i_max: float = 0.02


@dataclass(frozen=True, slots=True)
class PidState:
    """Carry-over state between steps of one loop."""

    integral: float = 0.0
    prev_error: float = 0.0
    primed: bool = False  # becomes True after the first step


@dataclass(frozen=True, slots=True)
class VelocityEstimate:
    """Body velocities recovered from encoder tick deltas."""

    v: float
    w: float


def estimate_velocity(
    tick_deltas: tuple[int, int], dt: float, chair: ChairParams
) -> VelocityEstimate:
    """Body velocity over the last step implied by encoder ticks."""
    meters_per_tick = 2.0 * math.pi * chair.wheel_radius / chair.encoder_counts_per_rev
    ds_left = tick_deltas[0] * meters_per_tick
    ds_right = tick_deltas[1] * meters_per_tick
    v = 0.5 * (ds_left + ds_right) / dt
    w = (ds_right - ds_left) / (chair.wheel_base * dt)
    return VelocityEstimate(v, w)


def pid_step(
    setpoint: float,
    measured: float,
    state: PidState,
    dt: float,
    gains: PidGains,
) -> tuple[float, PidState]:
    """One controller step; returns (correction, next state).

    Derivative acts on the error and is suppressed on the first step, where
    no previous error exists.  The integrator only accumulates while inside
    its clamp band (conditional integration), which stops windup during
    saturation without ever discarding the stored integral.
    """
    error = setpoint - measured
    integral = state.integral + error * dt
    integral = min(max(integral, gains.i_min), gains.i_max)
    derivative = (error - state.prev_error) / dt if state.primed else 0.0
    correction = gains.kp * error + gains.ki * integral + gains.kd * derivative
    return correction, PidState(integral=integral, prev_error=error, primed=True)


@dataclass(frozen=True, slots=True)
class ControllerState:
    """Both loops' carry-over state."""

    v: PidState = PidState()
    w: PidState = PidState()


def controller_tick(
    setpoints: WheelCommand,
    measured: VelocityEstimate,
    state: ControllerState,
    dt: float,
    v_gains: PidGains,
    w_gains: PidGains,
    chair: ChairParams,
) -> tuple[WheelCommand, ControllerState]:
    """Run both loops and return the saturated actuation request.

    Actuation is setpoint plus correction per channel, clipped to the chair
    velocity limits before it reaches the drive.
    """
    cv, sv = pid_step(setpoints.v, measured.v, state.v, dt, v_gains)
    cw, sw = pid_step(setpoints.w, measured.w, state.w, dt, w_gains)
    v = min(max(setpoints.v + cv, -chair.v_max), chair.v_max)
    w = min(max(setpoints.w + cw, -chair.w_max), chair.w_max)
    return WheelCommand(v, w), ControllerState(v=sv, w=sw)


def reset(state: ControllerState) -> ControllerState:
    """Fresh controller state; use when the plant is re-homed or swapped."""
    return ControllerState()


@dataclass(frozen=True, slots=True)
class StepSample:
    """One row of a step-response trace."""

    time: float
    setpoint: float
    measured: float
    output: float


def step_response(
    channel: str,
    setpoint: float,
    duration: float,
    dt: float,
    chair: ChairParams,
    gains: PidGains,
) -> list[StepSample]:
    """Closed-loop step response against the rate-limited drive model.

    The drive is the real actuator model: the commanded velocity slews
    toward the controller output under the acceleration limit, and the loop
    measures that true velocity.  ``channel`` picks ``"v"`` or ``"w"``.
    """
    if channel not in ("v", "w"):
        raise ValueError(f"unknown channel {channel!r}")
    from .vehicle import apply_command

    state = PidState()
    current = WheelCommand(0.0, 0.0)
    samples = []
    steps = max(int(round(duration / dt)), 1)
    for k in range(steps):
        measured = current.v if channel == "v" else current.w
        correction, state = pid_step(setpoint, measured, state, dt, gains)
        if channel == "v":
            out = min(max(setpoint + correction, -chair.v_max), chair.v_max)
            current = apply_command(current, WheelCommand(out, 0.0), dt, chair)
            achieved = current.v
        else:
            out = min(max(setpoint + correction, -chair.w_max), chair.w_max)
            current = apply_command(current, WheelCommand(0.0, out), dt, chair)
            achieved = current.w
        samples.append(
            StepSample(time=(k + 1) * dt, setpoint=setpoint, measured=achieved, output=out)
        )
    return samples


def settling_time(samples: list[StepSample], band: float = 0.02) -> float | None:
    """First time after which the response stays within ``band`` of setpoint."""
    if not samples:
        return None
    sp = samples[-1].setpoint
    tol = band * abs(sp) if sp != 0.0 else band
    settled_at = None
    for s in samples:
        if abs(s.measured - sp) <= tol:
            if settled_at is None:
                settled_at = s.time
        else:
            settled_at = None
    return settled_at


def overshoot(samples: list[StepSample]) -> float:
    """Peak excess over the setpoint, as a fraction of it (0 when none)."""
    if not samples:
        return 0.0
    sp = samples[-1].setpoint
    if sp == 0.0:
        return 0.0
    peak = max(s.measured / sp for s in samples)
    return max(peak - 1.0, 0.0)
