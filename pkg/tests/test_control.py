"""Tests for the PID loops and the step-response harness."""

from __future__ import annotations

import numpy as np
import pytest

from neuronav.control import (
    ControllerState,
    PidGains,
    PidState,
    StepSample,
    VelocityEstimate,
    controller_tick,
    estimate_velocity,
    overshoot,
    pid_step,
    reset,
    settling_time,
    step_response,
)
from neuronav.vehicle import ChairParams, WheelCommand

CHAIR = ChairParams()
DT = 0.02


def test_pid_step_proportional_only():
    g = PidGains(kp=2.0, ki=0.0, kd=0.0)
    corr, state = pid_step(1.0, 0.25, PidState(), DT, g)
    assert corr == pytest.approx(2.0 * 0.75)
    assert state.prev_error == 0.75
    assert state.primed


def test_pid_step_integral_accumulates_and_clamps():
    g = PidGains(kp=0.0, ki=1.0, kd=0.0, i_min=-0.1, i_max=0.1)
    state = PidState()
    for _ in range(3):
        corr, state = pid_step(1.0, 0.0, state, DT, g)
    assert state.integral == pytest.approx(0.06)
    for _ in range(500):
        _, state = pid_step(1.0, 0.0, state, DT, g)
    assert state.integral == 0.1


def test_pid_step_derivative_suppressed_first_call():
    g = PidGains(kp=0.0, ki=0.0, kd=1.0)
    corr, state = pid_step(1.0, 0.0, PidState(), DT, g)
    assert corr == 0.0
    corr, state = pid_step(1.0, 0.5, state, DT, g)
    assert corr == pytest.approx((0.5 - 1.0) / DT)


def test_pid_step_postcondition_formula():
    # correction must equal kp*e + ki*I_new + kd*(e - e_prev)/dt.
    rng = np.random.default_rng(61)
    g = PidGains(kp=0.7, ki=1.3, kd=0.05, i_min=-10, i_max=10)
    state = PidState()
    for k in range(200):
        sp = float(rng.uniform(-1, 1))
        meas = float(rng.uniform(-1, 1))
        e = sp - meas
        integral = min(max(state.integral + e * DT, g.i_min), g.i_max)
        deriv = (e - state.prev_error) / DT if state.primed else 0.0
        want = g.kp * e + g.ki * integral + g.kd * deriv
        corr, state = pid_step(sp, meas, state, DT, g)
        assert corr == pytest.approx(want, rel=1e-12)


def test_integral_clamp_under_persistent_error():
    g = PidGains(kp=0.0, ki=1.0, kd=0.0, i_min=-0.02, i_max=0.02)
    state = PidState()
    for _ in range(100_000):
        _, state = pid_step(5.0, 0.0, state, DT, g)
        assert g.i_min <= state.integral <= g.i_max
    state = PidState()
    for _ in range(100_000):
        _, state = pid_step(-5.0, 0.0, state, DT, g)
        assert g.i_min <= state.integral <= g.i_max


def test_estimate_velocity_round_trip():
    from neuronav.vehicle import EncoderState, update_encoders

    # Constant-speed motion recovered from the tick stream within one tick
    # of quantization.
    enc = EncoderState()
    v_true, w_true = 0.6, 0.5
    est_final = None
    for _ in range(100):
        new = update_encoders(enc, v_true, w_true, DT, CHAIR)
        deltas = (new.left_ticks - enc.left_ticks, new.right_ticks - enc.right_ticks)
        est_final = estimate_velocity(deltas, DT, CHAIR)
        enc = new
    tick_v = 2 * np.pi * CHAIR.wheel_radius / CHAIR.encoder_counts_per_rev / DT
    assert est_final.v == pytest.approx(v_true, abs=tick_v)
    assert est_final.w == pytest.approx(w_true, abs=2 * tick_v / CHAIR.wheel_base)


def test_estimate_velocity_zero():
    est = estimate_velocity((0, 0), DT, CHAIR)
    assert est.v == 0.0 and est.w == 0.0


def test_controller_tick_saturates_output():
    g = PidGains(kp=50.0, ki=0.0, kd=0.0)
    cmd, _ = controller_tick(
        WheelCommand(0.9, 1.0),
        VelocityEstimate(0.0, 0.0),
        ControllerState(),
        DT,
        g,
        g,
        CHAIR,
    )
    assert cmd.v == CHAIR.v_max
    assert cmd.w == CHAIR.w_max


def test_controller_tick_feedforward_passthrough():
    g = PidGains(kp=0.0, ki=0.0, kd=0.0)
    cmd, _ = controller_tick(
        WheelCommand(0.4, -0.3),
        VelocityEstimate(0.0, 0.0),
        ControllerState(),
        DT,
        g,
        g,
        CHAIR,
    )
    assert cmd.v == pytest.approx(0.4)
    assert cmd.w == pytest.approx(-0.3)


def test_reset_clears_state():
    g = PidGains(kp=1.0, ki=1.0, kd=1.0)
    state = ControllerState()
    for _ in range(10):
        _, state = controller_tick(
            WheelCommand(1.0, 1.0), VelocityEstimate(0.0, 0.0), state, DT, g, g, CHAIR
        )
    assert reset(state) == ControllerState()


def test_step_response_settles_fast_with_default_gains():
    g = PidGains()
    sv = step_response("v", 0.5, 4.0, DT, CHAIR, g)
    sw = step_response("w", 0.8, 4.0, DT, CHAIR, g)
    assert settling_time(sv) is not None and settling_time(sv) < 2.0
    assert settling_time(sw) is not None and settling_time(sw) < 2.0
    assert overshoot(sv) < 0.15
    assert overshoot(sw) < 0.15


def test_step_response_rejects_unknown_channel():
    with pytest.raises(ValueError):
        step_response("x", 0.5, 1.0, DT, CHAIR, PidGains())


def test_settling_time_none_when_never_settles():
    samples = [StepSample(time=k * DT, setpoint=1.0, measured=0.0, output=0.0)
               for k in range(1, 50)]
    assert settling_time(samples) is None
    assert settling_time([]) is None


def test_overshoot_zero_for_monotone_approach():
    samples = [
        StepSample(time=k * DT, setpoint=1.0, measured=min(k * 0.1, 1.0), output=1.0)
        for k in range(1, 30)
    ]
    assert overshoot(samples) == 0.0
    assert overshoot([]) == 0.0
