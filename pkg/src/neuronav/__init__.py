"""Deterministic simulator and live console backend for hands-free
wheelchair navigation: potential-field autodrive over sensed obstacle
points, dual PID wheel loops on encoder feedback, and a threshold-gated
scalar intent channel that steers the navigation target.

The usual entry points:

>>> from neuronav import SessionConfig, run_session, demo_scenario
>>> rows, metrics = run_session(SessionConfig(scenario=demo_scenario()))
>>> metrics.reached_destination
True
"""

from .control import PidGains, step_response
from .geometry import Obstacle, Rect, Vec2
from .intent import IntentParams, TrainingProfile, list_profiles, load_profile, save_profile
from .navigation import FieldParams
from .plots import distance_chart, path_trace
from .records import (
    RunMetrics,
    TrajectoryRow,
    read_trajectory,
    write_metrics,
    write_trajectory,
)
from .scenarios import builtin_scenarios, demo_scenario, generate_scenario
from .sensing import SensorParams
from .session import (
    OperatorSpec,
    Session,
    SessionConfig,
    batch_run,
    run_session,
)
from .vehicle import ChairParams, Pose
from .world import (
    Mode,
    Scenario,
    ScenarioError,
    load_scenario,
    save_scenario,
    validate_scenario,
    with_seed,
)

__version__ = "0.1.0"

__all__ = [
    "ChairParams",
    "FieldParams",
    "IntentParams",
    "Mode",
    "Obstacle",
    "OperatorSpec",
    "PidGains",
    "Pose",
    "Rect",
    "RunMetrics",
    "Scenario",
    "ScenarioError",
    "SensorParams",
    "Session",
    "SessionConfig",
    "TrainingProfile",
    "TrajectoryRow",
    "Vec2",
    "batch_run",
    "builtin_scenarios",
    "demo_scenario",
    "distance_chart",
    "generate_scenario",
    "list_profiles",
    "load_profile",
    "load_scenario",
    "path_trace",
    "read_trajectory",
    "run_session",
    "save_profile",
    "save_scenario",
    "step_response",
    "validate_scenario",
    "with_seed",
    "write_metrics",
    "write_trajectory",
    "__version__",
]
