"""Signal-strength-ratio Sybil detection for mobile edge networks.

The library splits into a pure detection core (geometry, channel, protocol)
and a deterministic simulation harness built on top of it (mobility,
resilience, sim).  `sybilsim.cli` exposes the command-line entry points.
"""

from .channel import (
    ALPHA_MAX,
    ALPHA_MIN,
    ChannelParams,
    InvalidRssi,
    PairingMismatch,
    RssiObservation,
    ZeroDistance,
    invert_rssi,
    ratio,
    rssi,
)
from .geometry import (
    DegenerateFrame,
    InconsistentDistances,
    IntervalInputs,
    LocalFrame,
    Position,
    RatioInterval,
    distance_ratio_sq_extrema,
    euclidean_distance,
    localize,
    make_frame,
    ratio_interval_oracle,
    rssi_ratio_interval,
)
from .mobility import Rect, WaypointState, displacement_bound, initial_state, step
from .protocol import (
    ControlPacket,
    CrossEdgeReport,
    DetectionRecord,
    EvaluatorState,
    InsufficientEdges,
    MembershipRegistry,
    Verdict,
    forward_report,
    judge,
    round1_process,
    select_edge_pair,
)
from .resilience import (
    EdgeStatus,
    EdgeUnit,
    HeartbeatState,
    heartbeat_sweep,
    heartbeat_tick,
    mark_silent_failures,
    shadow_observe,
)
from .sim import (
    ConfigError,
    CycleMetrics,
    PhysicalNode,
    ReplicationResult,
    SimConfig,
    SimulationResult,
    World,
    build_world,
    compute_metrics,
    run_cycle,
    run_simulation,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # geometry
    "Position",
    "LocalFrame",
    "RatioInterval",
    "IntervalInputs",
    "DegenerateFrame",
    "InconsistentDistances",
    "euclidean_distance",
    "make_frame",
    "localize",
    "distance_ratio_sq_extrema",
    "rssi_ratio_interval",
    "ratio_interval_oracle",
    # channel
    "ChannelParams",
    "RssiObservation",
    "ZeroDistance",
    "InvalidRssi",
    "PairingMismatch",
    "ALPHA_MIN",
    "ALPHA_MAX",
    "rssi",
    "invert_rssi",
    "ratio",
    # mobility
    "Rect",
    "WaypointState",
    "initial_state",
    "step",
    "displacement_bound",
    # protocol
    "Verdict",
    "ControlPacket",
    "DetectionRecord",
    "MembershipRegistry",
    "CrossEdgeReport",
    "EvaluatorState",
    "InsufficientEdges",
    "select_edge_pair",
    "round1_process",
    "forward_report",
    "judge",
    # resilience
    "EdgeStatus",
    "EdgeUnit",
    "HeartbeatState",
    "heartbeat_tick",
    "heartbeat_sweep",
    "shadow_observe",
    "mark_silent_failures",
    # sim
    "SimConfig",
    "ConfigError",
    "PhysicalNode",
    "CycleMetrics",
    "ReplicationResult",
    "SimulationResult",
    "World",
    "build_world",
    "run_cycle",
    "run_simulation",
    "compute_metrics",
]
