"""Graph-spanning-ratio change-point detection."""

from .calibrate import CalibrationConfig, ResampleMethod, ThresholdTable, calibrate, parametric_thresholds
from .detect import (
    DetectionEvent,
    DetectionPolicy,
    OnlineDetectorState,
    PooledAlarm,
    detect_blocks,
    detect_offline,
    push,
    push_multiwindow,
    scan_window,
)
from .errors import (
    CalibrationError,
    DegenerateWindowError,
    DimensionMismatchError,
    GSRError,
    IngestError,
    NumericalFault,
    WindowSizeError,
)
from .graphkit import GraphKind, ObservationWindow, build_graph, spanning_triplet, spanning_weight
from .gsr_stats import StatKind, StatisticProfile, pooled_mu, profile, symmetric_statistics
from .manifest import TOOL_VERSION
from .theory import PowerInputs, delta_mu, delta_sigma_minus, delta_sigma_plus, min_radius

__version__ = TOOL_VERSION

# ╭──────────────────────────────────────────────────────────────╮
# │ Public API surface for importers.                            │
# ╰──────────────────────────────────────────────────────────────╯

__all__ = [
    "CalibrationConfig",
    "CalibrationError",
    "DegenerateWindowError",
    "DetectionEvent",
    "DetectionPolicy",
    "DimensionMismatchError",
    "GSRError",
    "GraphKind",
    "IngestError",
    "NumericalFault",
    "ObservationWindow",
    "OnlineDetectorState",
    "PooledAlarm",
    "PowerInputs",
    "ResampleMethod",
    "StatKind",
    "StatisticProfile",
    "ThresholdTable",
    "WindowSizeError",
    "__version__",
    "build_graph",
    "calibrate",
    "delta_mu",
    "delta_sigma_minus",
    "delta_sigma_plus",
    "detect_blocks",
    "detect_offline",
    "min_radius",
    "parametric_thresholds",
    "pooled_mu",
    "profile",
    "push",
    "push_multiwindow",
    "scan_window",
    "spanning_triplet",
    "spanning_weight",
    "symmetric_statistics",
]
