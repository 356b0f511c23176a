"""Confined-cylinder benchmark: boundary data, drag, wake profiles and verification runs."""
from .channel import ChannelConfig, ChannelReport, run_channel_verification
from .config import BenchConfig, ConfigError, default_schedule, load_config, parse_schedule
from .inflow import inflow_psi, inflow_psi_opq, inflow_velocity
from .problem import FlowProblem, benchmark_bcs, load_mesh
from .quantities import MissingCylinderError, drag_coefficient, wake_profile
from .run import DragResult, SweepResult, run_cylinder
from .selftest import run_selftests
from .tables import DRAG_TABLE, reference_drag

__all__ = [
    "BenchConfig", "ChannelConfig", "ChannelReport", "ConfigError", "DRAG_TABLE", "DragResult",
    "FlowProblem", "MissingCylinderError", "SweepResult", "benchmark_bcs", "default_schedule",
    "drag_coefficient", "inflow_psi", "inflow_psi_opq", "inflow_velocity", "load_config", "load_mesh",
    "parse_schedule", "reference_drag", "run_channel_verification", "run_cylinder", "run_selftests",
    "wake_profile",
]
