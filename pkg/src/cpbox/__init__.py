"""Pulse-level Deutsch-Jozsa and Bernstein-Vazirani on Josephson charge-qubit registers."""

from .device import ControlSegment, DeviceConfig, PulseSchedule
from .ideal import DiagonalGate, GateClass, GateKind, classify_gate, uf_gate
from .oracles import BooleanFunction, BVFunction, Classification
from .sim import RunReport, run_bv, run_dj, run_schedule

__version__ = "0.1.0"

__all__ = [
    "BVFunction",
    "BooleanFunction",
    "Classification",
    "ControlSegment",
    "DeviceConfig",
    "DiagonalGate",
    "GateClass",
    "GateKind",
    "PulseSchedule",
    "RunReport",
    "classify_gate",
    "run_bv",
    "run_dj",
    "run_schedule",
    "uf_gate",
]
