"""Scan-and-refine calibration of operation times.

A problem is a scalar objective of one free parameter on a closed interval.
``scan`` evaluates it on a uniform grid, the best interior sample and its
neighbours form a bracket, and ``refine`` polishes it by golden-section
search.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy.optimize import minimize_scalar

from . import qcore
from .compiler import TABLE_ROWS, swap_matrix, table_schedule
from .device import ControlSegment, DeviceConfig, PulseSchedule
from .errors import BadBracket
from .ideal import text_to_signs
from .sim import run_schedule

PARAM_TOL = 1e-4
MIN_GRID = 32


class Objective(str, enum.Enum):
    DJ_RESIDUAL = "DJResidual"
    STATE_INFIDELITY = "StateInfidelity"


@dataclass(frozen=True)
class CalibrationProblem:
    name: str
    evaluate: Callable[[float], float]
    bounds: tuple[float, float]
    grid_points: int = 64
    objective: Objective = Objective.DJ_RESIDUAL

    def __post_init__(self) -> None:
        lo, hi = self.bounds
        if lo > hi:
            raise ValueError(f"empty bounds {self.bounds}")
        if lo < hi and self.grid_points < MIN_GRID:
            raise ValueError(f"grid needs at least {MIN_GRID} points, got {self.grid_points}")


def schedule_problem(name: str, build: Callable[[float], PulseSchedule], device: DeviceConfig,
                     objective: Objective, bounds: tuple[float, float], *,
                     target_state: np.ndarray | None = None, grid_points: int = 64) -> CalibrationProblem:
    """Objective from a one-parameter schedule family run on the DJ input."""
    if objective is Objective.STATE_INFIDELITY and target_state is None:
        raise ValueError("StateInfidelity needs a target state")
    start = qcore.basis_state(device.n, 0)

    def evaluate(x: float) -> float:
        psi = run_schedule(device, build(float(x)), start)
        if objective is Objective.DJ_RESIDUAL:
            return float(abs(psi[0]))
        return qcore.phase_invariant_distance(target_state, psi)

    return CalibrationProblem(name, evaluate, bounds, grid_points, objective)


def scan(p: CalibrationProblem) -> list[tuple[float, float]]:
    lo, hi = p.bounds
    xs = [lo] if lo == hi else np.linspace(lo, hi, p.grid_points)
    return [(float(x), float(p.evaluate(float(x)))) for x in xs]


def bracket_from_scan(samples: list[tuple[float, float]]) -> tuple[float, float, float]:
    """Best interior grid point with its two neighbours."""
    if len(samples) < 3:
        raise BadBracket("need at least three samples to bracket a minimum")
    k = min(range(1, len(samples) - 1), key=lambda i: samples[i][1])
    return samples[k - 1][0], samples[k][0], samples[k + 1][0]


def refine(p: CalibrationProblem, bracket: tuple[float, float, float]) -> tuple[float, float]:
    a, b, c = bracket
    fa, fb, fc = p.evaluate(a), p.evaluate(b), p.evaluate(c)
    if not (a < b < c and fb < min(fa, fc)):
        raise BadBracket(f"({a:g}, {b:g}, {c:g}) with values ({fa:.3g}, {fb:.3g}, {fc:.3g}) is not a sandwich")
    res = minimize_scalar(p.evaluate, bracket=(a, b, c), method="golden",
                          options={"xtol": PARAM_TOL * 1e-3})
    x, fx = float(res.x), float(res.fun)
    if not a <= x <= c or fx > fb:
        return b, fb
    return x, fx


@dataclass(frozen=True)
class CalibrationRecord:
    target: str
    t_star: float
    objective: float
    objective_kind: Objective
    bounds: tuple[float, float]
    grid_points: int
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "target": self.target,
            "t_star": self.t_star,
            "objective": self.objective,
            "objective_kind": self.objective_kind.value,
            "bounds": list(self.bounds),
            "grid_points": self.grid_points,
            "seedless": True,
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def calibrate(p: CalibrationProblem) -> tuple[float, float]:
    samples = scan(p)
    if len(samples) == 1:
        return samples[0]
    best_scan = min(samples, key=lambda s: s[1])
    try:
        x, fx = refine(p, bracket_from_scan(samples))
    except BadBracket:
        return best_scan
    return (x, fx) if fx <= best_scan[1] else best_scan


# ------------------------------------------------------------ named targets

SWAP_BOUNDS = (0.5, 1.5)
SINGLE_II_BOUNDS = (0.5, 1.1)
SINGLE_III_BOUNDS = (0.9, 1.5)
E_J3_BOUNDS = (0.7, 0.95)
III_PATTERN = "+-++--+-"


def swap_problem(grid_points: int = 256) -> CalibrationProblem:
    """Two qubits, e_j = (-J, J), j_k = -J, matched to [-12] on the DJ input."""
    cfg = DeviceConfig.default(2)
    uniform = np.full(4, 0.5, dtype=complex)
    target = qcore.hadamard_all(swap_matrix(2, 0, 1, -1) @ uniform)

    def build(t: float) -> PulseSchedule:
        return PulseSchedule((ControlSegment(t, (-1.0, 1.0), (-1.0,)),))

    return schedule_problem("SwapLike", build, cfg, Objective.STATE_INFIDELITY, SWAP_BOUNDS,
                            target_state=target, grid_points=grid_points)


def table_time_problem(key: str, bounds: tuple[float, float] | None = None, *, e_j3: float | None = None,
                       grid_points: int = 64, objective: Objective = Objective.DJ_RESIDUAL,
                       e_k: float = 0.0) -> CalibrationProblem:
    row = TABLE_ROWS[key]
    cfg = DeviceConfig.default(3, e_k=e_k)
    if bounds is None:
        bounds = (row.duration - 0.15, row.duration + 0.15)
    target = None
    if objective is Objective.STATE_INFIDELITY:
        signs = np.array(text_to_signs(III_PATTERN), dtype=complex) / np.sqrt(8)
        target = qcore.hadamard_all(signs)
    return schedule_problem(key, lambda t: table_schedule(row, t, e_j3=e_j3), cfg, objective, bounds,
                            target_state=target, grid_points=grid_points)


def optimal_table_time(key: str, e_k: float = 0.0, grid_points: int = 64) -> float:
    """Locally optimal |a00| time near a table row's listed time."""
    return calibrate(table_time_problem(key, grid_points=grid_points, e_k=e_k))[0]


def _profile_e_j3(grid_points: int) -> tuple[float, float, float]:
    """Minimize over e_j3 the best state distance reachable by tuning t."""

    def inner(e3: float) -> tuple[float, float]:
        p = table_time_problem("III-single", SINGLE_III_BOUNDS, e_j3=e3, grid_points=MIN_GRID,
                               objective=Objective.STATE_INFIDELITY)
        return calibrate(p)

    outer = CalibrationProblem("e_j3", lambda e3: inner(e3)[1], E_J3_BOUNDS, grid_points,
                               Objective.STATE_INFIDELITY)
    e3, dist = calibrate(outer)
    return e3, inner(e3)[0], dist


def calibrate_named(target: str, *, grid_points: int | None = None, co_optimize: bool = True) -> CalibrationRecord:
    if target == "SwapLike":
        p = swap_problem(grid_points or 256)
    elif target == "SingleShotII":
        p = table_time_problem("II-single", SINGLE_II_BOUNDS, grid_points=grid_points or 128)
    elif target == "SingleShotIII":
        p = table_time_problem("III-single", SINGLE_III_BOUNDS, grid_points=grid_points or 128)
    else:
        raise ValueError(f"unknown calibration target {target!r}; use SwapLike, SingleShotII or SingleShotIII")
    t, fx = calibrate(p)
    extra: dict[str, Any] = {}
    if target == "SingleShotIII" and co_optimize:
        e3, t3, dist = _profile_e_j3(MIN_GRID)
        extra = {"e_j3_star": e3, "e_j3_t_star": t3, "e_j3_objective": dist,
                 "e_j3_objective_kind": Objective.STATE_INFIDELITY.value, "e_j3_bounds": list(E_J3_BOUNDS)}
    return CalibrationRecord(target, t, fx, p.objective, p.bounds, p.grid_points, extra)


NAMED_TARGETS = ("SwapLike", "SingleShotII", "SingleShotIII")
