import json

import numpy as np
import pytest

from cpbox.calib import (
    MIN_GRID,
    NAMED_TARGETS,
    CalibrationProblem,
    Objective,
    bracket_from_scan,
    calibrate,
    calibrate_named,
    refine,
    scan,
    schedule_problem,
    swap_problem,
    table_time_problem,
)
from cpbox.device import ControlSegment, DeviceConfig, PulseSchedule
from cpbox.errors import BadBracket


def quadratic(c, bounds=(0.0, 2.0), grid=64):
    return CalibrationProblem("quad", lambda t: (t - c) ** 2, bounds, grid)


@pytest.mark.parametrize("c", [0.13, 0.97, 1.5, 1.81])
def test_quadratic_minimum(c):
    t, fx = calibrate(quadratic(c))
    assert t == pytest.approx(c, abs=1e-4)
    assert fx < 1e-8


def test_refine_never_worse_than_scan():
    p = CalibrationProblem("wiggly", lambda t: np.cos(7 * t) + 0.1 * t, (0.0, 3.0), 40)
    samples = scan(p)
    t, fx = calibrate(p)
    assert fx <= min(v for _, v in samples)


def test_bad_bracket():
    p = quadratic(1.0)
    with pytest.raises(BadBracket):
        refine(p, (0.0, 0.1, 0.2))
    with pytest.raises(BadBracket):
        bracket_from_scan([(0.0, 1.0), (1.0, 0.0)])


def test_zero_width_bounds():
    p = CalibrationProblem("point", lambda t: (t - 1) ** 2, (0.4, 0.4), 1)
    assert scan(p) == [(0.4, pytest.approx(0.36))]
    assert calibrate(p)[0] == 0.4


def test_grid_minimum():
    with pytest.raises(ValueError):
        quadratic(1.0, grid=MIN_GRID - 1)
    with pytest.raises(ValueError):
        CalibrationProblem("empty", abs, (1.0, 0.0))


def test_state_infidelity_needs_target():
    cfg = DeviceConfig.default(1)
    with pytest.raises(ValueError):
        schedule_problem("x", lambda t: PulseSchedule((ControlSegment(t, (1.0,), ()),)), cfg,
                         Objective.STATE_INFIDELITY, (0.5, 1.5))


def test_constant_gate_local_minimum():
    """An idle qubit returns to charge 0 after one full period."""
    cfg = DeviceConfig.default(1)
    p = schedule_problem("idle", lambda t: PulseSchedule((ControlSegment(t, (1.0,), ()),)), cfg,
                         Objective.STATE_INFIDELITY, (0.6, 1.4), target_state=np.array([1, 0], dtype=complex))
    t, fx = calibrate(p)
    assert t == pytest.approx(1.0, abs=1e-4) and fx < 1e-6


@pytest.mark.parametrize("make", [lambda g: swap_problem(g), lambda g: table_time_problem("II-single", (0.5, 1.1),
                                                                                          grid_points=g)])
def test_grid_doubling_is_stable(make):
    a, _ = calibrate(make(64))
    b, _ = calibrate(make(128))
    assert abs(a - b) < 1e-3


@pytest.mark.parametrize("target,expected", [("SwapLike", 0.97), ("SingleShotII", 0.80), ("SingleShotIII", 1.19)])
def test_named_targets(target, expected):
    rec = calibrate_named(target, co_optimize=False)
    assert rec.t_star == pytest.approx(expected, abs=0.02)
    d = json.loads(rec.to_json())
    assert d["target"] == target and d["seedless"] is True
    assert rec.bounds[0] <= rec.t_star <= rec.bounds[1]


def test_e_j3_profile_recorded():
    d = calibrate_named("SingleShotIII").to_dict()
    assert 0.7 <= d["e_j3_star"] <= 0.95
    assert d["e_j3_objective_kind"] == "StateInfidelity"


def test_named_targets_listed():
    assert set(NAMED_TARGETS) == {"SwapLike", "SingleShotII", "SingleShotIII"}
    with pytest.raises(ValueError):
        calibrate_named("Nope")
