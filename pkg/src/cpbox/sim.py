"""Schedule execution and full Deutsch-Jozsa / Bernstein-Vazirani runs.

Runs start in the charge state |0...0>.  At the degeneracy point that state
is the uniform superposition over +- labels, so the DJ input needs no
explicit Hadamard pulses; the amplitude of charge |0...0> at the end is
the DJ amplitude a00.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from . import qcore
from .compiler import (
    TABLE_ROWS,
    CompileMode,
    CompiledGate,
    compile_uf,
    table_schedule,
)
from .device import ControlSegment, DeviceConfig, PulseSchedule, n_qubit_hamiltonian
from .errors import DimMismatch, PromiseViolation
from .ideal import DiagonalGate, GateKind, classify_gate, hadamard_n, ua_gate, uf_gate
from .oracles import BooleanFunction, BVFunction, Classification, canonicalize, classify

DECISION_THRESHOLD = 0.5
TABLE_EK = 1.0 / 40.0


class RunMode(str, enum.Enum):
    IDEAL = "ideal"
    PULSE = "pulse"


@lru_cache(maxsize=4096)
def _propagator(cfg: DeviceConfig, e_j: tuple[float, ...], j_k: tuple[float, ...],
                n_x: tuple[float, ...] | None, duration: float) -> np.ndarray:
    seg = ControlSegment(duration, e_j, j_k, n_x)
    u = qcore.evolve(n_qubit_hamiltonian(cfg, seg), duration)
    u.setflags(write=False)
    return u


def _uncoupled(cfg: DeviceConfig, seg: ControlSegment) -> bool:
    return not any(seg.j_k) and not any(c.e_k for c in cfg.couplers)


def _local_propagator(cfg: DeviceConfig, seg: ControlSegment, q: int) -> np.ndarray:
    p = cfg.qubits[q]
    h = (p.e_ch / 2) * (2 * seg.offsets[q] - 1) * qcore.SZ - (seg.e_j[q] / 2) * qcore.SX
    return qcore.evolve(h, seg.duration)


def segment_propagator(cfg: DeviceConfig, seg: ControlSegment) -> np.ndarray:
    """Full propagator of one segment's free evolution (charge basis)."""
    return _propagator(cfg, seg.e_j, seg.j_k, seg.n_x, seg.duration)


def apply_ideal_ops(seg: ControlSegment, psi: np.ndarray) -> np.ndarray:
    for op in seg.ideal_ops:
        # ideal ops are given in the +- basis of their qubit
        u = qcore.H1 @ op.array @ qcore.H1
        psi = qcore.apply_local(u, op.qubit, psi)
    return psi


def run_schedule(device: DeviceConfig, sched: PulseSchedule, initial: np.ndarray) -> np.ndarray:
    """Apply each segment's ideal ops, then its free evolution, in order."""
    psi = np.asarray(initial, dtype=complex)
    if psi.shape != (device.dim,):
        raise DimMismatch(f"state of length {psi.shape[0]} for a {device.n}-qubit device")
    for seg in sched.segments:
        if len(seg.e_j) != device.n:
            # let the Hamiltonian builder report the mismatch
            n_qubit_hamiltonian(device, seg)
        psi = apply_ideal_ops(seg, psi)
        if seg.duration == 0:
            continue
        if _uncoupled(device, seg):
            for q in range(device.n):
                psi = qcore.apply_local(_local_propagator(device, seg, q), q, psi)
        else:
            psi = segment_propagator(device, seg) @ psi
    return psi


def amplitude_pm_sum(f: BooleanFunction) -> float:
    """a00 as a sum over +- labels: 2^-n sum_x (-1)^f(x), x in {+,-}^n."""
    total = 0
    for label in range(f.size):
        total += -1 if f(label) else 1
    return total / f.size


@dataclass
class RunReport:
    mode: RunMode
    function: BooleanFunction | BVFunction
    final_state_charge: np.ndarray
    a00: complex
    decision: Classification | int
    confidence: float
    seed: int
    samples: dict[str, int] | None = None
    residual: float | None = None
    schedule_label: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def abs_a00(self) -> float:
        return abs(self.a00)

    def to_dict(self) -> dict[str, Any]:
        n = self.function.n
        decision = (self.decision.value if isinstance(self.decision, Classification)
                    else f"{self.decision:0{n}b}")
        return {
            "mode": self.mode.value,
            "function": self.function.to_dict(),
            "a00": {"re": float(self.a00.real), "im": float(self.a00.imag), "abs": self.abs_a00},
            "decision": decision,
            "confidence": self.confidence,
            "seed": self.seed,
            "residual": self.residual,
            "schedule": self.schedule_label,
            "samples": self.samples,
            **self.extra,
        }


def sample_counts(psi: np.ndarray, shots: int, seed: int) -> dict[str, int]:
    """Multinomial charge-basis measurement record keyed by bitstring."""
    n = qcore.n_qubits(psi.shape[0])
    probs = np.abs(psi) ** 2
    probs = probs / probs.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    return {f"{x:0{n}b}": int(c) for x, c in enumerate(counts) if c}


def _decide(a00: complex) -> tuple[Classification, float]:
    p0 = abs(a00) ** 2
    if p0 > DECISION_THRESHOLD:
        return Classification.CONSTANT, p0
    return Classification.BALANCED, 1.0 - p0


def default_device(n: int, e_k: float | None = None, device: DeviceConfig | None = None) -> DeviceConfig:
    cfg = device if device is not None else DeviceConfig.default(n)
    if cfg.n != n:
        raise DimMismatch(f"function on {n} bits, device has {cfg.n} qubits")
    if e_k is not None:
        cfg = cfg.with_ek(e_k)
    return cfg


@lru_cache(maxsize=512)
def _compiled(gate: DiagonalGate, mode: CompileMode, device: DeviceConfig) -> CompiledGate:
    return compile_uf(gate, mode, device)


def compile_for_run(gate: DiagonalGate, compile_mode: CompileMode, ideal_one_qubit: bool,
                    device: DeviceConfig) -> CompiledGate:
    """Pick the compilation for a pulse run.

    Single-shot operations exist only for class II and III gates; every
    other gate falls back to its sequence.  Schedules are designed and
    verified on the nominal device: parasitic capacitive coupling is left
    for the run to expose.
    """
    device = device.with_ek(0.0)
    kind = (gate.gate_class or classify_gate(gate)).kind
    if compile_mode is CompileMode.SINGLE_SHOT and kind in (GateKind.CLASS_II, GateKind.CLASS_III):
        return _compiled(gate, CompileMode.SINGLE_SHOT, device)
    mode = CompileMode.IDEAL_ASSIST if ideal_one_qubit else CompileMode.SEQUENCE
    return _compiled(gate, mode, device)


def run_dj(f: BooleanFunction, mode: RunMode | str = RunMode.IDEAL, *,
           compile_mode: CompileMode | str = CompileMode.SEQUENCE, e_k: float | None = None,
           ideal_one_qubit: bool = True, device: DeviceConfig | None = None,
           shots: int = 0, seed: int = 0) -> RunReport:
    mode = RunMode(mode)
    compile_mode = CompileMode(compile_mode)
    if classify(f) is Classification.NEITHER:
        raise PromiseViolation(f"{f.hex()} has {f.ones} ones of {f.size}: neither constant nor balanced")
    # complementing f only flips the global sign of the final state
    canonical = canonicalize(f)
    sign = 1 if f.is_canonical else -1
    gate = uf_gate(canonical)
    extra: dict[str, Any] = {"gate": gate.to_dict()}
    residual = None
    label = ""
    if mode is RunMode.IDEAL:
        h = hadamard_n(f.n)
        psi = sign * (h @ (gate.diagonal() * (h @ qcore.basis_state(f.n, 0))))
    else:
        cfg = default_device(f.n, e_k, device)
        compiled = compile_for_run(gate, compile_mode, ideal_one_qubit, cfg)
        psi = sign * run_schedule(cfg, compiled.schedule, qcore.basis_state(f.n, 0))
        residual = compiled.state_distance
        label = compiled.schedule.label
        extra.update({"compile_mode": compiled.mode.value, "e_k": cfg.couplers[0].e_k if cfg.couplers else 0.0,
                      "ideal_one_qubit": ideal_one_qubit})
    a00 = complex(psi[0])
    decision, confidence = _decide(a00)
    samples = sample_counts(psi, shots, seed) if shots else None
    return RunReport(mode, f, psi, a00, decision, confidence, seed, samples, residual, label, extra)


def bv_schedule(g: BVFunction, cfg: DeviceConfig | None = None) -> PulseSchedule:
    """Per-qubit Table I timings on uncoupled qubits.

    All junctions run for half a period (sz on the a-qubits), then the
    remaining qubits run another half period to complete the identity.
    """
    bits = g.bits()
    n = g.n
    m = len((cfg or DeviceConfig.default(n)).couplers)
    first = ControlSegment(0.5, (1.0,) * n, (0.0,) * m)
    second_ej = tuple(0.0 if b else 1.0 for b in bits)
    segments = [first]
    if any(second_ej):
        segments.append(ControlSegment(0.5, second_ej, (0.0,) * m))
    return PulseSchedule(tuple(segments), label=f"BV a={g.a:0{n}b}")


def run_bv(g: BVFunction, mode: RunMode | str = RunMode.IDEAL, *, e_k: float | None = None,
           device: DeviceConfig | None = None, shots: int = 0, seed: int = 0) -> RunReport:
    mode = RunMode(mode)
    fact = ua_gate(g)
    label = ""
    if mode is RunMode.IDEAL:
        pm = fact.gate.diagonal() / np.sqrt(1 << g.n)
        psi = qcore.hadamard_all(pm)
    else:
        cfg = default_device(g.n, e_k, device)
        sched = bv_schedule(g, cfg)
        label = sched.label
        psi = run_schedule(cfg, sched, qcore.basis_state(g.n, 0))
    probs = np.abs(psi) ** 2
    mask = int(np.argmax(probs))
    samples = sample_counts(psi, shots, seed) if shots else None
    return RunReport(mode, g, psi, complex(psi[0]), mask, float(probs[mask]), seed, samples,
                     None, label, {"z_qubits": [q + 1 for q in fact.z_qubits], "global_sign": fact.sign})


# ---------------------------------------------------------------- tables

@dataclass(frozen=True)
class TableEntry:
    table: str
    row: str
    quantity: str
    paper_value: Any
    simulated_value: Any
    ratio: float | None
    passed: bool
    rule: str
    graded: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {
            "table": self.table,
            "row": self.row,
            "quantity": self.quantity,
            "paper_value": self.paper_value,
            "simulated_value": self.simulated_value,
            "ratio": self.ratio,
            "pass": self.passed,
            "rule": self.rule,
            "graded": self.graded,
        }


# reported a00 magnitudes for the four realizations: (E_K = 0, E_K = J/40)
TABLE_III = {
    "II-seq": (2e-3, 2e-4),
    "II-single": (7e-5, 2e-2),
    "III-seq": (3e-4, 6e-3),
    "III-single": (1e-5, 2e-3),
}
# the single-shot III entry at E_K = 0 is an upper bound
UPPER_BOUNDS = {("III-single", 0)}
TABLE_FACTOR = 3.0
TIME_TOL = 0.02


def table_amplitude(key: str, e_k: float, duration: float | None = None) -> complex:
    """a00 for a junction-table realization with perfect one-qubit rotations."""
    row = TABLE_ROWS[key]
    cfg = DeviceConfig.default(3, e_k=e_k)
    psi = run_schedule(cfg, table_schedule(row, duration), qcore.basis_state(3, 0))
    return complex(psi[0])


def nearest_pattern(psi_charge: np.ndarray) -> str:
    """Sign pattern of the closest ideal oracle output state."""
    pm = qcore.hadamard_all(psi_charge)
    k = int(np.argmax(np.abs(pm)))
    rotated = pm * np.exp(-1j * np.angle(pm[k]))
    signs = np.where(rotated.real >= 0, 1, -1)
    if signs[0] < 0:
        signs = -signs
    return "".join("+" if s > 0 else "-" for s in signs)


def _factor_entry(table: str, row: str, quantity: str, listed: float, sim: float,
                  *, bound: bool = False, graded: bool = True) -> TableEntry:
    ratio = sim / listed if listed else None
    if bound:
        return TableEntry(table, row, quantity, f"<{listed:g}", sim, ratio, sim < listed, f"< {listed:g}", graded)
    ok = ratio is not None and 1 / TABLE_FACTOR <= ratio <= TABLE_FACTOR
    return TableEntry(table, row, quantity, listed, sim, ratio, ok, f"within x{TABLE_FACTOR:g}", graded)


def _table_i() -> list[TableEntry]:
    out = []
    cfg = DeviceConfig.default(1)
    for row, t, target in (("constant I1", 1.0, 0), ("balanced sz", 0.5, 1)):
        sched = PulseSchedule((ControlSegment(t, (1.0,), ()),))
        psi = run_schedule(cfg, sched, qcore.basis_state(1, 0))
        p = float(abs(psi[target]) ** 2)
        out.append(TableEntry("I", row, f"P(charge {target}) at t={t:g}", 1.0, p, p,
                              abs(p - 1.0) < 1e-9, "|P - 1| < 1e-9"))
    return out


def _table_ii() -> list[TableEntry]:
    out = []
    cfg = DeviceConfig.default(3)
    for key, row in TABLE_ROWS.items():
        psi = run_schedule(cfg, table_schedule(row), qcore.basis_state(3, 0))
        pattern = nearest_pattern(psi)
        signs = tuple(1 if c == "+" else -1 for c in pattern)
        kind = classify_gate(DiagonalGate(3, signs)).kind.value
        expected = f"Class{row.gate}"
        out.append(TableEntry("II", key, f"class of realized pattern {pattern}", expected, kind, None,
                              kind == expected, "class equality"))
    return out


def _table_iii(include_times: bool) -> list[TableEntry]:
    out = []
    amps: dict[tuple[str, float], float] = {}
    for key in TABLE_ROWS:
        for e_k in (0.0, TABLE_EK):
            amps[key, e_k] = abs(table_amplitude(key, e_k))
    for key, (p0, p1) in TABLE_III.items():
        for col, e_k, listed in ((0, 0.0, p0), (1, TABLE_EK, p1)):
            label = "E_K=0" if col == 0 else "E_K=J/40"
            a = amps[key, e_k]
            out.append(_factor_entry("III", key, f"|a00| ({label})", listed, a,
                                     bound=(key, col) in UPPER_BOUNDS))
            out.append(_factor_entry("III", key, f"|a00|^2 ({label})", listed, a * a,
                                     bound=(key, col) in UPPER_BOUNDS, graded=False))
    seq = amps["II-seq", TABLE_EK] / amps["II-seq", 0.0]
    single = amps["II-single", TABLE_EK] / amps["II-single", 0.0]
    out.append(TableEntry("III", "II", "E_K degradation single/sequence", ">1", single / seq, single / seq,
                          single > seq, "single-shot degrades more than sequence"))
    if include_times:
        from .calib import optimal_table_time

        for key, row in TABLE_ROWS.items():
            t = optimal_table_time(key)
            out.append(TableEntry("III", key, "time of minimal |a00|", row.duration, t, t / row.duration,
                                  abs(t - row.duration) <= TIME_TOL, f"+-{TIME_TOL:g}"))
    return out


def reproduce_tables(which: Sequence[str] = ("1", "2", "3"), *, include_times: bool = True) -> list[TableEntry]:
    rows: list[TableEntry] = []
    which = {str(w).upper().replace("III", "3").replace("II", "2").replace("I", "1") for w in which}
    if "1" in which:
        rows += _table_i()
    if "2" in which:
        rows += _table_ii()
    if "3" in which:
        rows += _table_iii(include_times)
    return rows


CSV_COLUMNS = ("table", "row", "quantity", "paper_value", "simulated_value", "ratio", "pass")


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "pass" if v else "FAIL"
    if isinstance(v, float):
        return f"{v:.4g}"
    if v is None:
        return ""
    return str(v)


def tables_csv(rows: Sequence[TableEntry]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        d = r.to_dict()
        w.writerow([_fmt(d[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def tables_markdown(rows: Sequence[TableEntry]) -> str:
    lines = ["| " + " | ".join(CSV_COLUMNS) + " |", "|" + "---|" * len(CSV_COLUMNS)]
    for r in rows:
        d = r.to_dict()
        cells = [_fmt(d[c]).replace("|", "\\|") for c in CSV_COLUMNS]
        if not r.graded:
            cells[-1] += " (info)"
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def tables_json(rows: Sequence[TableEntry]) -> str:
    return json.dumps([r.to_dict() for r in rows], indent=2) + "\n"

