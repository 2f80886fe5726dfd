"""Physical model of a Josephson charge-qubit register.

Each qubit is a Cooper-pair box truncated to the charge states {|0>, |1>}
with Hamiltonian ``(e_ch/2)(2 n_x - 1) sz - (e_j/2) sx``.  Neighbouring
islands are joined by a tunable Josephson coupler ``j_k`` (Cooper-pair
hopping) and a fixed parasitic capacitive coupling ``e_k``.  All Pauli
operators here act in the charge basis; oracle gates live in the |+-> basis
and are reached with :func:`charge_to_pm`.

Energies are in units of J, durations in units of 2*pi/J (hbar = 1).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import qcore
from .errors import DimMismatch, NonDegenerateOffset, TopologyMismatch

UNITS = "J, hbar=1, time=2*pi/J"
DEFAULT_E_CH = 20.0
MAX_QUBITS = 12
DEGENERACY = 0.5
# soft regime bound |e_j| <= e_ch / REGIME_RATIO
REGIME_RATIO = 5.0
# usable coupler needs max|j_k| >= COUPLER_RATIO * e_k
COUPLER_RATIO = 4.0


class RegimeWarning(UserWarning):
    """Josephson energy is not small compared with the charging energy."""


@dataclass(frozen=True)
class QubitParams:
    e_ch: float = DEFAULT_E_CH
    n_x: float = DEGENERACY
    e_j: float = 1.0

    def __post_init__(self) -> None:
        if not self.e_ch > 0:
            raise ValueError(f"charging energy must be positive, got {self.e_ch}")
        if not 0.0 <= self.n_x <= 1.0:
            raise ValueError(f"offset charge must lie in [0, 1], got {self.n_x}")
        if abs(self.e_j) > self.e_ch:
            raise ValueError(f"|e_j| = {abs(self.e_j)} exceeds e_ch = {self.e_ch}: not a charge qubit")
        if abs(self.e_j) > self.e_ch / REGIME_RATIO:
            warnings.warn(
                f"|e_j| = {abs(self.e_j)} > e_ch/{REGIME_RATIO:g}; two-state truncation is marginal",
                RegimeWarning,
                stacklevel=3,
            )


@dataclass(frozen=True)
class CouplerParams:
    j_k: float = 1.0
    e_k: float = 0.0

    def __post_init__(self) -> None:
        if self.e_k < 0:
            raise ValueError(f"capacitive coupling must be >= 0, got {self.e_k}")


@dataclass(frozen=True)
class DeviceConfig:
    """Register layout.  Coupler ``c`` joins qubits ``c`` and ``(c + 1) % n``."""

    n: int
    qubits: tuple[QubitParams, ...]
    couplers: tuple[CouplerParams, ...]
    topology: str = "ring"

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "couplers", tuple(self.couplers))
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {self.n}")
        if len(self.qubits) != self.n:
            raise TopologyMismatch(f"{len(self.qubits)} qubit entries for n = {self.n}")
        if self.topology == "ring":
            if self.n < 3:
                raise TopologyMismatch("a ring needs at least three qubits; use 'chain'")
            expected = self.n
        elif self.topology == "chain":
            expected = self.n - 1
        else:
            raise TopologyMismatch(f"unknown topology {self.topology!r}")
        if len(self.couplers) != expected:
            raise TopologyMismatch(
                f"{self.topology} of {self.n} qubits needs {expected} couplers, got {len(self.couplers)}"
            )

    @classmethod
    def default(cls, n: int = 3, *, topology: str | None = None, e_k: float = 0.0,
                e_ch: float = DEFAULT_E_CH) -> "DeviceConfig":
        """Idealised register: e_ch = 20 J, |e_j| = |j_k| = J, ring for n >= 3."""
        if topology is None:
            topology = "ring" if n >= 3 else "chain"
        m = n if topology == "ring" else n - 1
        return cls(
            n=n,
            qubits=tuple(QubitParams(e_ch=e_ch) for _ in range(n)),
            couplers=tuple(CouplerParams(j_k=1.0, e_k=e_k) for _ in range(m)),
            topology=topology,
        )

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def coupler_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((c, (c + 1) % self.n) for c in range(len(self.couplers)))

    def coupler_index(self, a: int, b: int) -> int | None:
        for c, pair in enumerate(self.coupler_pairs):
            if set(pair) == {a, b}:
                return c
        return None

    def neighbours(self, q: int) -> list[int]:
        return [c for c, pair in enumerate(self.coupler_pairs) if q in pair]

    def with_ek(self, e_k: float) -> "DeviceConfig":
        return replace(self, couplers=tuple(replace(c, e_k=e_k) for c in self.couplers))

    def to_dict(self) -> dict[str, Any]:
        return {
            "units": UNITS,
            "n": self.n,
            "topology": self.topology,
            "qubits": [{"e_ch": q.e_ch, "n_x": q.n_x, "e_j": q.e_j} for q in self.qubits],
            "couplers": [{"j_k": c.j_k, "e_k": c.e_k} for c in self.couplers],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DeviceConfig":
        return cls(
            n=int(data["n"]),
            qubits=tuple(QubitParams(**q) for q in data["qubits"]),
            couplers=tuple(CouplerParams(**c) for c in data.get("couplers", [])),
            topology=data.get("topology", "ring"),
        )

    @classmethod
    def load(cls, path: str | Path) -> "DeviceConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


def _as_matrix(m: Any) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
    a = np.asarray(m, dtype=complex)
    if a.shape != (2, 2):
        raise DimMismatch(f"ideal one-qubit op must be 2x2, got {a.shape}")
    return tuple(tuple(complex(x) for x in row) for row in a)  # type: ignore[return-value]


@dataclass(frozen=True)
class IdealOp:
    """Exact single-qubit unitary, given in the |+-> basis of ``qubit``."""

    qubit: int
    matrix: tuple[tuple[complex, complex], tuple[complex, complex]]
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _as_matrix(self.matrix))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=complex)

    def to_dict(self) -> dict[str, Any]:
        a = self.array
        return {"qubit": self.qubit, "label": self.label, "re": a.real.tolist(), "im": a.imag.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "IdealOp":
        m = np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)
        return cls(qubit=int(data["qubit"]), matrix=m, label=data.get("label", ""))


@dataclass(frozen=True)
class ControlSegment:
    """Piecewise-constant control: ideal ops first, then free evolution.

    ``n_x`` of ``None`` means every island sits at the degeneracy point.
    """

    duration: float
    e_j: tuple[float, ...]
    j_k: tuple[float, ...]
    n_x: tuple[float, ...] | None = None
    ideal_ops: tuple[IdealOp, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "e_j", tuple(float(x) for x in self.e_j))
        object.__setattr__(self, "j_k", tuple(float(x) for x in self.j_k))
        if self.n_x is not None:
            object.__setattr__(self, "n_x", tuple(float(x) for x in self.n_x))
        object.__setattr__(self, "ideal_ops", tuple(self.ideal_ops))
        if self.duration < 0:
            raise ValueError(f"negative duration {self.duration}")
        if self.duration == 0 and not self.ideal_ops:
            raise ValueError("a zero-duration segment must carry at least one ideal op")

    @property
    def offsets(self) -> tuple[float, ...]:
        return self.n_x if self.n_x is not None else (DEGENERACY,) * len(self.e_j)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "t": self.duration,
            "e_j": list(self.e_j),
            "j_k": list(self.j_k),
            "ideal_ops": [op.to_dict() for op in self.ideal_ops],
        }
        if self.n_x is not None:
            d["n_x"] = list(self.n_x)
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ControlSegment":
        return cls(
            duration=float(data["t"]),
            e_j=tuple(data["e_j"]),
            j_k=tuple(data["j_k"]),
            n_x=tuple(data["n_x"]) if "n_x" in data else None,
            ideal_ops=tuple(IdealOp.from_dict(o) for o in data.get("ideal_ops", [])),
        )


@dataclass(frozen=True)
class PulseSchedule:
    segments: tuple[ControlSegment, ...]
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValueError("a pulse schedule needs at least one segment")

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments)

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label, "units": UNITS, "segments": [s.to_dict() for s in self.segments]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PulseSchedule":
        return cls(segments=tuple(ControlSegment.from_dict(s) for s in data["segments"]),
                   label=data.get("label", ""))


def one_qubit_hamiltonian(p: QubitParams) -> np.ndarray:
    return (p.e_ch / 2) * (2 * p.n_x - 1) * qcore.SZ - (p.e_j / 2) * qcore.SX


def n_qubit_hamiltonian(cfg: DeviceConfig, seg: ControlSegment, *,
                        require_degeneracy: bool = False) -> np.ndarray:
    """Register Hamiltonian in the charge basis for one control segment.

    Built directly on basis indices: sx and the hopping term are bit flips,
    sz and sz*sz are diagonal.
    """
    n = cfg.n
    if len(seg.e_j) != n:
        raise TopologyMismatch(f"segment has {len(seg.e_j)} e_j values for {n} qubits")
    if len(seg.j_k) != len(cfg.couplers):
        raise TopologyMismatch(f"segment has {len(seg.j_k)} j_k values for {len(cfg.couplers)} couplers")
    offsets = seg.offsets
    if len(offsets) != n:
        raise TopologyMismatch(f"segment has {len(offsets)} offsets for {n} qubits")
    if require_degeneracy and any(x != DEGENERACY for x in offsets):
        raise NonDegenerateOffset(f"offsets {offsets} are not all at the degeneracy point")

    dim = cfg.dim
    idx = np.arange(dim)
    bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
    zs = [1 - 2 * b for b in bits]

    diag = np.zeros(dim)
    h = np.zeros((dim, dim), dtype=complex)
    for q in range(n):
        charging = (cfg.qubits[q].e_ch / 2) * (2 * offsets[q] - 1)
        if charging:
            diag += charging * zs[q]
        if seg.e_j[q]:
            h[idx, idx ^ (1 << (n - 1 - q))] += -seg.e_j[q] / 2
    for c, (a, b) in enumerate(cfg.coupler_pairs):
        e_k = cfg.couplers[c].e_k
        if e_k:
            diag += e_k * zs[a] * zs[b]
        j_k = seg.j_k[c]
        if j_k:
            # sp_a sm_b + h.c. moves one Cooper pair across the coupler
            hop = bits[a] != bits[b]
            flip = (1 << (n - 1 - a)) | (1 << (n - 1 - b))
            h[idx[hop], idx[hop] ^ flip] += -j_k / 2
    h[idx, idx] += diag
    return h


def flux_to_ej(phi: float, cal_e_j: float) -> float:
    """SQUID-tunable Josephson energy ``2 E cos(pi phi)``, ``phi`` in flux quanta."""
    return 2.0 * cal_e_j * math.cos(math.pi * phi)


def charge_to_pm(psi: np.ndarray) -> np.ndarray:
    """Coordinates of a charge-basis state in the |+->^n basis."""
    return qcore.hadamard_all(np.asarray(psi, dtype=complex))


def pm_to_charge(psi: np.ndarray) -> np.ndarray:
    return qcore.hadamard_all(np.asarray(psi, dtype=complex))


def pm_operator_to_charge(u: np.ndarray) -> np.ndarray:
    """Re-express an operator given in the |+-> basis in the charge basis."""
    u = np.asarray(u, dtype=complex)
    n = qcore.n_qubits(u.shape[0])
    hn = qcore.kron_all([qcore.H1] * n)
    return hn @ u @ hn


@dataclass(frozen=True)
class Violation:
    severity: str  # "error" or "warning"
    where: str
    message: str


def validate(cfg: DeviceConfig) -> list[Violation]:
    """Check the charge-qubit regime and the coupler usability condition."""
    out: list[Violation] = []
    for q, p in enumerate(cfg.qubits):
        where = f"qubit {q + 1}"
        if abs(p.e_j) >= p.e_ch:
            out.append(Violation("error", where, f"|e_j| = {abs(p.e_j):g} >= e_ch = {p.e_ch:g}"))
        elif abs(p.e_j) > p.e_ch / REGIME_RATIO:
            out.append(Violation("warning", where,
                                 f"|e_j| = {abs(p.e_j):g} > e_ch/{REGIME_RATIO:g} = {p.e_ch / REGIME_RATIO:g}"))
    for c, cp in enumerate(cfg.couplers):
        if abs(cp.j_k) < COUPLER_RATIO * cp.e_k:
            a, b = cfg.coupler_pairs[c]
            out.append(Violation(
                "error", f"coupler {c + 1} ({a + 1}-{b + 1})",
                f"max|j_k| = {abs(cp.j_k):g} < {COUPLER_RATIO:g}*e_k = {COUPLER_RATIO * cp.e_k:g}",
            ))
    return out


def zero_segment(cfg: DeviceConfig, duration: float, *, ideal_ops: Sequence[IdealOp] = ()) -> ControlSegment:
    """All controls off: only the fixed parasitic coupling acts."""
    return ControlSegment(duration=duration, e_j=(0.0,) * cfg.n, j_k=(0.0,) * len(cfg.couplers),
                          ideal_ops=tuple(ideal_ops))


def halt(cfg: DeviceConfig, seg: ControlSegment, qubit: int) -> ControlSegment:
    """Switch off the qubit's own junction and every coupler touching it."""
    e_j = list(seg.e_j)
    e_j[qubit] = 0.0
    j_k = list(seg.j_k)
    for c in cfg.neighbours(qubit):
        j_k[c] = 0.0
    return replace(seg, e_j=tuple(e_j), j_k=tuple(j_k))
