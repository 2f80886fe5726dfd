"""Pulse compilation of oracle gates.

A compiled gate is a list of steps.  Each step is a set of primitives that
run simultaneously in one control segment: one-qubit phases [+-j], sigma_z,
identity, and the swap-like two-qubit rotation [+-jk].  Entangling gates use
the three sequence templates below; which relabeling and sign choices realize
a given gate is settled by exhaustive search, checked first against the ideal
primitive algebra and then ranked by simulated residual.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import permutations, product
from typing import Iterable, Sequence

import numpy as np

from . import qcore
from .device import ControlSegment, DeviceConfig, IdealOp, PulseSchedule
from .errors import NoTemplateMatch, NonAdjacentPair
from .ideal import DiagonalGate, GateKind, _flip, _gauge, _permute, classify_gate, walsh_spectrum

PHASE_TIME = 0.25
SIGMA_Z_TIME = 0.5
IDENTITY_TIME = 1.0
SWAP_TIME = 0.97
# sign of j_k that produces [+jk] / [-jk]; fixed by a numerical probe at t = 0.97
SWAP_JK_SIGN = {+1: +1.0, -1: -1.0}
RESIDUAL_BOUND = 0.05
EXACT_TOL = 1e-9
# reference energy scale; every primitive switches junctions to +-J
J = 1.0


class PrimitiveKind(str, enum.Enum):
    PHASE_PLUS = "PhasePlus"
    PHASE_MINUS = "PhaseMinus"
    SIGMA_Z = "SigmaZ"
    IDENTITY = "Identity"
    SWAP_LIKE = "SwapLike"
    HALT = "Halt"


class CompileMode(str, enum.Enum):
    SEQUENCE = "Sequence"
    SINGLE_SHOT = "SingleShot"
    IDEAL_ASSIST = "IdealOneQubitAssist"


def phase_matrix(sign: int) -> np.ndarray:
    """[+-j] = diag(1, +-i) in the |+-> basis."""
    return np.diag([1.0, sign * 1j])


def swap_matrix(n: int, j: int, k: int, sign: int) -> np.ndarray:
    """[+-jk] in the |+-> basis: |++> <-> |--> with phase +-i, identity otherwise."""
    dim = 1 << n
    bj, bk = 1 << (n - 1 - j), 1 << (n - 1 - k)
    u = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        if bool(x & bj) == bool(x & bk):
            u[x ^ bj ^ bk, x] = sign * 1j
        else:
            u[x, x] = 1.0
    return u


@dataclass(frozen=True)
class PrimitiveOp:
    kind: PrimitiveKind
    qubits: tuple[int, ...]
    sign: int
    realized: ControlSegment

    @property
    def duration(self) -> float:
        return self.realized.duration

    @property
    def label(self) -> str:
        q = "".join(str(i + 1) for i in self.qubits)
        if self.kind in (PrimitiveKind.PHASE_PLUS, PrimitiveKind.PHASE_MINUS, PrimitiveKind.SWAP_LIKE):
            return f"[{'+' if self.sign > 0 else '-'}{q}]"
        if self.kind is PrimitiveKind.SIGMA_Z:
            return f"sz{q}"
        if self.kind is PrimitiveKind.IDENTITY:
            return f"id{q}"
        return f"halt{q}"

    def ideal_matrix(self) -> np.ndarray:
        """Exact action on the primitive's own qubits in the |+-> basis."""
        if self.kind in (PrimitiveKind.PHASE_PLUS, PrimitiveKind.PHASE_MINUS):
            return phase_matrix(self.sign)
        if self.kind is PrimitiveKind.SIGMA_Z:
            return qcore.SZ
        if self.kind in (PrimitiveKind.IDENTITY, PrimitiveKind.HALT):
            return qcore.I2
        return swap_matrix(2, 0, 1, self.sign)

    def ideal_operator(self, n: int) -> np.ndarray:
        if self.kind is PrimitiveKind.SWAP_LIKE:
            return swap_matrix(n, self.qubits[0], self.qubits[1], self.sign)
        return qcore.embed({self.qubits[0]: self.ideal_matrix()}, n)


def _segment(cfg: DeviceConfig, duration: float, e_j: dict[int, float] | None = None,
             j_k: dict[int, float] | None = None) -> ControlSegment:
    ej = [0.0] * cfg.n
    jk = [0.0] * len(cfg.couplers)
    for q, v in (e_j or {}).items():
        ej[q] = v
    for c, v in (j_k or {}).items():
        jk[c] = v
    return ControlSegment(duration=duration, e_j=tuple(ej), j_k=tuple(jk))


def phase_primitive(cfg: DeviceConfig, j: int, sign: int) -> PrimitiveOp:
    """[+j] from e_j = -J, [-j] from e_j = +J, both for a quarter period."""
    kind = PrimitiveKind.PHASE_PLUS if sign > 0 else PrimitiveKind.PHASE_MINUS
    e = -sign * J
    return PrimitiveOp(kind, (j,), 1 if sign > 0 else -1,
                       _segment(cfg, PHASE_TIME, {j: e}))


def sigma_z_primitive(cfg: DeviceConfig, j: int, e_j_sign: int = 1) -> PrimitiveOp:
    """Half-period free evolution; either sign of e_j gives sz up to phase."""
    e = e_j_sign * J
    return PrimitiveOp(PrimitiveKind.SIGMA_Z, (j,), 1, _segment(cfg, SIGMA_Z_TIME, {j: e}))


def identity_primitive(cfg: DeviceConfig, j: int) -> PrimitiveOp:
    return PrimitiveOp(PrimitiveKind.IDENTITY, (j,), 1,
                       _segment(cfg, IDENTITY_TIME, {j: J}))


def halt_primitive(cfg: DeviceConfig, j: int, duration: float) -> PrimitiveOp:
    return PrimitiveOp(PrimitiveKind.HALT, (j,), 1, _segment(cfg, duration))


def swap_primitive(cfg: DeviceConfig, pair: tuple[int, int], sign: int,
                   duration: float = SWAP_TIME) -> PrimitiveOp:
    """Swap-like rotation on the ordered pair (j, k): e_j(j) = -J, e_j(k) = +J, j_k = +-J."""
    j, k = pair
    c = cfg.coupler_index(j, k)
    if c is None or j == k:
        raise NonAdjacentPair(f"qubits {j + 1} and {k + 1} share no coupler")
    sign = 1 if sign > 0 else -1
    seg = _segment(cfg, duration, {j: -J, k: J}, {c: SWAP_JK_SIGN[sign] * J})
    return PrimitiveOp(PrimitiveKind.SWAP_LIKE, (j, k), sign, seg)


def merge(cfg: DeviceConfig, prims: Sequence[PrimitiveOp]) -> ControlSegment:
    """One segment running primitives of equal duration on disjoint qubits."""
    durations = {round(p.duration, 12) for p in prims}
    if len(durations) != 1:
        raise ValueError(f"cannot merge primitives of durations {sorted(durations)}")
    used: set[int] = set()
    ej = [0.0] * cfg.n
    jk = [0.0] * len(cfg.couplers)
    for p in prims:
        if used & set(p.qubits):
            raise ValueError(f"primitives overlap on qubits {sorted(used & set(p.qubits))}")
        used |= set(p.qubits)
        for q in range(cfg.n):
            ej[q] += p.realized.e_j[q]
        for c in range(len(jk)):
            jk[c] += p.realized.j_k[c]
    return ControlSegment(duration=prims[0].duration, e_j=tuple(ej), j_k=tuple(jk))


Step = tuple[PrimitiveOp, ...]


def _is_one_qubit(step: Step) -> bool:
    return all(p.kind is not PrimitiveKind.SWAP_LIKE for p in step)


def step_label(step: Step) -> str:
    return "".join(p.label for p in step)


def ideal_action(n: int, steps: Iterable[Step]) -> np.ndarray:
    """Exact |+-> coordinates of the DJ input after the ideal primitives."""
    psi = np.full(1 << n, 1 / np.sqrt(1 << n), dtype=complex)
    for step in steps:
        for p in step:
            psi = p.ideal_operator(n) @ psi
    return psi


def _pm_ideal_op(p: PrimitiveOp) -> IdealOp:
    return IdealOp(qubit=p.qubits[0], matrix=p.ideal_matrix(), label=p.label)


def build_schedule(cfg: DeviceConfig, steps: Sequence[Step], mode: CompileMode, label: str = "") -> PulseSchedule:
    """Lower steps to segments; in assist mode one-qubit steps become ideal ops."""
    segments: list[ControlSegment] = []
    if mode is CompileMode.IDEAL_ASSIST:
        pending: list[IdealOp] = []
        for step in steps:
            if _is_one_qubit(step):
                pending.extend(_pm_ideal_op(p) for p in step if p.kind is not PrimitiveKind.HALT)
                continue
            seg = merge(cfg, step)
            segments.append(ControlSegment(seg.duration, seg.e_j, seg.j_k, ideal_ops=tuple(pending)))
            pending = []
        if pending or not segments:
            segments.append(ControlSegment(0.0, (0.0,) * cfg.n, (0.0,) * len(cfg.couplers),
                                           ideal_ops=tuple(pending) or (IdealOp(0, qcore.I2, "id"),)))
    else:
        segments = [merge(cfg, step) for step in steps]
    return PulseSchedule(tuple(segments), label=label)


@dataclass(frozen=True)
class CompiledGate:
    target: DiagonalGate
    schedule: PulseSchedule
    mode: CompileMode
    verified_residual: float
    state_distance: float
    steps_label: str = ""

    def to_dict(self) -> dict:
        return {
            "target": self.target.to_dict(),
            "mode": self.mode.value,
            "steps": self.steps_label,
            "verified_residual": self.verified_residual,
            "state_distance": self.state_distance,
            "schedule": self.schedule.to_dict(),
        }


def verify_schedule(schedule: PulseSchedule, target: DiagonalGate, device: DeviceConfig) -> tuple[float, float]:
    """Run the schedule on the DJ input; return (state distance, |a00|)."""
    from .sim import run_schedule

    n = target.n
    psi = run_schedule(device, schedule, qcore.basis_state(n, 0))
    ideal_pm = target.diagonal() / np.sqrt(1 << n)
    ideal = qcore.hadamard_all(ideal_pm)
    return qcore.phase_invariant_distance(ideal, psi), abs(psi[0])


def _check_target(d: DiagonalGate) -> None:
    if d.n != 3 and d.gate_class is not None and d.gate_class.kind not in (
            GateKind.CONSTANT_IDENTITY, GateKind.SEPARABLE):
        raise NoTemplateMatch("entangling templates exist for three qubits only")


def _mask_steps(cfg: DeviceConfig, mask: int, e_sign: dict[int, int]) -> list[Step]:
    qubits = [q for q in range(cfg.n) if (mask >> (cfg.n - 1 - q)) & 1]
    if not qubits:
        return []
    return [tuple(sigma_z_primitive(cfg, q, e_sign.get(q, 1)) for q in qubits)]


def template_i(cfg: DeviceConfig) -> Iterable[tuple[str, list[Step]]]:
    """[+j][-k] -- [s jk] -- sz on a mask of qubits."""
    for j, k in permutations(range(cfg.n), 2):
        if cfg.coupler_index(j, k) is None:
            continue
        e_sign = {j: -1, k: 1}
        for s in (1, -1):
            head = [(phase_primitive(cfg, j, 1), phase_primitive(cfg, k, -1)), (swap_primitive(cfg, (j, k), s),)]
            for mask in range(1 << cfg.n):
                yield "I", head + _mask_steps(cfg, mask, e_sign)


def template_ii(cfg: DeviceConfig) -> Iterable[tuple[str, list[Step]]]:
    """[+j][-k] -- [s1 jm] -- [s2 jk] with the idle qubit halted, then a sz mask."""
    for j, k, m in permutations(range(cfg.n), 3):
        if cfg.coupler_index(j, m) is None or cfg.coupler_index(j, k) is None:
            continue
        e_sign = {j: -1, k: 1, m: 1}
        for s1, s2 in product((1, -1), repeat=2):
            head = [(phase_primitive(cfg, j, 1), phase_primitive(cfg, k, -1)),
                    (swap_primitive(cfg, (j, m), s1),), (swap_primitive(cfg, (j, k), s2),)]
            for mask in range(1 << cfg.n):
                yield "II", head + _mask_steps(cfg, mask, e_sign)


def template_iii(cfg: DeviceConfig) -> Iterable[tuple[str, list[Step]]]:
    """sz sz sz -- [s1 ca] -- [s2 cb] -- [s3 ca], then a sz mask."""
    for c, a, b in permutations(range(cfg.n), 3):
        if cfg.coupler_index(c, a) is None or cfg.coupler_index(c, b) is None:
            continue
        e_sign = {c: -1, a: 1, b: 1}
        prefix = _mask_steps(cfg, (1 << cfg.n) - 1, e_sign)
        for s1, s2, s3 in product((1, -1), repeat=3):
            head = prefix + [(swap_primitive(cfg, (c, a), s1),), (swap_primitive(cfg, (c, b), s2),),
                             (swap_primitive(cfg, (c, a), s3),)]
            for mask in range(1 << cfg.n):
                yield "III", head + _mask_steps(cfg, mask, e_sign)


TEMPLATES = {
    GateKind.BIPARTITE: template_i,
    GateKind.CLASS_II: template_ii,
    GateKind.CLASS_III: template_iii,
}


def _matches(n: int, steps: Sequence[Step], target: DiagonalGate) -> bool:
    ideal = target.diagonal() / np.sqrt(1 << n)
    # compare overlaps: the distance's square root would amplify rounding
    return 1.0 - abs(qcore.overlap(ideal, ideal_action(n, steps))) < EXACT_TOL


def candidate_sequences(cfg: DeviceConfig, target: DiagonalGate) -> list[list[Step]]:
    """Template variants whose ideal primitive algebra realizes the target exactly."""
    kind = (target.gate_class or classify_gate(target)).kind
    if kind not in TEMPLATES:
        raise NoTemplateMatch(f"no sequence template for {kind.value}")
    return [steps for _, steps in TEMPLATES[kind](cfg) if _matches(cfg.n, steps, target)]


def _separable_steps(cfg: DeviceConfig, target: DiagonalGate) -> list[Step]:
    spectrum = walsh_spectrum(target.signs)
    support = int(np.argmax(np.abs(spectrum)))
    if support == 0:
        return [tuple(identity_primitive(cfg, q) for q in range(cfg.n))]
    return _mask_steps(cfg, support, {})


def _schedule_label(kind: str, steps: Sequence[Step]) -> str:
    return f"{kind}: " + " -- ".join(step_label(s) for s in steps)


def compile_uf(d: DiagonalGate, mode: CompileMode = CompileMode.SEQUENCE,
               device: DeviceConfig | None = None) -> CompiledGate:
    """Compile an oracle gate and verify it on the DJ input before release."""
    mode = CompileMode(mode)
    gate_class = d.gate_class or classify_gate(d)
    device = device or DeviceConfig.default(d.n)
    if device.n != d.n:
        raise NoTemplateMatch(f"gate on {d.n} qubits, device has {device.n}")
    if mode is CompileMode.SINGLE_SHOT:
        return single_shot_schedule(d, device=device)

    if gate_class.kind in (GateKind.CONSTANT_IDENTITY, GateKind.SEPARABLE):
        steps = _separable_steps(device, d)
        sched = build_schedule(device, steps, mode, _schedule_label(gate_class.kind.value, steps))
        dist, a00 = verify_schedule(sched, d, device)
        return CompiledGate(d, sched, mode, a00, dist, sched.label)

    _check_target(d)
    best: tuple[tuple[float, float, float], CompiledGate] | None = None
    for steps in candidate_sequences(device, d):
        sched = build_schedule(device, steps, mode, _schedule_label(gate_class.kind.value, steps))
        dist, a00 = verify_schedule(sched, d, device)
        key = (round(a00, 12), round(dist, 12), sched.total_duration)
        if best is None or key < best[0]:
            best = (key, CompiledGate(d, sched, mode, a00, dist, sched.label))
    if best is None or best[1].verified_residual >= RESIDUAL_BOUND:
        raise NoTemplateMatch(f"no template variant realizes {d.text} with residual < {RESIDUAL_BOUND}")
    return best[1]


@dataclass(frozen=True)
class SingleShotSetting:
    e_j: tuple[float, float, float]
    j_k: tuple[float, float, float]
    duration: float
    # sign pattern realized approximately by the setting
    pattern: str


SINGLE_SHOT = {
    GateKind.CLASS_II: SingleShotSetting((-0.5, 0.0, 0.5), (1.0, 1.0, 0.0), 0.80, "+---+-++"),
    GateKind.CLASS_III: SingleShotSetting((0.5, -0.5, 0.83), (0.0, 1.0, 1.0), 1.19, "+-++--+-"),
}


def transform_setting(cfg: DeviceConfig, e_j: Sequence[float], j_k: Sequence[float],
                      perm: Sequence[int], flip_mask: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Move a control setting by a qubit relabeling, then flip qubits in ``flip_mask``.

    Flipping qubit q conjugates with charge sz_q, which negates its e_j and
    every j_k touching it, and permutes +- labels by x -> x ^ e_q.
    """
    n = cfg.n
    new_ej = [0.0] * n
    new_jk = [0.0] * len(cfg.couplers)
    for q in range(n):
        new_ej[perm[q]] = e_j[q]
    for c, (a, b) in enumerate(cfg.coupler_pairs):
        target = cfg.coupler_index(perm[a], perm[b])
        if target is None:
            if j_k[c]:
                raise NonAdjacentPair(f"relabeling moves coupler {c + 1} off the topology")
            continue
        new_jk[target] = j_k[c]
    for q in range(n):
        if (flip_mask >> (n - 1 - q)) & 1:
            new_ej[q] = -new_ej[q]
            for c in cfg.neighbours(q):
                new_jk[c] = -new_jk[c]
    return tuple(new_ej), tuple(new_jk)


def single_shot_variants(d: DiagonalGate, device: DeviceConfig) -> list[ControlSegment]:
    from .ideal import text_to_signs

    gate_class = d.gate_class or classify_gate(d)
    if gate_class.kind not in SINGLE_SHOT or d.n != 3 or device.topology != "ring":
        raise NoTemplateMatch(f"single-shot operations exist for ClassII/ClassIII on a 3-ring, got {gate_class}")
    setting = SINGLE_SHOT[gate_class.kind]
    base = text_to_signs(setting.pattern)
    target = _gauge(d.signs)
    out: list[ControlSegment] = []
    seen: set[tuple] = set()
    for perm in permutations(range(3)):
        moved = _permute(base, 3, perm)
        for mask in range(8):
            if _gauge(_flip(moved, mask)) != target:
                continue
            e_j, j_k = transform_setting(device, setting.e_j, setting.j_k, perm, mask)
            if (e_j, j_k) in seen:
                continue
            seen.add((e_j, j_k))
            out.append(ControlSegment(setting.duration, e_j, j_k))
    return out


def single_shot_schedule(d: DiagonalGate, device: DeviceConfig | None = None) -> CompiledGate:
    device = device or DeviceConfig.default(3)
    best: CompiledGate | None = None
    for seg in single_shot_variants(d, device):
        sched = PulseSchedule((seg,), label=f"single-shot {d.text}")
        dist, a00 = verify_schedule(sched, d, device)
        if best is None or (a00, dist) < (best.verified_residual, best.state_distance):
            best = CompiledGate(d, sched, CompileMode.SINGLE_SHOT, a00, dist, sched.label)
    if best is None:
        raise NoTemplateMatch(f"no single-shot relabeling realizes {d.text}")
    if best.verified_residual >= RESIDUAL_BOUND:
        raise NoTemplateMatch(f"single-shot residual {best.verified_residual:.3g} >= {RESIDUAL_BOUND}")
    return best


@dataclass(frozen=True)
class TableRow:
    """One realization listed in the junction-parameter table."""

    key: str
    gate: str
    implementation: str
    e_j: tuple[float, float, float]
    j_k: tuple[float, float, float]
    duration: float


TABLE_II = (
    TableRow("II-seq", "II", "sequence", (-1.0, 1.0, 1.0), (-1.0, 0.0, 1.0), SWAP_TIME),
    TableRow("II-single", "II", "single operation", (-0.5, 0.0, 0.5), (1.0, 1.0, 0.0), 0.80),
    TableRow("III-seq", "III", "sequence", (1.0, -1.0, 1.0), (1.0, 1.0, 0.0), SWAP_TIME),
    TableRow("III-single", "III", "single operation", (0.5, -0.5, 0.83), (0.0, 1.0, 1.0), 1.19),
)


def table_schedule(row: TableRow, duration: float | None = None, *,
                   e_j3: float | None = None) -> PulseSchedule:
    """Schedule for a junction-table row with perfect one-qubit rotations.

    ``duration`` overrides the two-qubit (or single-shot) time; ``e_j3``
    overrides the third junction of the single-shot III row.
    """
    t = row.duration if duration is None else duration
    if row.key == "II-seq":
        # [+1][-2] -- [+13] -- [-12]; qubit 2 halted in the first rotation, qubit 3 in the second
        ops = (IdealOp(0, phase_matrix(1), "[+1]"), IdealOp(1, phase_matrix(-1), "[-2]"))
        segs = (
            ControlSegment(t, (row.e_j[0], 0.0, row.e_j[2]), (0.0, 0.0, row.j_k[2]), ideal_ops=ops),
            ControlSegment(t, (row.e_j[0], row.e_j[1], 0.0), (row.j_k[0], 0.0, 0.0)),
        )
    elif row.key == "III-seq":
        # sz sz sz -- [+12] -- [+23] -- [+12]
        ops = tuple(IdealOp(q, qcore.SZ, f"sz{q + 1}") for q in range(3))
        first = ControlSegment(t, (row.e_j[0], row.e_j[1], 0.0), (row.j_k[0], 0.0, 0.0))
        segs = (
            ControlSegment(t, first.e_j, first.j_k, ideal_ops=ops),
            ControlSegment(t, (0.0, row.e_j[1], row.e_j[2]), (0.0, row.j_k[1], 0.0)),
            first,
        )
    else:
        e_j = row.e_j if e_j3 is None else (row.e_j[0], row.e_j[1], e_j3)
        segs = (ControlSegment(t, e_j, row.j_k),)
    return PulseSchedule(segs, label=f"{row.gate} {row.implementation}")


TABLE_ROWS = {row.key: row for row in TABLE_II}
