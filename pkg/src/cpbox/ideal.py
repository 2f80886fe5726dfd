"""Ideal oracle unitaries and the entanglement taxonomy of three-qubit gates.

Oracle gates are diagonal in the |+-> basis, so a gate is stored as its sign
vector indexed by +- labels (+ is bit 0, qubit 1 most significant).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Any

import numpy as np

from . import qcore
from .errors import NonCanonical, UnclassifiableInput
from .oracles import BooleanFunction, BVFunction, bv_table, parity


def hadamard_n(n: int) -> np.ndarray:
    """Normalized n-qubit Hadamard with entries 2^(-n/2) (-1)^(x.y)."""
    if n < 1:
        raise ValueError(f"need at least one qubit, got {n}")
    idx = np.arange(1 << n)
    dots = np.bitwise_and.outer(idx, idx)
    signs = np.array([1 - 2 * parity(int(v)) for v in dots.ravel()], dtype=float).reshape(dots.shape)
    return signs.astype(complex) / np.sqrt(1 << n)


class GateKind(str, enum.Enum):
    CONSTANT_IDENTITY = "ConstantIdentity"
    SEPARABLE = "Separable"
    BIPARTITE = "BipartiteEntangling"
    CLASS_II = "ClassII"
    CLASS_III = "ClassIII"


@dataclass(frozen=True)
class GateClass:
    """Entanglement class of an oracle gate.

    For bipartite gates ``split`` is the qubit whose one-qubit factor splits
    off, and ``spectator`` equals ``split`` only when that factor is the
    identity (the qubit is not touched at all).
    """

    kind: GateKind
    split: int | None = None
    spectator: int | None = None

    def __str__(self) -> str:
        if self.kind is GateKind.BIPARTITE:
            return f"{self.kind.value}(split={self.split}, spectator={self.spectator})"
        return self.kind.value


SEPARABLE_CLASS = GateClass(GateKind.SEPARABLE)
IDENTITY_CLASS = GateClass(GateKind.CONSTANT_IDENTITY)


def signs_to_text(signs: tuple[int, ...]) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


def text_to_signs(text: str) -> tuple[int, ...]:
    if set(text) - {"+", "-"}:
        raise ValueError(f"sign text may contain only '+' and '-': {text!r}")
    return tuple(1 if c == "+" else -1 for c in text)


@dataclass(frozen=True)
class DiagonalGate:
    n: int
    signs: tuple[int, ...]
    gate_class: GateClass | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))
        if len(self.signs) != 1 << self.n:
            raise ValueError(f"{len(self.signs)} signs for {self.n} qubits")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @property
    def text(self) -> str:
        return signs_to_text(self.signs)

    def diagonal(self) -> np.ndarray:
        return np.array(self.signs, dtype=complex)

    def operator(self) -> np.ndarray:
        """Dense matrix in the |+-> basis."""
        return np.diag(self.diagonal())

    def charge_operator(self) -> np.ndarray:
        h = hadamard_n(self.n)
        return h @ self.operator() @ h

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "signs": self.text,
                "class": None if self.gate_class is None else self.gate_class.kind.value}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DiagonalGate":
        signs = text_to_signs(data["signs"])
        n = int(data.get("n", len(signs).bit_length() - 1))
        gate = cls(n, signs)
        return cls(n, signs, _classify_or_none(gate))


def signs_of(f: BooleanFunction) -> tuple[int, ...]:
    return tuple(1 - 2 * f(x) for x in range(f.size))


def uf_gate(f: BooleanFunction) -> DiagonalGate:
    if not f.is_canonical:
        raise NonCanonical(f"f(0...0) = 1 for {f.hex()}; canonicalize first")
    gate = DiagonalGate(f.n, signs_of(f))
    return DiagonalGate(f.n, gate.signs, _classify_or_none(gate))


def _classify_or_none(gate: DiagonalGate) -> GateClass | None:
    try:
        return classify_gate(gate)
    except UnclassifiableInput:
        return None


@dataclass(frozen=True)
class BVFactorization:
    gate: DiagonalGate
    z_qubits: tuple[int, ...]
    sign: int

    def operator(self) -> np.ndarray:
        """Rebuild ``sign * prod_j sz_j`` in the |+-> basis."""
        ops = {q: qcore.SZ for q in self.z_qubits}
        return self.sign * qcore.embed(ops, self.gate.n)


def ua_gate(g: BVFunction) -> BVFactorization:
    """Gate ``(-1)^b prod_j sz_j^(a_j)`` together with its one-qubit factors."""
    table = bv_table(g)
    signs = signs_of(table)
    # the class depends only on a; the global sign is dropped for classification
    gate_class = SEPARABLE_CLASS if g.a else IDENTITY_CLASS
    z_qubits = tuple(j for j, bit in enumerate(g.bits()) if bit)
    return BVFactorization(DiagonalGate(g.n, signs, gate_class), z_qubits, -1 if g.b else 1)


def walsh_spectrum(signs: tuple[int, ...] | np.ndarray) -> np.ndarray:
    """Coefficients c_S = 2^-n sum_x s(x) (-1)^(S.x), so s = sum_S c_S Z^S."""
    v = np.asarray(signs, dtype=float).copy()
    h = 1
    while h < v.size:
        for i in range(0, v.size, 2 * h):
            a = v[i:i + h].copy()
            b = v[i + h:i + 2 * h].copy()
            v[i:i + h] = a + b
            v[i + h:i + 2 * h] = a - b
        h *= 2
    return v / v.size


def _is_separable(signs: tuple[int, ...]) -> bool:
    return int(np.count_nonzero(np.abs(walsh_spectrum(signs)) > 1e-9)) == 1


def _split_factor(signs: tuple[int, ...], n: int, q: int) -> tuple[int, ...] | None:
    """If s(x) = v(x_q) w(rest), return w over the remaining qubits."""
    bit = 1 << (n - 1 - q)
    ratio = {signs[x] * signs[x ^ bit] for x in range(len(signs))}
    if len(ratio) != 1:
        return None
    rest = []
    for x in range(len(signs)):
        if x & bit:
            continue
        rest.append(signs[x])
    first = rest[0]
    return tuple(s * first for s in rest)


def _permute(signs: tuple[int, ...], n: int, perm: tuple[int, ...]) -> tuple[int, ...]:
    """Relabel qubits: qubit q of the input becomes qubit perm[q]."""
    out = [0] * len(signs)
    for x, s in enumerate(signs):
        y = 0
        for q in range(n):
            if (x >> (n - 1 - q)) & 1:
                y |= 1 << (n - 1 - perm[q])
        out[y] = s
    return tuple(out)


def _flip(signs: tuple[int, ...], mask: int) -> tuple[int, ...]:
    return tuple(signs[x ^ mask] for x in range(len(signs)))


def _gauge(signs: tuple[int, ...]) -> tuple[int, ...]:
    return signs if signs[0] == 1 else tuple(-s for s in signs)


def orbit(signs: tuple[int, ...], n: int) -> frozenset[tuple[int, ...]]:
    """Images under qubit permutations and per-qubit flips, in the s(0) = +1 gauge."""
    out = set()
    for perm in permutations(range(n)):
        p = _permute(signs, n, perm)
        for mask in range(1 << n):
            out.add(_gauge(_flip(p, mask)))
    return frozenset(out)


def z_expansion(n: int, terms: dict[tuple[int, ...], float]) -> tuple[int, ...]:
    """Evaluate ``sum_S c_S prod_{q in S} z_q`` on every +- label, z = +1 for +."""
    out = []
    for x in range(1 << n):
        total = 0.0
        for qubits, c in terms.items():
            total += c * np.prod([1 - 2 * ((x >> (n - 1 - q)) & 1) for q in qubits])
        out.append(int(round(total)))
    return tuple(out)


# (1/2)(II + Z1 - Z2 + Z1Z2) x Z3
EXAMPLE_I = z_expansion(3, {(2,): 0.5, (0, 2): 0.5, (1, 2): -0.5, (0, 1, 2): 0.5})
# (1/2)(Z1 - Z3 + Z1Z2 + Z2Z3)
EXAMPLE_II = z_expansion(3, {(0,): 0.5, (2,): -0.5, (0, 1): 0.5, (1, 2): 0.5})
# (1/2)(Z1 - Z2 + Z3 + Z1Z2Z3)
EXAMPLE_III = z_expansion(3, {(0,): 0.5, (1,): -0.5, (2,): 0.5, (0, 1, 2): 0.5})


@lru_cache(maxsize=None)
def class_iii_orbit() -> frozenset[tuple[int, ...]]:
    members = orbit(EXAMPLE_III, 3)
    if len(members) != 4:
        raise AssertionError(f"class III orbit has {len(members)} members, expected 4")
    return members


@lru_cache(maxsize=None)
def class_ii_orbit() -> frozenset[tuple[int, ...]]:
    members = orbit(EXAMPLE_II, 3)
    if len(members) != 12:
        raise AssertionError(f"class II orbit has {len(members)} members, expected 12")
    return members


def classify_gate(d: DiagonalGate) -> GateClass:
    signs = _gauge(d.signs)
    n = d.n
    if all(s == 1 for s in signs):
        return IDENTITY_CLASS
    if sum(signs) != 0:
        raise UnclassifiableInput(f"sign pattern {signs_to_text(d.signs)} is neither constant nor balanced")
    if _is_separable(signs):
        return SEPARABLE_CLASS
    if n != 3:
        raise UnclassifiableInput(f"entangling classes are defined for three qubits only, got n = {n}")
    for q in range(n):
        rest = _split_factor(signs, n, q)
        if rest is not None and not _is_separable(rest):
            bit = 1 << (n - 1 - q)
            untouched = signs[0] == signs[bit]
            return GateClass(GateKind.BIPARTITE, split=q, spectator=q if untouched else None)
    if signs in class_iii_orbit():
        return GateClass(GateKind.CLASS_III)
    return GateClass(GateKind.CLASS_II)


def dj_ideal_amplitude(f: BooleanFunction) -> float:
    return sum(1 - 2 * f(x) for x in range(f.size)) / f.size
