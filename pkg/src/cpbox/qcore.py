"""Dense linear algebra on qubit registers.

States are 1-D complex arrays of length ``2**n`` and operators are square
complex arrays.  Qubit 0 is the most significant bit of a basis index, so
``kron(a, b)`` puts ``a`` on qubit 0 and ``b`` on qubit 1.

Units: hbar = 1, energies in units of the reference Josephson energy J and
times in units of 2*pi/J.  ``evolve(h, t)`` therefore computes
``exp(-2j*pi*h*t)``.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable

import numpy as np

from .errors import DimMismatch, NonHermitianInput

HERMITIAN_ATOL = 1e-12
UNITARY_ATOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
# SP = |0><1| with SZ|0> = +|0>
SP = (SX + 1j * SY) / 2
SM = (SX - 1j * SY) / 2
H1 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def n_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise DimMismatch(f"dimension {dim} is not a power of two")
    return n


def basis_state(n: int, index: int = 0) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[index] = 1.0
    return psi


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return psi / np.linalg.norm(psi)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product with ``a`` on the more significant qubits."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
        raise DimMismatch("kron expects square operands")
    return np.kron(a, b)


def kron_all(ops: Iterable[np.ndarray]) -> np.ndarray:
    return reduce(kron, ops)


def embed(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    """Place single-qubit operators on the given qubits, identity elsewhere."""
    return kron_all(ops.get(q, I2) for q in range(n))


def is_hermitian(h: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    h = np.asarray(h)
    return h.ndim == 2 and h.shape[0] == h.shape[1] and np.allclose(h, h.conj().T, rtol=0, atol=atol)


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=atol)


def evolve(h: np.ndarray, t: float) -> np.ndarray:
    """Propagator ``exp(-i h t)`` with ``t`` in units of 2*pi/J.

    Uses the eigendecomposition of the Hermitian generator, so the result is
    unitary to rounding.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise NonHermitianInput("generator is not Hermitian within 1e-12")
    w, v = np.linalg.eigh(h)
    phases = np.exp(-2j * np.pi * t * w)
    return (v * phases) @ v.conj().T


def apply(u: np.ndarray, psi: np.ndarray) -> np.ndarray:
    u = np.asarray(u)
    psi = np.asarray(psi)
    if u.ndim != 2 or u.shape[1] != psi.shape[0]:
        raise DimMismatch(f"operator {u.shape} cannot act on state of length {psi.shape[0]}")
    return u @ psi


def apply_local(u: np.ndarray, qubit: int, psi: np.ndarray) -> np.ndarray:
    """Apply a 2x2 operator to one qubit without forming the full matrix."""
    n = n_qubits(psi.shape[0])
    if not 0 <= qubit < n:
        raise DimMismatch(f"qubit {qubit} outside register of {n}")
    t = np.asarray(psi, dtype=complex).reshape((2,) * n)
    t = np.moveaxis(np.tensordot(u, t, axes=([1], [qubit])), 0, qubit)
    return t.reshape(-1)


def hadamard_all(psi: np.ndarray) -> np.ndarray:
    for q in range(n_qubits(psi.shape[0])):
        psi = apply_local(H1, q, psi)
    return psi


def _check_pair(a: np.ndarray, b: np.ndarray) -> None:
    if np.shape(a) != np.shape(b):
        raise DimMismatch(f"state shapes differ: {np.shape(a)} vs {np.shape(b)}")


def overlap(a: np.ndarray, b: np.ndarray) -> complex:
    """Inner product <a|b> (conjugate-linear in ``a``)."""
    _check_pair(a, b)
    return complex(np.vdot(a, b))


def phase_invariant_distance(a: np.ndarray, b: np.ndarray) -> float:
    """min over phi of ||a - exp(i phi) b||, equal to sqrt(2 - 2|<a|b>|) for unit vectors."""
    _check_pair(a, b)
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ov = np.vdot(b, a)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    # the direct norm avoids the cancellation in sqrt(2 - 2|<a|b>|)
    return float(np.linalg.norm(a - phase * b))


def operator_phase_distance(u: np.ndarray, v: np.ndarray, samples: int = 4096) -> float:
    """Spectral-norm distance min over phi of ||u - exp(i phi) v||.

    For unitaries this is max_k |lambda_k - exp(i phi)| over the eigenvalues
    of v^dag u, minimised by a coarse scan followed by bounded refinement.
    """
    from scipy.optimize import minimize_scalar

    lam = np.linalg.eigvals(np.asarray(v).conj().T @ np.asarray(u))

    def cost(phi: float) -> float:
        return float(np.max(np.abs(lam - np.exp(1j * phi))))

    grid = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    vals = [cost(p) for p in grid]
    k = int(np.argmin(vals))
    step = grid[1] - grid[0]
    res = minimize_scalar(cost, bounds=(grid[k] - step, grid[k] + step), method="bounded",
                          options={"xatol": 1e-12})
    return min(float(res.fun), vals[k])
