import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from cpbox import qcore
from cpbox.errors import DimMismatch, NonHermitianInput

from conftest import random_hermitian


def test_kron_identity_and_diagonals():
    assert np.array_equal(qcore.kron(qcore.I2, qcore.I2), np.eye(4))
    assert np.array_equal(qcore.kron(qcore.SZ, qcore.SZ), np.diag([1, -1, -1, 1]))


def test_kron_xx_maps_00_to_11():
    psi = qcore.apply(qcore.kron(qcore.SX, qcore.SX), qcore.basis_state(2, 0))
    assert np.allclose(psi, qcore.basis_state(2, 3))


def test_kron_entry_formula(rng):
    a = rng.normal(size=(2, 2)) + 0j
    b = rng.normal(size=(4, 4)) + 0j
    ab = qcore.kron(a, b)
    for i, j, k, l in [(0, 1, 2, 3), (1, 0, 3, 1), (1, 1, 0, 0)]:
        assert ab[i * 4 + k, j * 4 + l] == pytest.approx(a[i, j] * b[k, l])


def test_kron_rejects_non_square():
    with pytest.raises(DimMismatch):
        qcore.kron(np.ones((2, 3)), qcore.I2)


def test_kron_associative(rng):
    # integer entries keep every product exact
    a, b, c = (rng.integers(-5, 6, size=(2, 2)) for _ in range(3))
    assert np.array_equal(qcore.kron(qcore.kron(a, b), c), qcore.kron(a, qcore.kron(b, c)))


def test_evolve_zero_generator():
    assert np.allclose(qcore.evolve(np.zeros((4, 4)), 0.37), np.eye(4))


def test_evolve_half_period_flips_charge():
    # -(J/2) sx for t = pi/J, i.e. 0.5 in units of 2 pi / J
    u = qcore.evolve(-0.5 * qcore.SX, 0.5)
    assert np.allclose(u, 1j * qcore.SX)


def test_evolve_full_period_is_minus_identity():
    assert np.allclose(qcore.evolve(-0.5 * qcore.SX, 1.0), -np.eye(2))


def test_evolve_matches_expm(rng):
    h = random_hermitian(rng, 8)
    assert np.allclose(qcore.evolve(h, 0.3), scipy.linalg.expm(-2j * np.pi * 0.3 * h), atol=1e-10)


def test_evolve_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        qcore.evolve(np.array([[0, 1], [0, 0]]), 1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim_exp=st.integers(1, 4),
       t1=st.floats(-3, 3), t2=st.floats(-3, 3))
def test_evolve_group_laws(seed, dim_exp, t1, t2):
    h = random_hermitian(np.random.default_rng(seed), 1 << dim_exp)
    u1, u2 = qcore.evolve(h, t1), qcore.evolve(h, t2)
    assert np.allclose(u1 @ u2, qcore.evolve(h, t1 + t2), atol=1e-9)
    assert np.allclose(u1 @ qcore.evolve(h, -t1), np.eye(h.shape[0]), atol=1e-9)
    assert qcore.is_unitary(u1)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(-5, 5))
def test_apply_preserves_norm(seed, t):
    rng = np.random.default_rng(seed)
    psi = qcore.normalize(rng.normal(size=8) + 1j * rng.normal(size=8))
    out = qcore.apply(qcore.evolve(random_hermitian(rng, 8), t), psi)
    assert abs(np.linalg.norm(out) - 1) < 1e-10


def test_apply_examples():
    assert np.allclose(qcore.apply(qcore.SX, qcore.basis_state(1, 0)), qcore.basis_state(1, 1))
    assert np.allclose(qcore.apply(qcore.H1, qcore.basis_state(1, 0)), np.array([1, 1]) / np.sqrt(2))
    with pytest.raises(DimMismatch):
        qcore.apply(np.eye(4), qcore.basis_state(1, 0))


def test_apply_local_matches_embedded(rng):
    psi = qcore.normalize(rng.normal(size=8) + 0j)
    u = qcore.evolve(random_hermitian(rng, 2), 0.2)
    for q in range(3):
        assert np.allclose(qcore.apply_local(u, q, psi), qcore.embed({q: u}, 3) @ psi)


def test_overlap_examples():
    s = qcore.normalize(np.array([1, 2j, -1, 0.5]))
    assert qcore.overlap(s, s) == pytest.approx(1)
    assert qcore.overlap(qcore.basis_state(1, 0), qcore.basis_state(1, 1)) == 0
    uniform = qcore.hadamard_all(qcore.basis_state(3, 0))
    assert qcore.overlap(qcore.basis_state(3, 0), uniform) == pytest.approx(8 ** -0.5)
    with pytest.raises(DimMismatch):
        qcore.overlap(qcore.basis_state(1, 0), qcore.basis_state(2, 0))


def test_phase_invariant_distance_examples():
    s = qcore.normalize(np.array([1, 1j, 2]))
    assert qcore.phase_invariant_distance(s, s) == pytest.approx(0, abs=1e-15)
    assert qcore.phase_invariant_distance(s, -1j * s) == pytest.approx(0, abs=1e-15)
    d = qcore.phase_invariant_distance(qcore.basis_state(1, 0), qcore.basis_state(1, 1))
    assert d == pytest.approx(np.sqrt(2))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_phase_invariant_distance_closed_form(seed):
    rng = np.random.default_rng(seed)
    a = qcore.normalize(rng.normal(size=4) + 1j * rng.normal(size=4))
    b = qcore.normalize(rng.normal(size=4) + 1j * rng.normal(size=4))
    expected = np.sqrt(max(0.0, 2 - 2 * abs(np.vdot(a, b))))
    assert qcore.phase_invariant_distance(a, b) == pytest.approx(expected, abs=1e-7)


def test_operator_phase_distance():
    assert qcore.operator_phase_distance(1j * qcore.SZ, qcore.SZ) == pytest.approx(0, abs=1e-9)
    # I vs Z: eigenvalues +1 and -1 of Z^dag I, best phase +-i gives sqrt(2)
    assert qcore.operator_phase_distance(qcore.I2, qcore.SZ) == pytest.approx(np.sqrt(2), abs=1e-9)


def test_n_qubits():
    assert qcore.n_qubits(8) == 3
    with pytest.raises(DimMismatch):
        qcore.n_qubits(6)
