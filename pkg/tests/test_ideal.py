import json
from collections import Counter

import numpy as np
import pytest

from cpbox import qcore
from cpbox.errors import NonCanonical, UnclassifiableInput
from cpbox.ideal import (
    EXAMPLE_I,
    EXAMPLE_II,
    EXAMPLE_III,
    DiagonalGate,
    GateKind,
    class_ii_orbit,
    class_iii_orbit,
    classify_gate,
    dj_ideal_amplitude,
    hadamard_n,
    text_to_signs,
    ua_gate,
    uf_gate,
    walsh_spectrum,
)
from cpbox.oracles import BooleanFunction, BVFunction, enumerate_balanced, enumerate_canonical


def anf(f):
    """Algebraic normal form by the binary Moebius transform: monomial masks with coefficient 1."""
    coeffs = f.outputs()
    n = f.n
    for i in range(n):
        step = 1 << i
        for x in range(f.size):
            if x & step:
                coeffs[x] ^= coeffs[x ^ step]
    return {m for m, c in enumerate(coeffs) if c}


def anf_class(f):
    quadratic = [m for m in anf(f) if bin(m).count("1") == 2]
    return {0: GateKind.SEPARABLE, 1: GateKind.BIPARTITE, 2: GateKind.CLASS_II, 3: GateKind.CLASS_III}[len(quadratic)]


def test_hadamard_examples():
    assert np.allclose(hadamard_n(1), qcore.H1)
    h2 = hadamard_n(2)
    assert h2[3, 3] == pytest.approx(0.5)
    for n in (1, 2, 3, 4):
        h = hadamard_n(n)
        assert np.allclose(h @ h, np.eye(1 << n), atol=1e-12)
        assert np.allclose(h, qcore.kron_all([qcore.H1] * n))


def test_uf_gate_examples():
    g = uf_gate(BooleanFunction(3, 0))
    assert g.signs == (1,) * 8 and g.gate_class.kind is GateKind.CONSTANT_IDENTITY
    x1 = BooleanFunction(3, sum(1 << x for x in range(8) if x & 4))
    g = uf_gate(x1)
    assert np.allclose(g.operator(), qcore.embed({0: qcore.SZ}, 3))
    assert g.gate_class.kind is GateKind.SEPARABLE
    assert EXAMPLE_III == text_to_signs("+-++--+-")
    f3 = BooleanFunction.from_outputs([(1 - s) // 2 for s in EXAMPLE_III])
    assert uf_gate(f3).gate_class.kind is GateKind.CLASS_III
    with pytest.raises(NonCanonical):
        uf_gate(BooleanFunction(3, 0xFF))


def test_example_patterns_from_operators():
    z = [qcore.embed({q: qcore.SZ}, 3) for q in range(3)]
    ident = np.eye(8)
    op_i = 0.5 * (ident + z[0] - z[1] + z[0] @ z[1]) @ z[2]
    op_ii = 0.5 * (z[0] - z[2] + z[0] @ z[1] + z[1] @ z[2])
    op_iii = 0.5 * (z[0] - z[1] + z[2] + z[0] @ z[1] @ z[2])
    for op, signs in ((op_i, EXAMPLE_I), (op_ii, EXAMPLE_II), (op_iii, EXAMPLE_III)):
        assert np.allclose(op, np.diag(signs))
    assert np.allclose(op_i, np.kron(np.diag([1, 1, -1, 1]), qcore.SZ))


def test_census_matches_anf_oracle():
    counts = Counter()
    for f in enumerate_balanced(3):
        kind = classify_gate(DiagonalGate(3, uf_gate(f).signs)).kind
        assert kind is anf_class(f), f.hex()
        counts[kind] += 1
    assert counts == {GateKind.SEPARABLE: 7, GateKind.BIPARTITE: 12, GateKind.CLASS_II: 12, GateKind.CLASS_III: 4}


def test_orbit_sizes():
    assert len(class_ii_orbit()) == 12
    assert len(class_iii_orbit()) == 4
    entangling = {uf_gate(f).signs for f in enumerate_balanced(3) if anf_class(f) is GateKind.CLASS_II}
    assert class_ii_orbit() == entangling


def test_example_classes():
    g1 = classify_gate(DiagonalGate(3, EXAMPLE_I))
    assert g1.kind is GateKind.BIPARTITE and g1.split == 2 and g1.spectator is None
    assert classify_gate(DiagonalGate(3, EXAMPLE_II)).kind is GateKind.CLASS_II


def test_bipartite_split_qubit():
    # x1 x2 xor x3: the third qubit splits off with a sz factor
    outputs = [((x >> 2) & (x >> 1) & 1) ^ (x & 1) for x in range(8)]
    c = uf_gate(BooleanFunction.from_outputs(outputs)).gate_class
    assert c.kind is GateKind.BIPARTITE and c.split == 2 and c.spectator is None


def test_balanced_bipartite_gates_have_no_spectator():
    # a balanced two-bit part would be affine, so the split qubit always carries sz
    for f in enumerate_balanced(3):
        c = uf_gate(f).gate_class
        if c.kind is GateKind.BIPARTITE:
            assert c.split is not None and c.spectator is None
            assert sum(1 for m in anf(f) if m == 1 << (2 - c.split)) == 1


def test_unclassifiable():
    with pytest.raises(UnclassifiableInput):
        classify_gate(DiagonalGate(3, (1, -1, 1, 1, 1, 1, 1, 1)))


@pytest.mark.parametrize("f", [f for f in enumerate_balanced(3)], ids=lambda f: f.hex())
def test_entangling_walsh_structure(f):
    g = uf_gate(f)
    spectrum = walsh_spectrum(g.signs)
    nonzero = np.abs(spectrum)[np.abs(spectrum) > 1e-12]
    if g.gate_class.kind in (GateKind.CLASS_II, GateKind.CLASS_III):
        assert len(nonzero) == 4 and np.allclose(nonzero, 0.5)


def test_walsh_reconstructs_signs(rng):
    signs = tuple(rng.choice([-1, 1], size=16))
    c = walsh_spectrum(signs)
    z = [qcore.embed({q: qcore.SZ}, 4).diagonal().real for q in range(4)]
    rebuilt = np.zeros(16)
    for s in range(16):
        term = np.ones(16)
        for q in range(4):
            if (s >> (3 - q)) & 1:
                term = term * z[q]
        rebuilt += c[s] * term
    assert np.allclose(rebuilt, signs)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dj_pipeline_amplitude(n):
    h = hadamard_n(n)
    for f in enumerate_canonical(n):
        psi = h @ uf_gate(f).operator() @ h @ qcore.basis_state(n, 0)
        assert abs(psi[0] - dj_ideal_amplitude(f)) < 1e-12


def test_dj_ideal_amplitude_examples():
    assert dj_ideal_amplitude(BooleanFunction(3, 0)) == 1
    assert all(dj_ideal_amplitude(f) == 0 for f in enumerate_balanced(3))
    three_ones = BooleanFunction(3, 0b00010110)
    assert dj_ideal_amplitude(three_ones) == pytest.approx(0.25)


def test_ua_gate_examples():
    fz = ua_gate(BVFunction(3, 0, 0))
    assert fz.z_qubits == () and fz.sign == 1
    assert np.allclose(fz.operator(), np.eye(8))
    f = ua_gate(BVFunction(3, 0b101, 0))
    assert np.allclose(f.operator(), qcore.kron_all([qcore.SZ, qcore.I2, qcore.SZ]))
    g = ua_gate(BVFunction(3, 0b010, 1))
    assert np.allclose(g.operator(), -qcore.embed({1: qcore.SZ}, 3))
    assert np.allclose(g.gate.operator(), g.operator())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bv_pipeline_recovers_mask(n):
    h = hadamard_n(n)
    for a in range(1 << n):
        for b in (0, 1):
            psi = h @ ua_gate(BVFunction(n, a, b)).gate.operator() @ h @ qcore.basis_state(n, 0)
            assert abs(abs(psi[a]) - 1) < 1e-12


def test_gate_json():
    g = uf_gate(BooleanFunction.from_outputs([(1 - s) // 2 for s in EXAMPLE_III]))
    d = g.to_dict()
    assert d == {"n": 3, "signs": "+-++--+-", "class": "ClassIII"}
    assert DiagonalGate.from_dict(json.loads(json.dumps(d))) == g
