import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpbox.errors import ArityTooLarge
from cpbox.oracles import (
    BooleanFunction,
    BVFunction,
    Classification,
    bv_table,
    canonicalize,
    classical_worst_case,
    classify,
    enumerate_balanced,
    enumerate_canonical,
)

PARITY3 = BooleanFunction(3, 0b10010110)


def test_classify_examples():
    assert classify(BooleanFunction(3, 0)) is Classification.CONSTANT
    assert classify(BooleanFunction(3, 0xFF)) is Classification.CONSTANT
    assert classify(PARITY3) is Classification.BALANCED
    assert classify(BooleanFunction(3, 0x01)) is Classification.NEITHER


def test_parity_table_by_evaluation():
    for x in range(8):
        assert PARITY3(x) == bin(x).count("1") % 2


def test_canonicalize_examples():
    assert canonicalize(BooleanFunction(3, 0xFF)) == BooleanFunction(3, 0)
    assert canonicalize(PARITY3) == PARITY3
    assert canonicalize(BooleanFunction(3, 0xFF ^ PARITY3.table)) == PARITY3


@given(n=st.integers(1, 6), data=st.data())
def test_canonicalize_idempotent(n, data):
    f = BooleanFunction(n, data.draw(st.integers(0, (1 << (1 << n)) - 1)))
    g = canonicalize(f)
    assert g.is_canonical and canonicalize(g) == g
    assert classify(g) is classify(f)


@pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 35), (4, 6435)])
def test_enumerate_balanced_counts(n, count):
    fs = enumerate_balanced(n)
    assert len(fs) == count
    assert len({f.table for f in fs}) == count
    assert all(f.is_canonical and classify(f) is Classification.BALANCED for f in fs)
    assert [f.table for f in fs] == sorted(f.table for f in fs)


def test_enumerate_canonical_starts_with_constant():
    fs = enumerate_canonical(3)
    assert len(fs) == 36 and fs[0].table == 0


def test_enumerate_too_large():
    with pytest.raises(ArityTooLarge):
        enumerate_balanced(5)


def test_bv_table():
    g = BVFunction(3, 0b101, 1)
    f = bv_table(g)
    for x in range(8):
        assert f(x) == (((x >> 2) & 1) ^ (x & 1) ^ 1)
    assert g.bits() == [1, 0, 1]


def test_serialization_roundtrip():
    f = BooleanFunction.parse("0x96", 3)
    assert f.to_dict() == {"n": 3, "table": "0x96"}
    assert BooleanFunction.from_dict(f.to_dict()) == f
    g = BVFunction(3, 0b010, 1)
    assert g.to_dict() == {"n": 3, "a": "0b010", "b": 1}
    assert BVFunction.from_dict({"a": "0b010", "b": 1}) == g
    assert BooleanFunction.from_outputs([0, 1, 1, 0]) == BooleanFunction(2, 0b0110)


def test_invalid_values():
    with pytest.raises(ValueError):
        BooleanFunction(2, 1 << 4)
    with pytest.raises(ValueError):
        BVFunction(2, 0b100)
    with pytest.raises(ValueError):
        BVFunction(2, 1, 2)


def test_classical_worst_case():
    assert classical_worst_case(3) == 5
