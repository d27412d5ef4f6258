import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcmdpc.gf2_ring import (
    DimensionError,
    NotInvertible,
    RingElement,
    SparseIndices,
    add,
    densify,
    invert,
    mul,
    mul_schoolbook,
    mul_sparse,
    sparsify,
    transpose_conjugate,
    weight,
)


def poly(r, *exps):
    return RingElement.from_support(exps, r)


@st.composite
def elements(draw, sizes=(7, 31, 101), count=1):
    r = draw(st.sampled_from(sizes))
    out = [RingElement(r, draw(st.integers(0, (1 << r) - 1))) for _ in range(count)]
    return out[0] if count == 1 else out


def test_add_examples():
    a = poly(5, 0, 1)
    assert add(a, a) == RingElement.zero(5)
    assert add(a, RingElement.zero(5)) == a
    assert add(poly(5, 0, 1), poly(5, 0, 1, 2)) == poly(5, 2)


def test_mismatched_sizes():
    with pytest.raises(DimensionError):
        add(poly(5, 0), poly(7, 0))
    with pytest.raises(DimensionError):
        mul(poly(5, 0), poly(7, 0))
    with pytest.raises(DimensionError):
        mul_sparse(SparseIndices((0,), 5), poly(7, 0))


def test_mul_examples():
    # (1 + x)(1 + x + x^2) = 1 + x^3, worked out by hand
    assert mul_schoolbook(poly(5, 0, 1), poly(5, 0, 1, 2)) == poly(5, 0, 3)
    assert mul(poly(5, 0, 1), poly(5, 0, 1, 2)) == poly(5, 0, 3)
    a = poly(5, 1, 4)
    assert mul(a, RingElement.one(5)) == a
    for j, k in itertools.product(range(7), repeat=2):
        assert mul(poly(7, j), poly(7, k)) == poly(7, (j + k) % 7)


def test_mul_sparse_examples():
    rng = np.random.default_rng(0)
    b = RingElement.random(31, rng)
    assert mul_sparse(SparseIndices((), 31), b) == RingElement.zero(31)
    assert mul_sparse(SparseIndices((0,), 31), b) == b
    for _ in range(50):
        a = RingElement.random(31, rng)
        assert mul_sparse(sparsify(a), b) == mul_schoolbook(a, b)


def test_invert_examples():
    assert invert(RingElement.one(7)) == RingElement.one(7)
    for k in range(7):
        assert invert(poly(7, k)) == poly(7, (7 - k) % 7)
    with pytest.raises(NotInvertible):
        invert(poly(7, 0, 1))
    with pytest.raises(NotInvertible):
        invert(RingElement.zero(7))


def test_invert_brute_force_r7():
    r = 7
    everything = [RingElement(r, v) for v in range(1 << r)]
    # 1 + x + x^3 is one of the factors of x^7 - 1, so it has no inverse
    a = poly(7, 0, 1, 3)
    assert not [u for u in everything if mul_schoolbook(a, u) == RingElement.one(r)]
    with pytest.raises(NotInvertible):
        invert(a)
    b = poly(7, 0, 1, 2)
    found = [u for u in everything if mul_schoolbook(b, u) == RingElement.one(r)]
    assert len(found) == 1
    assert invert(b) == found[0]
    for x in everything:
        units = [u for u in everything if mul_schoolbook(x, u) == RingElement.one(r)]
        if units:
            assert invert(x) == units[0]
        else:
            with pytest.raises(NotInvertible):
                invert(x)


def test_transpose_conjugate_examples():
    assert transpose_conjugate(RingElement.one(5)) == RingElement.one(5)
    assert transpose_conjugate(poly(5, 1, 2)) == poly(5, 3, 4)
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = RingElement.random(31, rng)
        assert weight(transpose_conjugate(a)) == weight(a)


def test_weight_examples():
    assert weight(RingElement.zero(5)) == 0
    assert weight(poly(5, 0, 3)) == 2
    assert weight(RingElement(5, 0b11111)) == 5


def test_hex_layout():
    # coefficient 0 is the least significant bit of the first byte
    a = poly(12, 0, 9)
    assert a.hex() == "0102"
    assert RingElement.from_hex("0102", 12) == a
    with pytest.raises(DimensionError):
        RingElement.from_hex("01", 12)


@given(elements(count=3))
def test_ring_axioms(abc):
    a, b, c = abc
    assert mul(a, mul(b, c)) == mul(mul(a, b), c)
    assert mul(a, b) == mul(b, a)
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))


@given(elements(count=2))
def test_mul_matches_schoolbook(ab):
    a, b = ab
    assert mul(a, b) == mul_schoolbook(a, b)


@given(elements())
def test_invert_property(a):
    try:
        u = invert(a)
    except NotInvertible:
        return
    assert mul(a, u) == RingElement.one(a.r)


@given(elements())
def test_even_weight_never_invertible(a):
    if a.weight % 2 == 0:
        with pytest.raises(NotInvertible):
            invert(a)


@given(elements())
def test_transpose_conjugate_involution(a):
    t = transpose_conjugate(a)
    assert transpose_conjugate(t) == a
    assert weight(t) == weight(a)
    for i in range(a.r):
        assert t[(a.r - i) % a.r] == a[i]


@given(elements())
def test_sparse_roundtrip(a):
    s = sparsify(a)
    assert list(s.positions) == sorted(set(s.positions))
    assert densify(s) == a
    assert RingElement.from_array(a.to_array()) == a
    assert RingElement.from_hex(a.hex(), a.r) == a


def test_sparse_indices_validation():
    with pytest.raises(ValueError):
        SparseIndices((3, 1), 5)
    with pytest.raises(ValueError):
        SparseIndices((1, 1), 5)
    with pytest.raises(ValueError):
        SparseIndices((5,), 5)
