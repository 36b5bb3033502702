import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fragile.algebra import (
    NonInvertibleError,
    Ring,
    RingError,
    RingValue,
    allowed_cross_ratios,
    format_value,
    inverse,
    nullspace,
    parse_value,
    rank,
    ring_combine,
    tuple_permute,
)

V = lambda *d: RingValue.of(Ring.GF5x6, d)
digits6 = st.tuples(*[st.integers(0, 4)] * 6)
units6 = st.tuples(*[st.integers(1, 4)] * 6)


def test_identity_and_inverse_examples():
    x = V(2, 3, 4, 2, 3, 4)
    assert ring_combine(RingValue.one(Ring.GF5x6), x, "mul") == x
    assert ring_combine(V(2, 2, 3, 3, 4, 4), V(3, 3, 2, 2, 1, 1), "add") == RingValue.zero(Ring.GF5x6)
    with pytest.raises(NonInvertibleError):
        ring_combine(V(1, 1, 1, 1, 1, 1), V(2, 0, 1, 1, 1, 1), "div")


def test_tag_mismatch():
    with pytest.raises(RingError):
        ring_combine(RingValue.of(Ring.GF5, 1), RingValue.of(Ring.GF2, 1), "add")


def test_payload_validation():
    with pytest.raises(RingError):
        RingValue.of(Ring.GF5x6, (1, 2, 3))
    with pytest.raises(RingError):
        RingValue.of(Ring.GF5x6, (5, 0, 0, 0, 0, 0))
    assert RingValue.zero(Ring.GF5x6).digits == (0,) * 6
    assert RingValue.one(Ring.GF5x6).digits == (1,) * 6


def test_gf5_field_axioms_exhaustive():
    els = [RingValue.of(Ring.GF5, i) for i in range(5)]
    for a, b, c in itertools.product(els, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert a * b == b * a and a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        if b.payload:
            assert (a / b) * b == a


def test_gf2_arithmetic():
    one, zero = RingValue.one(Ring.GF2), RingValue.zero(Ring.GF2)
    assert one + one == zero and one * one == one


@given(digits6, digits6, digits6)
def test_product_ring_axioms(x, y, z):
    a, b, c = V(*x), V(*y), V(*z)
    assert (a + b) + c == a + (b + c) and a + b == b + a
    assert (a * b) * c == a * (b * c) and a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert (a - b) + b == a


@given(digits6, units6)
def test_division_roundtrip(x, y):
    a, b = V(*x), V(*y)
    assert (a / b) * b == a


def test_allowed_cross_ratios_oracle():
    oracle = {
        t
        for t in itertools.product(range(5), repeat=6)
        if all(t.count(d) == 2 for d in (2, 3, 4))
    }
    got = {v.digits for v in allowed_cross_ratios()}
    assert got == oracle and len(got) == 90
    assert (2, 2, 3, 3, 4, 4) in got and (2, 2, 2, 3, 3, 4) not in got
    assert (0,) * 6 not in got and (1,) * 6 not in got


def test_cross_ratios_permutation_closed():
    S = allowed_cross_ratios()
    for sigma in itertools.permutations(range(6)):
        assert {tuple_permute(x, sigma) for x in S} == S


def test_tuple_permute_examples():
    x = V(2, 3, 4, 2, 3, 4)
    assert tuple_permute(x, range(6)) == x
    assert tuple_permute(x, (1, 0, 2, 3, 4, 5)) == V(3, 2, 4, 2, 3, 4)
    with pytest.raises(RingError):
        tuple_permute(x, (0, 0, 1, 2, 3, 4))


@given(digits6)
def test_text_roundtrip(x):
    v = V(*x)
    assert parse_value(Ring.GF5x6, format_value(v)) == v
    assert format_value(V(2, 3, 4, 2, 3, 4)) == "2:3:4:2:3:4"


def _span_size(cols, p):
    """Number of vectors in the column span, by enumerating all combinations."""
    k = cols.shape[1]
    seen = set()
    for coeffs in itertools.product(range(p), repeat=k):
        seen.add(tuple((cols @ np.array(coeffs)) % p))
    return len(seen)


@given(st.integers(0, 10**6), st.sampled_from([2, 5]))
def test_rank_against_span_enumeration(seed, p):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, p, size=(3, 4))
    size = _span_size(A, p)
    assert p ** rank(A, p) == size


@given(st.integers(0, 10**6))
def test_nullspace_and_inverse(seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, 5, size=(3, 5))
    N = nullspace(A, 5)
    assert len(N) == 5 - rank(A, 5)
    for v in N:
        assert not ((A @ v) % 5).any()
    B = rng.integers(0, 5, size=(3, 3))
    if rank(B, 5) == 3:
        assert np.array_equal((B @ inverse(B, 5)) % 5, np.eye(3, dtype=np.int64))
    else:
        with pytest.raises(NonInvertibleError):
            inverse(B, 5)
