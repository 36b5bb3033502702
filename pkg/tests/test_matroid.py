import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fragile.algebra import Ring
from fragile.constructions import fano, uniform, wheel
from fragile.matroid import (
    LinearMatroid,
    MatroidError,
    cosimplify,
    from_matrix,
    is_3connected,
    is_3connected_up_to_sp,
    is_connected,
    loops,
    parallel_classes,
    simplify,
    triads,
    triangles,
)


def _span_rank(cols, p):
    # log_p of the number of distinct vectors in the span: independent of any elimination code
    if cols.shape[1] == 0:
        return 0
    seen = {tuple((cols @ np.array(c)) % p) for c in itertools.product(range(p), repeat=cols.shape[1])}
    return round(np.log(len(seen)) / np.log(p))


@st.composite
def small_matroids(draw, p=None):
    p = draw(st.sampled_from([2, 5])) if p is None else p
    r = draw(st.integers(1, 3))
    c = draw(st.integers(1, 7 - r if p == 5 else 8 - r))
    A = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    ring = Ring.GF2 if p == 2 else Ring.GF5
    return LinearMatroid(ring, np.array(A).reshape(r, c), [f"e{i}" for i in range(r + c)])


@given(small_matroids())
def test_rank_table_matches_span_oracle(M):
    full = M.full[0]
    for m in range(1 << M.n):
        idx = [e for e in range(M.n) if (m >> e) & 1]
        if len(idx) <= 3:
            assert M.rank_mask(m) == _span_rank(full[:, idx], M.p)


@given(small_matroids())
def test_rank_axioms(M):
    n, T = M.n, M.table
    for X in range(1 << n):
        assert 0 <= T[X] <= bin(X).count("1")
        for e in range(n):
            Y = X | (1 << e)
            assert T[X] <= T[Y] <= T[X] + 1
    rng = np.random.default_rng(n)
    for _ in range(200):
        X, Y = (int(v) for v in rng.integers(0, 1 << n, 2))
        assert T[X | Y] + T[X & Y] <= T[X] + T[Y]


@given(small_matroids())
def test_dual_involution_and_corank(M):
    D = M.dual()
    assert D.dual().same_matroid(M)
    assert D.r == M.n - M.r
    for m in range(1 << M.n):
        X = M.subset(m)
        assert D.rank(X) == len(X) + M.rank(M.ground - X) - M.r


@given(small_matroids(), st.data())
def test_minor_duality(M, data):
    e = data.draw(st.sampled_from(M.labels))
    assert M.delete([e]).dual().same_matroid(M.dual().contract([e]))
    assert M.contract([e]).dual().same_matroid(M.dual().delete([e]))


@given(small_matroids(), st.data())
def test_minor_ranks(M, data):
    e = data.draw(st.sampled_from(M.labels))
    C = M.contract([e])
    rest = [x for x in M.labels if x != e]
    for k in range(len(rest) + 1):
        for X in itertools.combinations(rest, k):
            assert C.rank(X) == M.rank(set(X) | {e}) - M.rank([e])
            assert M.delete([e]).rank(X) == M.rank(X)


@given(small_matroids())
def test_closure_idempotent(M):
    for m in range(0, 1 << M.n, 3):
        X = M.subset(m)
        cl = M.closure(X)
        assert X <= cl and M.closure(cl) == cl and M.rank(cl) == M.rank(X)


def test_fano_structure():
    F = fano()
    assert (F.r, F.n) == (3, 7)
    assert len(triangles(F)) == 7 and len(triads(F)) == 0
    assert len(F.circuits()) == 14
    assert is_3connected(F)
    assert F.closure(["0", "1"]) >= {"0", "1"} and len(F.closure(["0", "1"])) == 3


def test_uniform_and_connectivity():
    U = uniform(2, 5)
    assert is_3connected(U) and len(triangles(U)) == 10
    W, spokes, rims = wheel(4)
    assert is_3connected(W) and len(triangles(W)) == 4 and len(triads(W)) == 4
    assert not loops(U)


def test_simplify_cosimplify():
    U = uniform(2, 4)
    P = U.extend([1, 0], "x")  # parallel to the first basis element
    assert [c for c in parallel_classes(P) if len(c) > 1] == [["0", "x"]]
    S, _ = simplify(P)
    assert S.n == 4
    assert not is_3connected(P) and is_3connected_up_to_sp(P)
    Q = U.coextend([1, 0], "y")
    Cs, _ = cosimplify(Q)
    assert Cs.n == 4 and is_connected(Q)


def test_errors():
    with pytest.raises(MatroidError):
        LinearMatroid(Ring.GF2, [[1, 2]], ["a", "b", "c"])
    with pytest.raises(MatroidError):
        LinearMatroid(Ring.GF2, [[1, 1]], ["a", "a", "c"])
    with pytest.raises(MatroidError):
        fano().minor(contract=["0"], delete=["0"])
    with pytest.raises(MatroidError):
        fano().index("zz")


def test_from_matrix_and_standard_form():
    M = from_matrix(Ring.GF5, [[1, 2, 3], [0, 1, 4]], "abcde")
    assert M.r == 2 and M.rank(["a", "b"]) == 2
    assert M.labels[:2] == ("a", "b") and M.rank(["a", "c"]) == 1
