import itertools

import pytest

from fragile.algebra import Ring
from fragile.constructions import canonical_u25, fano, r10, uniform, wheel
from fragile.fragility import (
    ClassId,
    class_fragile,
    coextensions,
    extensions,
    find_minor,
    grow,
    has_minor,
    in_class,
    inequivalent_projection_count,
    is_fragile,
    is_strictly_fragile,
    is_valid_product_rep,
    targets,
    whirl,
)
from fragile.iso import isomorphic
from fragile.matroid import MatroidError, is_3connected

H5, FANO = ClassId.H5_FRAGILE, ClassId.FANO_FRAGILE


def _brute_has_minor(M, N):
    # every (contract, delete) split of the right sizes
    labels = M.labels
    k = M.n - N.n
    for drop in itertools.combinations(labels, k):
        for j in range(k + 1):
            for C in itertools.combinations(drop, j):
                D = set(drop) - set(C)
                K = M.minor(contract=C, delete=D)
                if K.r == N.r and isomorphic(K, N):
                    return True
    return False


def test_minor_tests_agree_with_brute_force():
    u24, u25, u35 = uniform(2, 4), uniform(2, 5), uniform(3, 5)
    F = fano()
    assert not has_minor(F, u24)
    W, _, _ = wheel(4)
    for M in [uniform(2, 6), uniform(3, 6), uniform(4, 6), W.dual()]:
        for N in [u24, u25, u35]:
            if M.ring is N.ring:
                assert has_minor(M, N) == _brute_has_minor(M, N)
    assert has_minor(r10().delete(["0"]).contract(["1"]), u24) is False


def test_find_minor_witness():
    U = uniform(3, 6)
    C, D = find_minor(U, uniform(2, 4))
    assert isomorphic(U.minor(contract=C, delete=D), uniform(2, 4))


def test_u36_not_fragile():
    U = uniform(3, 6, Ring.GF5x6)
    assert not is_fragile(U, targets(H5))
    assert not in_class(U, H5)
    for r in (2, 4):
        assert in_class(uniform(r, 6, Ring.GF5x6), H5)


def test_fragility_is_dual_invariant():
    for M in [uniform(2, 6, Ring.GF5x6), uniform(3, 6, Ring.GF5x6), canonical_u25()]:
        assert is_fragile(M, targets(H5)) == is_fragile(M.dual(), targets(H5))
    F = fano()
    assert is_strictly_fragile(F, targets(FANO)) and is_strictly_fragile(F.dual(), targets(FANO))


def test_table_and_generic_fragility_agree():
    for M in [uniform(2, 6), uniform(3, 6), uniform(4, 6)]:
        generic = all(
            not (_brute_has_minor(M.delete([x]), uniform(2, 5)) or _brute_has_minor(M.delete([x]), uniform(3, 5)))
            or not (_brute_has_minor(M.contract([x]), uniform(2, 5)) or _brute_has_minor(M.contract([x]), uniform(3, 5)))
            for x in M.labels
        )
        assert class_fragile(M, H5) == generic


def test_product_representations():
    U = canonical_u25()
    assert is_valid_product_rep(U)
    assert inequivalent_projection_count(U) == 6
    diag = uniform(2, 5, Ring.GF5).lift(Ring.GF5x6)
    assert is_valid_product_rep(diag)
    assert inequivalent_projection_count(diag) == 1
    assert not in_class(diag, H5)
    with pytest.raises(MatroidError):
        is_valid_product_rep(fano())


def test_r10_extensions_give_one_fano_fragile_matroid():
    ext = extensions(r10(), FANO)
    assert len(ext) == 1
    N11 = ext[0]
    assert N11.n == 11 and in_class(N11, FANO) and is_3connected(N11)


def test_extension_outputs_are_class_members():
    U = canonical_u25()
    for M in extensions(U, H5) + coextensions(U, H5):
        assert M.n == 6 and in_class(M, H5) and is_3connected(M)
        (new,) = set(M.labels) - set(U.labels)
        assert isomorphic(M.delete([new]), U) or isomorphic(M.contract([new]), U)


def test_coextensions_are_dual_extensions():
    U = canonical_u25()
    a = coextensions(U, H5)
    b = [M.dual() for M in extensions(U.dual(), H5)]
    assert len(a) == len(b)
    assert all(any(isomorphic(x, y) for y in b) for x in a)


def test_grow_small():
    U = canonical_u25()
    G = grow(U, 1, H5)
    # U26, P6, Q6; U46 has no U25 minor
    assert G[0] is U and len(G) == 1 + 3
    assert sorted(M.r for M in G[1:]) == [2, 3, 3]
    with pytest.raises(MatroidError):
        grow(U, -1, H5)
    W, _, _ = wheel(3)
    with pytest.raises(MatroidError):
        grow(W, 1, FANO)
    assert len(whirl(3).circuits()) > 0 and not isomorphic(whirl(3), uniform(3, 6))
