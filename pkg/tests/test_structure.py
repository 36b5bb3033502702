import pytest

from fragile import catalog
from fragile.algebra import Ring
from fragile.constructions import canonical_u25, fano, wheel
from fragile.fragility import ClassId, in_class
from fragile.iso import find_isomorphism, isomorphic
from fragile.matroid import MatroidError, flats_mask, is_3connected, triangles
from fragile.structure import (
    Fan,
    WheelGlueSpec,
    consistent,
    core,
    covering_families,
    fan_lengthening_moves,
    fan_shortening_moves,
    fan_valid,
    find_fans,
    glue_wheels,
    gluing_family,
    gpc,
    glued_wheel,
    parse_glue,
)

H5, FANO = ClassId.H5_FRAGILE, ClassId.FANO_FRAGILE


@pytest.fixture(scope="module")
def fan_member():
    levels = catalog.enumerate_class(H5, 7)
    M = next(M for M in levels[7] if any(len(f) == 5 for f in find_fans(M)))
    return M, max(find_fans(M), key=len)


def test_fan_basics():
    f = Fan(("a", "b", "c", "d"), True)
    assert f.spokes == ("a", "c") and f.rims == ("b", "d")
    r = f.reversed()
    assert r.sequence == ("d", "c", "b", "a") and not r.first_triple_is_triangle
    assert f.canonical() == r.canonical()
    with pytest.raises(MatroidError):
        Fan(("a", "b"), True)
    with pytest.raises(MatroidError):
        Fan(("a", "b", "a"), True)


def test_wheel_fans():
    W, spokes, rims = wheel(4)
    f = Fan(("s0", "r0", "s1", "r1", "s2"), True)
    assert fan_valid(W, f) and fan_valid(W, f.reversed())
    assert not fan_valid(W, Fan(("s0", "r0", "s1", "r1", "s2"), False))
    assert all(len(f) == 3 for f in find_fans(fano()))  # no triads


def test_consistent():
    assert consistent("ac", "abc") and consistent("ca", "abc")
    assert not consistent("acb", "abc")


def test_shortening_inverts_lengthening(fan_member):
    M, f = fan_member
    moves = fan_lengthening_moves(M, f, H5)
    assert moves
    for K, g in moves:
        assert fan_valid(K, g) and in_class(K, H5) and is_3connected(K)
        assert consistent(f.sequence, g.sequence)
        back = [N for N, h in fan_shortening_moves(K, g) if h.sequence == f.sequence or h.reversed().sequence == f.sequence]
        assert any(find_isomorphism(N, M, fixed=M.labels) is not None for N in back)


def test_shortening_of_lengthened_fan_is_covering(fan_member):
    M, f = fan_member
    K, g = fan_lengthening_moves(M, f, H5)[0]
    fams = covering_families(K, M, [f])
    assert any(fam.fans[0] == g.canonical() or fam.fans[0] == g for fam in fams)


def _flats(M):
    fl = flats_mask(M.table, M.n)
    return {M.subset(m) for m in range(1 << M.n) if fl[m]}


def _gpc_flat_oracle(M1, M2, G):
    E1, E2 = set(M1.labels), set(M2.labels)
    out = set()
    for m in range(1 << G.n):
        X = G.subset(m)
        if M1.closure(X & E1) == X & E1 and M2.closure(X & E2) == X & E2:
            out.add(X)
    return out


@pytest.mark.parametrize("base,ring", [("fano", Ring.GF2), ("u25", Ring.GF5x6)])
@pytest.mark.parametrize("k", [3, 4])
def test_gpc_flats(base, ring, k):
    N = fano() if base == "fano" else canonical_u25()
    T = tuple(sorted(triangles(N)[0], key=N.index))
    W = glued_wheel(k, T, "1", ring)
    G = gpc(N, W, T)
    assert G.n == N.n + 2 * k - 3 and G.r == N.r + k - 2
    assert _flats(G) == _gpc_flat_oracle(N, W, G)


def test_gpc_errors():
    F = fano()
    with pytest.raises(MatroidError):
        gpc(F, canonical_u25(), ("a", "b", "c"))
    W = glued_wheel(3, ("0", "1", "2"), "1", Ring.GF2)
    with pytest.raises(MatroidError):
        gpc(F, W, ("0", "1", "2"))  # not a triangle of F


def test_glue_spec_validation():
    with pytest.raises(MatroidError):
        WheelGlueSpec([("a", "b", "c")], [3, 4])
    with pytest.raises(MatroidError):
        WheelGlueSpec([("a", "b", "c")], [3])  # middle kept
    with pytest.raises(MatroidError):
        WheelGlueSpec([("a", "b", "c")], [1], {"b"})
    with pytest.raises(MatroidError):
        WheelGlueSpec([("a", "b", "c")], [3], {"z"})
    assert parse_glue("U25:(a,c,b):3") == ("U25", ("a", "c", "b"), 3)
    with pytest.raises(MatroidError):
        parse_glue("U25:a,c,b:3")


def test_glue_wheels_to_q6():
    U = canonical_u25()
    fam = gluing_family(U, [("a", "c", "b")], 6, max_rank=3)
    assert any(isomorphic(M, catalog.named("Q6").matroid) for M in fam)
    M = glue_wheels(U, WheelGlueSpec([("a", "c", "b")], [3], {"c"}))
    assert M.n == 7 and in_class(M, H5)
    assert isomorphic(M.delete(["a"]), catalog.named("Q6").matroid)


def test_core_of_n11_plus_is_n11():
    P = catalog.named("N11+").matroid
    N11 = catalog.named("N11").matroid
    fans = [f for f in find_fans(P) if len(f) == 4]
    cores = []
    for f in fans:
        try:
            cores.append(core(P, [f]))
        except MatroidError:
            continue
    assert any(isomorphic(K, N11) for K in cores)
    with pytest.raises(MatroidError):
        core(P, [fans[0], fans[0]])
