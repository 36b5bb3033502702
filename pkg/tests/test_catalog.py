import pytest

from fragile import catalog
from fragile.algebra import Ring
from fragile.constructions import fano
from fragile.fragility import ClassId, has_minor, in_class
from fragile.iso import dedup, index_of, isomorphic
from fragile.matroid import is_3connected, parallel_classes, simplify
from fragile.structure import core

H5 = ClassId.H5_FRAGILE

# frozen from a verified enumeration run
H5_COUNTS = {5: 2, 6: 4, 7: 4, 8: 8, 9: 20, 10: 44, 11: 106}
ROLES = {"M9_9": 0, "M9_18": 11, "M9_7": 2, "M9_15": 14, "M9_2": 5, "M9_1": 6, "M9_0": 9}
DUALS = {0: 10, 11: 3, 2: 13, 14: 4, 5: 16, 6: 17, 9: 19}
EXCLUDED = (1, 7, 8, 12, 15, 18)
SMALL = {"X8": (8, 6), "Y8": (8, 0), "Y8*": (8, 7), "M71": (7, 0), "M86": (8, 1), "M85": (8, 2)}


def test_explicit_names():
    for name in ("F7", "F7*", "R10", "U25", "U35", "U26", "U36", "U46", "P6", "Q6"):
        nm = catalog.named(name)
        assert nm.provenance is catalog.Provenance.EXPLICIT and all(ok for _, ok in nm.evidence)
    assert catalog.named("U25") is catalog.named("U25")
    with pytest.raises(KeyError):
        catalog.named("nope")


def test_named_matroid_rejects_false_evidence():
    with pytest.raises(catalog.MatroidError):
        catalog.NamedMatroid("F7", fano(), catalog.Provenance.EXPLICIT, (("bogus", False),))


def test_small_levels():
    levels = catalog.enumerate_class(H5, 8)
    assert {k: len(v) for k, v in levels.items()} == {k: H5_COUNTS[k] for k in range(5, 9)}
    six = levels[6]
    for name in ("U26", "U46", "P6", "Q6"):
        assert index_of(catalog.named(name).matroid, six) is not None
    assert index_of(catalog.named("U36").matroid, six) is None


def test_fano_names():
    N11 = catalog.named("N11").matroid
    assert (N11.n, N11.r) == (11, 5) and in_class(N11, ClassId.FANO_FRAGILE)
    P = catalog.named("N11+").matroid
    assert P.n == 12 and has_minor(P, N11)
    assert len(catalog.n12_candidates()) == 1
    N12 = catalog.named("N12").matroid
    assert (N12.n, N12.r) == (12, 6) and catalog._n12_predicate(N12)


def test_n12_core_is_fano_with_triple():
    N12 = catalog.named("N12").matroid
    fams = catalog.fan_families(N12, (4, 4, 4))
    assert fams
    K = core(N12, list(fams[0]))
    S, _ = simplify(K)
    assert [len(p) for p in parallel_classes(K) if len(p) > 1] == [3]
    assert isomorphic(S, fano())


@pytest.mark.slow
def test_catalog_counts_and_invariants(h5_levels):
    assert {k: len(v) for k, v in h5_levels.items()} == H5_COUNTS
    for k, level in h5_levels.items():
        assert len(dedup(level)) == len(level)
        if k <= 9:
            for M in level:
                assert M.ring is Ring.GF5x6 and is_3connected(M) and in_class(M, H5)
                assert index_of(M.dual(), level) is not None
        if k > 5:
            assert all(catalog.minor_links(H5, k))


@pytest.mark.slow
def test_role_table(roles):
    assert roles.roles == ROLES
    assert {i: roles.duals[i] for i in ROLES.values()} == DUALS
    assert tuple(sorted(roles.excluded)) == EXCLUDED
    assert {k: tuple(v) for k, v in roles.small.items()} == SMALL
    # single rules tie; the partition constraint settles them
    assert roles.ambiguous == {"M9_7": [2, 4, 5, 6, 9], "M9_15": [14, 16]}
    assigned = set(ROLES.values()) | set(DUALS.values()) | set(EXCLUDED)
    assert assigned == set(range(20))
    assert roles.context("M9_9") == set(EXCLUDED)
    assert roles.context("M9_7") == set(EXCLUDED) | {0, 10, 11, 3}
    # M9_(k+10) is the dual of M9_k
    assert roles.index("M9_19") == (9, 10) and roles.index("M9_17") == (9, 13)
    assert roles.index("M9_8") == (9, 3)  # M9_18 sits on the high-rank member
    with pytest.raises(KeyError):
        roles.index("M9_4")


@pytest.mark.slow
def test_m85_extensions(roles):
    L = catalog.catalog_levels(H5)
    _, i = roles.small["M85"]
    ups = {j for j in range(20) if i in catalog.minors_at(H5, 9, j, 8)}
    assert ups == {0, 1, 5, 7, 10, 12, 15, 16}
    assert isomorphic(catalog.named("M85").matroid, L[8][2])
