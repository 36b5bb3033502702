"""Minor tests, fragility, class membership and single-element growth.

Two classes are studied:

``FANO_FRAGILE``
    binary matroids that are strictly {F7, F7*}-fragile;
``H5_FRAGILE``
    strictly {U25, U35}-fragile matroids carrying a GF(5)^6 representation
    whose six coordinate projections define one matroid and are pairwise
    inequivalent.

Minor tests for the four target matroids avoid isomorphism testing
altogether.  A matroid has an F7-minor (binary case) iff some flat of rank
r-3 is covered by seven flats of rank r-2, and a U25-minor iff some flat of
rank r-2 is covered by five hyperplanes; the co-versions use the dual rank
table.
"""

from __future__ import annotations

import enum
import itertools
import logging
from typing import Callable, Optional, Sequence

import numpy as np

from . import algebra
from .algebra import Ring
from .constructions import _drop_rows, _incidence, fano, uniform, wheel, wheel_graph
from .iso import dedup, equivalence_classes, find_isomorphism, fingerprint
from .matroid import (
    LinearMatroid,
    MatroidError,
    circuits_from_table,
    connectivity_ok,
    dual_table,
    flats_mask,
    minor_table,
    popcounts,
    subset_index,
    table_for,
)

log = logging.getLogger(__name__)


class ClassId(enum.Enum):
    FANO_FRAGILE = "fano"
    H5_FRAGILE = "h5"

    @property
    def ring(self) -> Ring:
        return Ring.GF2 if self is ClassId.FANO_FRAGILE else Ring.GF5x6


# --- table-level minor tests ----------------------------------------------


def _max_covers(T: np.ndarray, n: int, k: int) -> int:
    """Largest number of points of a rank-k contraction M/F over flats F of rank r-k."""
    rk = int(T[-1])
    a = rk - k
    if a < 0:
        return 0
    idx = np.nonzero(flats_mask(T, n))[0]
    ranks = T[idx]
    Fs = idx[ranks == a]
    Gs = idx[ranks == a + 1]
    if Fs.size == 0 or Gs.size == 0:
        return 0
    inside = (Fs[:, None] & ~Gs[None, :]) == 0
    return int(inside.sum(axis=1).max())


def table_has_u25(T: np.ndarray, n: int) -> bool:
    return n >= 5 and int(T[-1]) >= 2 and _max_covers(T, n, 2) >= 5


def table_has_f7(T: np.ndarray, n: int) -> bool:
    """Binary matroids only: a simple rank-3 binary contraction with seven points is F7."""
    return n >= 7 and int(T[-1]) >= 3 and _max_covers(T, n, 3) >= 7


def _fano_family(T, n):
    return table_has_f7(T, n) or table_has_f7(dual_table(T, n), n)


def _h5_family(T, n):
    return table_has_u25(T, n) or table_has_u25(dual_table(T, n), n)


FAMILY_TEST = {ClassId.FANO_FRAGILE: _fano_family, ClassId.H5_FRAGILE: _h5_family}


def targets(c: ClassId) -> list[LinearMatroid]:
    if c is ClassId.FANO_FRAGILE:
        F = fano()
        return [F, F.dual()]
    return [uniform(2, 5, Ring.GF5), uniform(3, 5, Ring.GF5)]


# --- general minor testing -------------------------------------------------


def _fast_target(M: LinearMatroid, N: LinearMatroid) -> Optional[Callable]:
    u25, u35 = uniform(2, 5, Ring.GF5), uniform(3, 5, Ring.GF5)
    f7 = fano()
    if N.n == 5 and find_isomorphism(N, u25) is not None:
        return lambda T, n: table_has_u25(T, n)
    if N.n == 5 and find_isomorphism(N, u35) is not None:
        return lambda T, n: table_has_u25(dual_table(T, n), n)
    if M.ring is Ring.GF2 and N.n == 7:
        if find_isomorphism(N, f7) is not None:
            return lambda T, n: table_has_f7(T, n)
        if find_isomorphism(N, f7.dual()) is not None:
            return lambda T, n: table_has_f7(dual_table(T, n), n)
    return None


def has_minor(M: LinearMatroid, N: LinearMatroid) -> bool:
    """Whether some contraction-deletion of M is isomorphic to N."""
    if N.n > M.n or N.r > M.r or N.n - N.r > M.n - M.r:
        return False
    fast = _fast_target(M, N)
    if fast is not None:
        return bool(fast(M.table, M.n))
    return find_minor(M, N) is not None


def find_minor(M: LinearMatroid, N: LinearMatroid) -> Optional[tuple[frozenset, frozenset]]:
    """A (contract, delete) pair with M / contract \\ delete isomorphic to N, or None."""
    if N.n > M.n or N.r > M.r or N.n - N.r > M.n - M.r:
        return None
    T, n = M.table, M.n
    k = M.r - N.r
    target = fingerprint(N)
    target_circ = np.bincount(popcounts(N.n)[N.circuit_masks], minlength=N.n + 2)
    flats = np.nonzero(flats_mask(T, n))[0]
    for F in flats[T[flats] == k]:
        F = int(F)
        rest = [e for e in range(n) if not (F >> e) & 1]
        if len(rest) < N.n:
            continue
        for X in itertools.combinations(rest, N.n):
            xm = sum(1 << e for e in X)
            if T[xm | F] - k != N.r:
                continue
            sub = minor_table(T, n, F, ((1 << n) - 1) ^ F ^ xm)
            circ = circuits_from_table(sub, N.n)
            if not np.array_equal(np.bincount(popcounts(N.n)[circ], minlength=N.n + 2), target_circ):
                continue
            # basis of F to contract, remaining flat elements deleted
            basis = []
            for e in range(n):
                if (F >> e) & 1 and T[sum(1 << b for b in basis + [e])] == len(basis) + 1:
                    basis.append(e)
            C = [M.labels[e] for e in basis]
            D = [M.labels[e] for e in range(n) if not (xm >> e) & 1 and e not in basis]
            K = M.minor(contract=C, delete=D)
            if fingerprint(K) == target and find_isomorphism(K, N) is not None:
                return frozenset(C), frozenset(D)
    return None


def has_family_minor(M: LinearMatroid, family: Sequence[LinearMatroid]) -> bool:
    return any(has_minor(M, N) for N in family)


def _family_test(M: LinearMatroid, family: Sequence[LinearMatroid]):
    tests = [_fast_target(M, N) for N in family]
    if all(t is not None for t in tests):
        return lambda T, n: any(t(T, n) for t in tests)
    return None


def is_fragile(M: LinearMatroid, family: Sequence[LinearMatroid]) -> bool:
    """For every element, at most one of M\\e, M/e has a minor in the family."""
    if not family:
        raise MatroidError("family must be nonempty")
    test = _family_test(M, family)
    if test is not None:
        return _table_fragile(M.table, M.n, test)
    for x in M.labels:
        if has_family_minor(M.delete([x]), family) and has_family_minor(M.contract([x]), family):
            return False
    return True


def is_strictly_fragile(M: LinearMatroid, family: Sequence[LinearMatroid]) -> bool:
    return has_family_minor(M, family) and is_fragile(M, family)


def _table_fragile(T: np.ndarray, n: int, test, first: Sequence[int] = ()) -> bool:
    order = list(first) + [e for e in range(n) if e not in first]
    for e in order:
        bit = 1 << e
        idx = subset_index(n, bit)
        dele = T[idx]
        if not test(dele, n - 1):
            continue
        con = (T[idx | bit] - T[bit]).astype(np.int8)
        if test(con, n - 1):
            return False
    return True


def class_fragile(M: LinearMatroid, c: ClassId, first: Sequence[int] = ()) -> bool:
    """Strict fragility for the class family, via table tests."""
    test = FAMILY_TEST[c]
    return bool(test(M.table, M.n)) and _table_fragile(M.table, M.n, test, first)


# --- product-ring representations -----------------------------------------


def is_valid_product_rep(M: LinearMatroid) -> bool:
    """All six coordinate projections define the same matroid."""
    if M.ring is not Ring.GF5x6:
        raise MatroidError("is_valid_product_rep needs a GF(5)^6 matroid")
    T0 = M.table
    for i in range(1, 6):
        if not np.array_equal(T0, table_for(M.full[i], 5)):
            return False
    return True


def inequivalent_projection_count(M: LinearMatroid) -> int:
    if M.ring is not Ring.GF5x6:
        raise MatroidError("inequivalent_projection_count needs a GF(5)^6 matroid")
    return len(equivalence_classes([M.projection(i) for i in range(6)]))


def cross_ratios_admissible(M: LinearMatroid) -> bool:
    """Every 2x2 all-unit submatrix of [I|A] has cross ratio 1 or in the whitelist."""
    allowed = {v.digits for v in algebra.allowed_cross_ratios()}
    A = M.reduced  # (6, r, c)
    r, c = A.shape[1:]
    inv = algebra.INV[5]
    for i, k in itertools.combinations(range(r), 2):
        for j, l in itertools.combinations(range(c), 2):
            a, b, d, e = A[:, i, j], A[:, i, l], A[:, k, j], A[:, k, l]
            if not (a.all() and b.all() and d.all() and e.all()):
                continue
            cr = tuple(int(x) for x in (a * e * inv[b] * inv[d]) % 5)
            if cr != (1,) * 6 and cr not in allowed:
                return False
    return True


def in_class(M: LinearMatroid, c: ClassId) -> bool:
    if M.ring is not c.ring:
        return False
    if not class_fragile(M, c):
        return False
    if c is ClassId.H5_FRAGILE:
        return is_valid_product_rep(M) and inequivalent_projection_count(M) == 6
    return True


# --- extension enumeration -------------------------------------------------


def _fresh_label(M: LinearMatroid) -> str:
    nums = [int(x) for x in M.labels if x.lstrip("-").isdigit()]
    k = max(nums) + 1 if nums else 0
    while str(k) in M._index:
        k += 1
    return str(k)


def _hyperplane_normals(M: LinearMatroid, coord: int) -> np.ndarray:
    T = M.table
    idx = np.nonzero(flats_mask(T, M.n))[0]
    hyps = idx[T[idx] == M.r - 1]
    D = M.full[coord]
    out = np.zeros((len(hyps), M.r), dtype=np.int64)
    for h, H in enumerate(hyps):
        cols = [e for e in range(M.n) if (int(H) >> e) & 1]
        ns = algebra.nullspace(D[:, cols].T, 5) if cols else np.eye(M.r, dtype=np.int64)
        out[h] = ns[0]
    return out


def _signature_groups(M: LinearMatroid, coord: int) -> dict:
    P = algebra.projective_points(M.r, 5)
    H = _hyperplane_normals(M, coord)
    if H.shape[0] == 0:
        keys = [b""] * len(P)
    else:
        Z = ((P @ H.T) % 5) == 0
        packed = np.packbits(Z, axis=1)
        keys = [row.tobytes() for row in packed]
    groups: dict = {}
    for i, key in enumerate(keys):
        groups.setdefault(key, []).append(i)
    return groups


def extension_columns(M: LinearMatroid) -> list[np.ndarray]:
    """Candidate new columns (shape (k, r)) giving every single-element extension once.

    GF(2) and GF(5): every projective point.  GF(5)^6: one product column per
    extension matroid shared by all six projections (matched by the set of
    hyperplanes of M containing the new point).
    """
    r = M.r
    if r == 0:
        return []
    if M.ring is Ring.GF2:
        P = algebra.projective_points(r, 2)
        return [v.reshape(1, r) for v in P]
    P = algebra.projective_points(r, 5)
    if M.ring is Ring.GF5:
        return [v.reshape(1, r) for v in P]
    groups = [_signature_groups(M, i) for i in range(6)]
    out = []
    for key, pts in groups[0].items():
        if not all(key in g for g in groups[1:]):
            continue
        col = np.stack([P[groups[i][key][0]] for i in range(6)])
        out.append(col)
    return out


def _is_simple_column(M: LinearMatroid, col: np.ndarray) -> bool:
    v = col[0] % M.p
    if not v.any():
        return False
    full = M.full[0]
    nv = algebra.normalize_projective(v, M.p)
    for j in range(M.n):
        if np.array_equal(algebra.normalize_projective(full[:, j], M.p), nv):
            return False
    return True


def raw_extensions(
    M: LinearMatroid,
    c: Optional[ClassId] = None,
    *,
    three_connected: bool = True,
    where: Optional[Callable[[LinearMatroid], bool]] = None,
    label: Optional[str] = None,
) -> list[LinearMatroid]:
    """Labeled single-element extensions, filtered, not deduplicated."""
    label = label or _fresh_label(M)
    out = []
    for col in extension_columns(M):
        if three_connected and not _is_simple_column(M, col):
            continue
        N = M.extend(col, label)
        if where is not None and not where(N):
            continue
        if three_connected and not connectivity_ok(N.table, N.n, 3):
            continue
        if c is not None:
            if not class_fragile(N, c, first=[N.n - 1]):
                continue
            if c is ClassId.H5_FRAGILE and not (
                is_valid_product_rep(N) and inequivalent_projection_count(N) == 6
            ):
                log.warning("signature-matched extension failed product checks")
                continue
        out.append(N)
    return out


def raw_coextensions(
    M: LinearMatroid,
    c: Optional[ClassId] = None,
    *,
    three_connected: bool = True,
    where: Optional[Callable[[LinearMatroid], bool]] = None,
    label: Optional[str] = None,
) -> list[LinearMatroid]:
    label = label or _fresh_label(M)
    dwhere = None if where is None else (lambda D: where(D.dual()))
    return [D.dual() for D in raw_extensions(M.dual(), c, three_connected=three_connected, where=dwhere, label=label)]


def extensions(M: LinearMatroid, c: Optional[ClassId] = None, **kw) -> list[LinearMatroid]:
    """3-connected single-element extensions in the class, up to isomorphism."""
    return dedup(raw_extensions(M, c, **kw))


def coextensions(M: LinearMatroid, c: Optional[ClassId] = None, **kw) -> list[LinearMatroid]:
    return dedup(raw_coextensions(M, c, **kw))


def whirl(n: int) -> LinearMatroid:
    G = wheel_graph(n)
    # re-weight the last rim edge so the rim stops being a circuit
    A = _incidence(G, signed=True) % 5
    A[G.vertices.index("v0"), 2 * n - 1] = (-2) % 5
    A = A[_drop_rows(G)]
    return LinearMatroid.from_columns(Ring.GF5, A, [e[2] for e in G.edges])


def is_wheel_or_whirl(M: LinearMatroid) -> bool:
    if M.n != 2 * M.r or M.r < 2:
        return False
    W, _, _ = wheel(M.r, Ring.GF2)
    if find_isomorphism(M, W) is not None:
        return True
    return find_isomorphism(M, whirl(M.r)) is not None


def grow(N: LinearMatroid, k: int, c: ClassId, *, check: bool = True) -> list[LinearMatroid]:
    """3-connected class members with an N-minor and at most |E(N)| + k elements."""
    if k < 0:
        raise MatroidError("k must be nonnegative")
    if is_wheel_or_whirl(N):
        raise MatroidError("growth chains need a base that is neither a wheel nor a whirl")
    level = [N]
    found = [N]
    for _ in range(k):
        nxt = []
        for M in level:
            nxt += raw_extensions(M, c)
            nxt += raw_coextensions(M, c)
        level = dedup(nxt)
        found += level
    if check:
        for M in found[1:]:
            assert connectivity_ok(M.table, M.n, 3)
    return found


def canonical_relabel(M: LinearMatroid) -> LinearMatroid:
    """Relabel ground elements 0..n-1 in ground order."""
    return M.relabel({x: str(i) for i, x in enumerate(M.labels)})
