"""Isomorphism, fingerprints, isomorph-free deduplication and GF(5) representation equivalence."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Optional, Sequence

import numpy as np

from . import algebra
from .io import to_text
from .matroid import LinearMatroid, MatroidError, circuits_from_table, flats_mask, popcounts


def _element_data(M: LinearMatroid):
    if "element_data" in M._cache:
        return M._cache["element_data"]
    n = M.n
    circ = M.circuit_masks
    cocirc = circuits_from_table(M.dual_table, n)
    csz = popcounts(n)[circ]
    ksz = popcounts(n)[cocirc]
    profiles = []
    for e in range(n):
        bit = 1 << e
        a = np.bincount(csz[(circ & bit) != 0], minlength=n + 2)
        b = np.bincount(ksz[(cocirc & bit) != 0], minlength=n + 2)
        profiles.append(tuple(int(x) for x in a) + tuple(int(x) for x in b))
    data = (circ, cocirc, profiles)
    M._cache["element_data"] = data
    return data


def fingerprint(M: LinearMatroid) -> tuple:
    """Isomorphism invariant: rank, size, circuit/cocircuit/hyperplane statistics, element profiles."""
    if "fingerprint" in M._cache:
        return M._cache["fingerprint"]
    n = M.n
    circ, cocirc, profiles = _element_data(M)
    sz = popcounts(n)
    flats = np.nonzero(flats_mask(M.table, n))[0]
    hyper = flats[M.table[flats] == M.r - 1]
    fp = (
        M.r,
        n,
        tuple(int(x) for x in np.bincount(sz[circ], minlength=n + 2)),
        tuple(int(x) for x in np.bincount(sz[cocirc], minlength=n + 2)),
        tuple(int(x) for x in np.bincount(sz[hyper], minlength=n + 1)),
        tuple(sorted(profiles)),
    )
    M._cache["fingerprint"] = fp
    return fp


def find_isomorphism(
    M: LinearMatroid, N: LinearMatroid, fixed: Iterable = ()
) -> Optional[dict]:
    """A label bijection E(M) -> E(N) carrying circuits onto circuits, or None.

    Labels in ``fixed`` must be common to both and are mapped to themselves.
    """
    if M.n != N.n or M.r != N.r:
        return None
    if fingerprint(M) != fingerprint(N):
        return None
    n = M.n
    _, _, pm = _element_data(M)
    _, _, pn = _element_data(N)
    fixed = {str(x) for x in fixed}
    cands = []
    for e in range(n):
        if M.labels[e] in fixed:
            if M.labels[e] not in N._index:
                return None
            f = N.index(M.labels[e])
            cands.append([f] if pn[f] == pm[e] else [])
        else:
            cands.append([f for f in range(n) if pn[f] == pm[e] and N.labels[f] not in fixed])
        if not cands[-1]:
            return None

    circ_m = [int(c) for c in M.circuit_masks]
    circ_n = set(int(c) for c in N.circuit_masks)

    # order: fewest candidates first, then elements sharing small circuits with placed ones
    small = [c for c in circ_m if bin(c).count("1") <= 4]
    order: list[int] = []
    placed = 0
    remaining = set(range(n))
    while remaining:
        def score(e):
            bit = 1 << e
            links = sum(1 for c in small if c & bit and c & placed)
            return (-links, len(cands[e]), e)

        e = min(remaining, key=score)
        order.append(e)
        placed |= 1 << e
        remaining.discard(e)
    pos = {e: i for i, e in enumerate(order)}
    checks: list[list[list[int]]] = [[] for _ in range(n)]
    for c in circ_m:
        elems = [i for i in range(n) if (c >> i) & 1]
        last = max(elems, key=lambda i: pos[i])
        checks[pos[last]].append(elems)

    phi = [-1] * n
    used = [False] * n

    def search(k: int) -> bool:
        if k == n:
            return True
        e = order[k]
        for f in cands[e]:
            if used[f]:
                continue
            phi[e] = f
            ok = True
            for elems in checks[k]:
                img = 0
                for i in elems:
                    img |= 1 << phi[i]
                if img not in circ_n:
                    ok = False
                    break
            if ok:
                used[f] = True
                if search(k + 1):
                    return True
                used[f] = False
        phi[e] = -1
        return False

    if not search(0):
        return None
    mapping = {M.labels[e]: N.labels[phi[e]] for e in range(n)}
    assert _is_isomorphism(M, N, phi)
    return mapping


def _is_isomorphism(M: LinearMatroid, N: LinearMatroid, phi: Sequence[int]) -> bool:
    ar = np.arange(1 << M.n)
    idx = np.zeros(1 << M.n, dtype=np.int64)
    for i, j in enumerate(phi):
        idx |= ((ar >> i) & 1) << j
    return bool(np.array_equal(M.table, N.table[idx]))


def are_isomorphic(M: LinearMatroid, N: LinearMatroid, fixed: Iterable = ()) -> Optional[dict]:
    return find_isomorphism(M, N, fixed)


def isomorphic(M: LinearMatroid, N: LinearMatroid) -> bool:
    return find_isomorphism(M, N) is not None


def dedup(matroids: Iterable[LinearMatroid], fixed: Iterable = ()) -> list[LinearMatroid]:
    """One representative per isomorphism class; the smallest serialization wins.

    Output is sorted by (fingerprint, serialization), so it does not depend
    on input order.
    """
    fixed = tuple(fixed)
    keyed = sorted(((to_text(M), M) for M in matroids), key=lambda t: t[0])
    buckets: dict = {}
    for text, M in keyed:
        reps = buckets.setdefault(fingerprint(M), [])
        if any(find_isomorphism(M, R, fixed) is not None for _, R in reps):
            continue
        reps.append((text, M))
    out = [(fp, text, M) for fp, reps in buckets.items() for text, M in reps]
    out.sort(key=lambda t: (t[0], t[1]))
    return [M for _, _, M in out]


def index_of(M: LinearMatroid, pool: Sequence[LinearMatroid]) -> Optional[int]:
    for i, N in enumerate(pool):
        if find_isomorphism(M, N) is not None:
            return i
    return None


# --- representation equivalence ------------------------------------------


def _tree_normalize(A: np.ndarray, p: int) -> np.ndarray:
    r, c = A.shape
    inv = algebra.INV[p]
    rs = [0] * r
    cs = [0] * c
    seen_r = [False] * r
    seen_c = [False] * c
    for start in range(r):
        if seen_r[start]:
            continue
        seen_r[start] = True
        rs[start] = 1
        queue = [("r", start)]
        while queue:
            kind, i = queue.pop(0)
            if kind == "r":
                for j in range(c):
                    if A[i, j] and not seen_c[j]:
                        seen_c[j] = True
                        cs[j] = int(inv[(A[i, j] * rs[i]) % p])
                        queue.append(("c", j))
            else:
                for k in range(r):
                    if A[k, i] and not seen_r[k]:
                        seen_r[k] = True
                        rs[k] = int(inv[(A[k, i] * cs[i]) % p])
                        queue.append(("r", k))
    return (np.array(rs)[:, None] * A * np.array(cs)[None, :]) % p


def reps_equivalent(A: LinearMatroid, B: LinearMatroid) -> bool:
    """Whether two GF(5) (or GF(2)) representations differ by row operations and column scaling."""
    if A.p != B.p or A.ring.width != 1 or B.ring.width != 1:
        raise MatroidError("reps_equivalent compares single-field representations")
    if not A.same_matroid(B):
        raise MatroidError("matrices represent different matroids")
    if B.labels != A.labels:
        basis = [B.index(x) for x in A.labels[: A.r]]
        order = [B.index(x) for x in A.labels]
        std = B._standard_for(basis)[0][:, order]
        Bred = std[:, A.r :]
    else:
        Bred = B.reduced[0]
    Ared = A.reduced[0]
    if not np.array_equal(Ared != 0, Bred != 0):
        raise MatroidError("matrices represent different matroids")
    return bool(np.array_equal(_tree_normalize(Ared, A.p), _tree_normalize(Bred, A.p)))


def equivalence_classes(reps: Sequence[LinearMatroid]) -> list[list[int]]:
    classes: list[list[int]] = []
    for i, R in enumerate(reps):
        for cls in classes:
            if reps_equivalent(reps[cls[0]], R):
                cls.append(i)
                break
        else:
            classes.append([i])
    return classes


def profile_counts(M: LinearMatroid) -> Counter:
    return Counter(_element_data(M)[2])
