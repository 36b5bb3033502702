"""Represented matroids over GF(2), GF(5) and GF(5)^6.

A :class:`LinearMatroid` stores a standard-form matrix ``[I | A]``.  All
matroid structure (ranks, circuits, connectivity) is read off the first
coordinate projection; for valid product-ring representations every
projection defines the same matroid.

Most algorithms work on *rank tables*: an int8 array ``T`` of length
``2**n`` with ``T[mask]`` the rank of the subset encoded by ``mask`` (bit
``i`` is the ``i``-th ground element).  Minors of a matroid have tables
that are gathers of the parent's table, which is what makes minor and
fragility testing cheap at the sizes used here (n <= 16).
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import algebra
from .algebra import Ring, RingValue

TABLE_MAX = 18

_MASKS64 = [
    np.uint64(0x5555555555555555),
    np.uint64(0x3333333333333333),
    np.uint64(0x0F0F0F0F0F0F0F0F),
    np.uint64(0x00FF00FF00FF00FF),
    np.uint64(0x0000FFFF0000FFFF),
    np.uint64(0x00000000FFFFFFFF),
]


class MatroidError(ValueError):
    """Bad dimensions, unknown labels and similar usage errors."""


def natural_key(label: str):
    return (0, int(label), "") if re.fullmatch(r"-?\d+", label) else (1, 0, label)


# --- rank-table kernels ---------------------------------------------------


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    out = np.bitwise_count(np.arange(1 << n, dtype=np.int64)).astype(np.int8)
    out.setflags(write=False)
    return out


def _translate(S: np.ndarray, v: int, r: int) -> np.ndarray:
    for b in range(r):
        if not (v >> b) & 1:
            continue
        if b < 6:
            s = np.uint64(1 << b)
            m = _MASKS64[b]
            S = ((S & m) << s) | ((S >> s) & m)
        else:
            S = S[:, np.arange(S.shape[1]) ^ (1 << (b - 6))]
    return S


def _binary_table(cols: Sequence[int], r: int) -> np.ndarray:
    # span of every subset as a bitset over the 2**r vectors of GF(2)^r
    n = len(cols)
    words = max(1, (1 << r) >> 6)
    S = np.zeros((1 << n, words), dtype=np.uint64)
    S[0, 0] = 1
    for j, v in enumerate(cols):
        lo = S[: 1 << j]
        S[1 << j : 2 << j] = lo | _translate(lo, v, r)
    counts = np.bitwise_count(S).sum(axis=1)
    return np.log2(counts).round().astype(np.int8)


def _prime_table(full: np.ndarray, p: int) -> np.ndarray:
    # batched Gaussian elimination over every column subset at once
    r, n = full.shape
    B = 1 << n
    if r == 0:
        return np.zeros(B, dtype=np.int8)
    bits = ((np.arange(B)[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int16)
    M = full.astype(np.int16)[None, :, :] * bits[:, None, :]
    used = np.zeros((B, r), dtype=bool)
    rk = np.zeros(B, dtype=np.int8)
    inv = algebra.INV[p].astype(np.int16)
    for j in range(n):
        cand = (M[:, :, j] != 0) & ~used
        has = np.nonzero(cand.any(axis=1))[0]
        if has.size == 0:
            continue
        piv = cand[has].argmax(axis=1)
        sub = M[has]
        prow = sub[np.arange(has.size), piv, :]
        prow = (prow * inv[prow[:, j]][:, None]) % p
        fac = sub[:, :, j].copy()
        fac[np.arange(has.size), piv] = 0
        sub = (sub - fac[:, :, None] * prow[:, None, :]) % p
        sub[np.arange(has.size), piv, :] = prow
        M[has] = sub
        used[has, piv] = True
        rk[has] += 1
    return rk


def table_for(full: np.ndarray, p: int) -> np.ndarray:
    r, n = full.shape
    if n > TABLE_MAX:
        raise MatroidError(f"rank tables limited to {TABLE_MAX} elements")
    if p == 2 and r <= 10:
        cols = [int(sum(int(full[i, j]) << i for i in range(r))) for j in range(n)]
        return _binary_table(cols, r)
    return _prime_table(full % p, p)


@lru_cache(maxsize=4096)
def subset_index(n: int, removed: int) -> np.ndarray:
    """Map subsets of the kept elements (in order) to masks over all n."""
    kept = [i for i in range(n) if not (removed >> i) & 1]
    idx = np.zeros(1 << len(kept), dtype=np.int64)
    ar = np.arange(1 << len(kept), dtype=np.int64)
    for j, e in enumerate(kept):
        idx |= ((ar >> j) & 1) << e
    idx.setflags(write=False)
    return idx


def minor_table(T: np.ndarray, n: int, contract: int, delete: int) -> np.ndarray:
    idx = subset_index(n, contract | delete)
    return (T[idx | contract] - T[contract]).astype(np.int8)


def dual_table(T: np.ndarray, n: int) -> np.ndarray:
    full = (1 << n) - 1
    idx = np.arange(1 << n)
    return (popcounts(n) - T[full] + T[full ^ idx]).astype(np.int8)


def connectivity_ok(T: np.ndarray, n: int, k: int = 3) -> bool:
    """True when the table has no j-separation for any j < k."""
    full = (1 << n) - 1
    idx = np.arange(1 << n)
    lam = T.astype(np.int16) + T[full ^ idx] - T[full]
    sz = popcounts(n)
    for j in range(1, k):
        sel = (sz >= j) & (sz <= n - j)
        if np.any(lam[sel] < j):
            return False
    return True


def flats_mask(T: np.ndarray, n: int) -> np.ndarray:
    is_flat = np.ones(1 << n, dtype=bool)
    idx = np.arange(1 << n)
    for e in range(n):
        bit = 1 << e
        out = (idx & bit) == 0
        sub = idx[out]
        is_flat[sub] &= T[sub | bit] > T[sub]
    return is_flat


def circuits_from_table(T: np.ndarray, n: int) -> np.ndarray:
    sz = popcounts(n)
    indep = T == sz
    circ = ~indep
    idx = np.arange(1 << n)
    for e in range(n):
        bit = 1 << e
        has = (idx & bit) != 0
        circ[has] &= indep[idx[has] ^ bit]
    return np.nonzero(circ)[0]


# --- the matroid class ----------------------------------------------------


class LinearMatroid:
    """An immutable matroid given by ``[I | A]`` and an ordered ground set."""

    def __init__(self, ring: Ring, reduced, labels: Sequence):
        reduced = np.asarray(reduced, dtype=np.int64)
        if reduced.ndim == 2:
            reduced = reduced[None]
        if reduced.ndim != 3 or reduced.shape[0] != ring.width:
            raise MatroidError(f"reduced matrix must have shape ({ring.width}, r, n-r)")
        labels = tuple(str(x) for x in labels)
        r, c = reduced.shape[1:]
        if len(labels) != r + c:
            raise MatroidError(f"{len(labels)} labels for {r + c} columns")
        if len(set(labels)) != len(labels):
            raise MatroidError("labels must be distinct")
        if np.any(reduced < 0) or np.any(reduced >= ring.p):
            raise MatroidError(f"entries out of range for {ring.value}")
        self.ring = ring
        self.reduced = reduced
        self.reduced.setflags(write=False)
        self.labels = labels
        self.r = r
        self.n = r + c
        self._index = {x: i for i, x in enumerate(labels)}
        self._cache: dict = {}

    # construction -----------------------------------------------------

    @classmethod
    def from_columns(cls, ring: Ring, cols, labels: Sequence) -> "LinearMatroid":
        """Standardize an arbitrary column configuration (any row count)."""
        cols = np.asarray(cols, dtype=np.int64)
        if cols.ndim == 2:
            cols = cols[None]
        labels = [str(x) for x in labels]
        k, rows, n = cols.shape
        if n != len(labels):
            raise MatroidError(f"{len(labels)} labels for {n} columns")
        p = ring.p
        _, basis = algebra.rref(cols[0], p) if rows else (None, [])
        rr = len(basis)
        out = np.zeros((k, rr, n), dtype=np.int64)
        for i in range(k):
            if rr == 0:
                break
            red, piv = algebra.rref(cols[i], p)
            if len(piv) != rr:
                raise MatroidError(f"coordinate {i} has rank {len(piv)}, expected {rr}")
            R = red[:rr]
            try:
                out[i] = (algebra.inverse(R[:, basis], p) @ R) % p
            except algebra.NonInvertibleError:
                raise MatroidError(f"basis is dependent in coordinate {i}") from None
        nonbasis = [j for j in range(n) if j not in basis]
        order = list(basis) + nonbasis
        return cls(ring, out[:, :, nonbasis], [labels[j] for j in order])

    # basic structure --------------------------------------------------

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def full(self) -> np.ndarray:
        """The (k, r, n) matrix [I | A]."""
        if "full" not in self._cache:
            k = self.ring.width
            eye = np.broadcast_to(np.eye(self.r, dtype=np.int64), (k, self.r, self.r))
            f = np.concatenate([eye, self.reduced], axis=2)
            f.setflags(write=False)
            self._cache["full"] = f
        return self._cache["full"]

    def entry(self, i: int, j: int) -> RingValue:
        """Entry of the reduced matrix as a ring scalar."""
        d = self.reduced[:, i, j]
        return RingValue.of(self.ring, d if self.ring is Ring.GF5x6 else d[0])

    def projection(self, i: int) -> "LinearMatroid":
        ring = Ring.GF2 if self.ring is Ring.GF2 else Ring.GF5
        return LinearMatroid(ring, self.reduced[i], self.labels)

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise MatroidError(f"unknown label {label!r}") from None

    def mask(self, X: Iterable) -> int:
        m = 0
        for x in X:
            m |= 1 << self.index(x)
        return m

    def subset(self, mask: int) -> frozenset:
        return frozenset(self.labels[i] for i in range(self.n) if (mask >> i) & 1)

    @property
    def ground(self) -> frozenset:
        return frozenset(self.labels)

    @property
    def table(self) -> np.ndarray:
        if "table" not in self._cache:
            t = table_for(self.full[0], self.p)
            t.setflags(write=False)
            self._cache["table"] = t
        return self._cache["table"]

    def rank(self, X: Iterable = None) -> int:
        if X is None:
            return self.r
        m = self.mask(X)
        if self.n <= TABLE_MAX:
            return int(self.table[m])
        cols = [i for i in range(self.n) if (m >> i) & 1]
        return algebra.rank(self.full[0][:, cols], self.p)

    def rank_mask(self, m: int) -> int:
        if self.n <= TABLE_MAX:
            return int(self.table[m])
        cols = [i for i in range(self.n) if (m >> i) & 1]
        return algebra.rank(self.full[0][:, cols], self.p)

    def corank(self, X: Iterable) -> int:
        X = set(X)
        return len(X) - self.r + self.rank(self.ground - X)

    def closure(self, X: Iterable) -> frozenset:
        m = self.mask(X)
        rk = self.rank_mask(m)
        out = m
        for e in range(self.n):
            if not (m >> e) & 1 and self.rank_mask(m | 1 << e) == rk:
                out |= 1 << e
        return self.subset(out)

    def is_independent(self, X: Iterable) -> bool:
        X = list(X)
        return self.rank(X) == len(X)

    # derived structure ------------------------------------------------

    def circuits(self) -> list[frozenset]:
        return [self.subset(int(c)) for c in self.circuit_masks]

    @property
    def circuit_masks(self) -> np.ndarray:
        if "circuits" not in self._cache:
            self._cache["circuits"] = circuits_from_table(self.table, self.n)
        return self._cache["circuits"]

    @property
    def dual_table(self) -> np.ndarray:
        if "dual_table" not in self._cache:
            self._cache["dual_table"] = dual_table(self.table, self.n)
        return self._cache["dual_table"]

    def __repr__(self) -> str:
        return f"LinearMatroid({self.ring.value}, rank={self.r}, n={self.n})"

    def same_as(self, other: "LinearMatroid") -> bool:
        """Identical representation, labels and ring."""
        return (
            self.ring is other.ring
            and self.labels == other.labels
            and self.reduced.shape == other.reduced.shape
            and np.array_equal(self.reduced, other.reduced)
        )

    def same_matroid(self, other: "LinearMatroid") -> bool:
        """Same labeled matroid (label-preserving identity is an isomorphism)."""
        if self.ground != other.ground or self.r != other.r:
            return False
        perm = [other.index(x) for x in self.labels]
        idx = np.zeros(1 << self.n, dtype=np.int64)
        ar = np.arange(1 << self.n)
        for i, j in enumerate(perm):
            idx |= ((ar >> i) & 1) << j
        return bool(np.array_equal(self.table, other.table[idx]))

    # minors and duality -----------------------------------------------

    def dual(self) -> "LinearMatroid":
        if "dual" not in self._cache:
            neg = (-np.transpose(self.reduced, (0, 2, 1))) % self.p
            labels = self.labels[self.r :] + self.labels[: self.r]
            d = LinearMatroid(self.ring, neg, labels)
            d._cache["dual"] = self
            if "table" in self._cache:
                perm = list(range(self.r, self.n)) + list(range(self.r))
                d._cache["table"] = _permute_table(self.dual_table, perm)
            self._cache["dual"] = d
        return self._cache["dual"]

    def _standard_for(self, basis: list[int]) -> np.ndarray:
        # (k, r, n) matrix with identity on the given basis columns
        out = np.empty_like(self.full)
        for i in range(self.ring.width):
            B = self.full[i][:, basis]
            out[i] = (algebra.inverse(B, self.p) @ self.full[i]) % self.p
        return out

    def minor(self, contract: Iterable = (), delete: Iterable = ()) -> "LinearMatroid":
        C = self.mask(contract)
        D = self.mask(delete)
        if C & D:
            raise MatroidError("contract and delete sets overlap")
        # lexicographically first independent subset of C, then extend
        indep: list[int] = []
        for e in range(self.n):
            if (C >> e) & 1 and self._rank_idx(indep + [e]) == len(indep) + 1:
                indep.append(e)
        basis = list(indep)
        for e in range(self.n):
            if e not in basis and self._rank_idx(basis + [e]) == len(basis) + 1:
                basis.append(e)
        std = self._standard_for(basis)
        keep_rows = [i for i, e in enumerate(basis) if e not in indep]
        keep = sorted(
            (e for e in range(self.n) if not ((C | D) >> e) & 1),
            key=lambda e: natural_key(self.labels[e]),
        )
        cols = std[:, keep_rows][:, :, keep]
        return LinearMatroid.from_columns(self.ring, cols, [self.labels[e] for e in keep])

    def _rank_idx(self, idx: list[int]) -> int:
        m = 0
        for e in idx:
            m |= 1 << e
        return self.rank_mask(m)

    def delete(self, X: Iterable) -> "LinearMatroid":
        return self.minor(delete=X)

    def contract(self, X: Iterable) -> "LinearMatroid":
        return self.minor(contract=X)

    def restrict(self, X: Iterable) -> "LinearMatroid":
        X = set(str(x) for x in X)
        return self.delete(self.ground - X)

    def relabel(self, mapping) -> "LinearMatroid":
        labels = [str(mapping.get(x, x)) if isinstance(mapping, dict) else str(mapping(x)) for x in self.labels]
        out = LinearMatroid(self.ring, self.reduced, labels)
        if "table" in self._cache:
            out._cache["table"] = self._cache["table"]
        return out

    def extend(self, column, label) -> "LinearMatroid":
        """Append a column given in the coordinates of the current basis."""
        col = np.asarray(column, dtype=np.int64).reshape(self.ring.width, self.r, 1) % self.p
        return LinearMatroid(self.ring, np.concatenate([self.reduced, col], axis=2), self.labels + (str(label),))

    def coextend(self, column, label) -> "LinearMatroid":
        """Dual of extending the dual by ``column`` (length n - r)."""
        return self.dual().extend(column, label).dual()

    def lift(self, ring: Ring) -> "LinearMatroid":
        """Reinterpret a GF(5) matrix diagonally in GF(5)^6 (or vice versa for width 1)."""
        if ring is self.ring:
            return self
        if ring is Ring.GF5x6 and self.ring is Ring.GF5:
            return LinearMatroid(ring, np.repeat(self.reduced, 6, axis=0), self.labels)
        raise MatroidError(f"cannot lift {self.ring.value} to {ring.value}")


def _permute_table(T: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Table of the matroid whose element i is old element perm[i]."""
    n = len(perm)
    ar = np.arange(1 << n)
    idx = np.zeros(1 << n, dtype=np.int64)
    for i, j in enumerate(perm):
        idx |= ((ar >> i) & 1) << j
    out = T[idx].astype(np.int8)
    out.setflags(write=False)
    return out


def from_matrix(ring: Ring, matrix, labels: Sequence) -> LinearMatroid:
    """Build ``[I | A]`` from the reduced matrix A (entries ints, tuples or RingValues)."""
    rows = [list(row) for row in matrix]
    labels = list(labels)
    r = len(rows)
    c = len(rows[0]) if rows else len(labels) - r
    if any(len(row) != c for row in rows):
        raise MatroidError("ragged matrix")
    arr = np.zeros((ring.width, r, c), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            if isinstance(x, RingValue):
                if x.ring is not ring:
                    raise MatroidError(f"entry ring {x.ring.value} != {ring.value}")
                d = x.digits
            elif isinstance(x, (tuple, list)):
                d = tuple(x)
            else:
                d = (int(x) % ring.p,) * ring.width
            if len(d) != ring.width:
                raise MatroidError(f"entry {x!r} has wrong width")
            arr[:, i, j] = d
    return LinearMatroid(ring, arr % ring.p, labels)


# --- module-level operations ---------------------------------------------


def rank(M: LinearMatroid, X: Iterable) -> int:
    return M.rank(X)


def dual(M: LinearMatroid) -> LinearMatroid:
    return M.dual()


def delete(M: LinearMatroid, X: Iterable) -> LinearMatroid:
    return M.delete(X)


def contract(M: LinearMatroid, X: Iterable) -> LinearMatroid:
    return M.contract(X)


def closure(M: LinearMatroid, X: Iterable) -> frozenset:
    return M.closure(X)


def loops(M: LinearMatroid) -> list[str]:
    return [x for i, x in enumerate(M.labels) if M.rank_mask(1 << i) == 0]


def parallel_classes(M: LinearMatroid) -> list[list[str]]:
    """Parallel classes of non-loops, each in ground order."""
    seen: set[int] = set()
    classes = []
    for i in range(M.n):
        if i in seen or M.rank_mask(1 << i) == 0:
            continue
        cls = [i]
        for j in range(i + 1, M.n):
            if j not in seen and M.rank_mask(1 << j) == 1 and M.rank_mask(1 << i | 1 << j) == 1:
                cls.append(j)
        seen.update(cls)
        classes.append([M.labels[k] for k in cls])
    return classes


def simplify(M: LinearMatroid) -> tuple[LinearMatroid, dict]:
    """Remove loops and all but the first element of each parallel class.

    Returns the simple matroid and a map from removed labels to their
    retained representative (``None`` for loops).
    """
    removed: dict = {x: None for x in loops(M)}
    for cls in parallel_classes(M):
        for x in cls[1:]:
            removed[x] = cls[0]
    if not removed:
        return M, {}
    return M.delete(removed), removed


def cosimplify(M: LinearMatroid) -> tuple[LinearMatroid, dict]:
    S, removed = simplify(M.dual())
    return (S.dual() if removed else M), removed


def is_connected(M: LinearMatroid) -> bool:
    return connectivity_ok(M.table, M.n, 2)


def is_3connected(M: LinearMatroid) -> bool:
    return connectivity_ok(M.table, M.n, 3)


def is_3connected_up_to_sp(M: LinearMatroid) -> bool:
    """Simplify and cosimplify until stable, then test 3-connectivity."""
    while True:
        S, a = simplify(M)
        S, b = cosimplify(S)
        if not a and not b:
            break
        M = S
    return M.n < 4 or is_3connected(M)


def _three_circuits(T: np.ndarray, n: int) -> list[int]:
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                m = 1 << i | 1 << j | 1 << k
                if T[m] == 2 and T[1 << i | 1 << j] == 2 and T[1 << i | 1 << k] == 2 and T[1 << j | 1 << k] == 2:
                    out.append(m)
    return out


def triangle_masks(M: LinearMatroid) -> list[int]:
    if "triangles" not in M._cache:
        M._cache["triangles"] = _three_circuits(M.table, M.n)
    return M._cache["triangles"]


def triad_masks(M: LinearMatroid) -> list[int]:
    if "triads" not in M._cache:
        M._cache["triads"] = _three_circuits(M.dual_table, M.n)
    return M._cache["triads"]


def triangles(M: LinearMatroid) -> list[frozenset]:
    return [M.subset(m) for m in triangle_masks(M)]


def triads(M: LinearMatroid) -> list[frozenset]:
    return [M.subset(m) for m in triad_masks(M)]
