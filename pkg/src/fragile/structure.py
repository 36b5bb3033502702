"""Fans, fan moves, covering families, fan-extension closures, cores and wheel gluing."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import algebra
from .constructions import wheel
from .fragility import ClassId, raw_coextensions, raw_extensions
from .iso import dedup, find_isomorphism
from .matroid import LinearMatroid, MatroidError, triad_masks, triangle_masks


@dataclass(frozen=True)
class Fan:
    sequence: tuple
    first_triple_is_triangle: bool

    def __post_init__(self):
        seq = tuple(str(x) for x in self.sequence)
        object.__setattr__(self, "sequence", seq)
        if len(seq) < 3:
            raise MatroidError("fans have at least three elements")
        if len(set(seq)) != len(seq):
            raise MatroidError("fan elements must be distinct")

    def __len__(self):
        return len(self.sequence)

    def __iter__(self):
        return iter(self.sequence)

    def is_spoke(self, i: int) -> bool:
        """Position i (0-based) is a spoke element."""
        return (i % 2 == 0) == self.first_triple_is_triangle

    @property
    def spokes(self) -> tuple:
        return tuple(x for i, x in enumerate(self.sequence) if self.is_spoke(i))

    @property
    def rims(self) -> tuple:
        return tuple(x for i, x in enumerate(self.sequence) if not self.is_spoke(i))

    def triple_is_triangle(self, i: int) -> bool:
        return (i % 2 == 0) == self.first_triple_is_triangle

    def reversed(self) -> "Fan":
        n = len(self.sequence)
        return Fan(self.sequence[::-1], self.triple_is_triangle(n - 3))

    def canonical(self) -> "Fan":
        rev = self.reversed()
        return min(self, rev, key=lambda f: (f.sequence, not f.first_triple_is_triangle))

    def __str__(self):
        kind = "triangle" if self.first_triple_is_triangle else "triad"
        return f"({','.join(self.sequence)})[{kind}-first]"


@dataclass(frozen=True)
class CoveringFamily:
    fans: tuple
    base_fans: tuple


@dataclass(frozen=True)
class WheelGlueSpec:
    triangles: tuple
    ranks: tuple
    X: frozenset = frozenset()

    def __post_init__(self):
        tris = tuple(tuple(str(x) for x in t) for t in self.triangles)
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "ranks", tuple(int(k) for k in self.ranks))
        object.__setattr__(self, "X", frozenset(str(x) for x in self.X))
        if len(tris) != len(self.ranks):
            raise MatroidError("one wheel rank per triangle")
        if any(len(t) != 3 for t in tris):
            raise MatroidError("triangles are ordered triples")
        if any(k < 2 for k in self.ranks):
            raise MatroidError("wheel ranks are at least 2")
        union = {x for t in tris for x in t}
        if not self.X <= union:
            raise MatroidError("X must lie in the union of the triangles")
        ends = {t[0] for t in tris} | {t[2] for t in tris}
        for t in tris:
            if t[1] not in self.X and t[1] not in ends:
                raise MatroidError(f"middle element {t[1]} must be deleted")


# --- triangles, triads, fan validity --------------------------------------


def _tri_sets(M: LinearMatroid) -> tuple[set, set]:
    return set(triangle_masks(M)), set(triad_masks(M))


def _rank_cols(M: LinearMatroid, idx: Sequence[int]) -> int:
    if "table" in M._cache:
        return int(M.table[sum(1 << e for e in idx)])
    return algebra.rank(M.full[0][:, list(idx)], M.p) if len(idx) else 0


def _is_triangle_idx(M: LinearMatroid, t: Sequence[int]) -> bool:
    if _rank_cols(M, t) != 2:
        return False
    return all(_rank_cols(M, pair) == 2 for pair in itertools.combinations(t, 2))


def _is_triad_idx(M: LinearMatroid, t: Sequence[int]) -> bool:
    rest = [e for e in range(M.n) if e not in t]
    if _rank_cols(M, rest) != M.r - 1:
        return False
    return all(_rank_cols(M, rest + [x]) == M.r for x in t)


def fan_valid(M: LinearMatroid, f: Fan) -> bool:
    try:
        idx = [M.index(x) for x in f.sequence]
    except MatroidError:
        return False
    for i in range(len(idx) - 2):
        t = idx[i : i + 3]
        ok = _is_triangle_idx(M, t) if f.triple_is_triangle(i) else _is_triad_idx(M, t)
        if not ok:
            return False
    return True


def _fan_sequences(M: LinearMatroid) -> list[tuple[tuple, bool]]:
    """Every fan as (index sequence, leading triangle), both directions."""
    tri, tad = _tri_sets(M)
    kinds = {True: tri, False: tad}
    out = []

    def grow(seq, first, last_kind):
        out.append((tuple(seq), first))
        want = not last_kind
        a, b = seq[-2], seq[-1]
        for x in range(M.n):
            if x in seq:
                continue
            if (1 << a | 1 << b | 1 << x) in kinds[want]:
                seq.append(x)
                grow(seq, first, want)
                seq.pop()

    for kind in (True, False):
        for m in sorted(kinds[kind]):
            elems = [e for e in range(M.n) if (m >> e) & 1]
            for perm in itertools.permutations(elems):
                grow(list(perm), kind, kind)
    return out


def all_fans(M: LinearMatroid) -> list[Fan]:
    """Every fan of M (maximal or not), each counted once up to reversal."""
    if "all_fans" in M._cache:
        return M._cache["all_fans"]
    seen = set()
    for seq, first in _fan_sequences(M):
        f = Fan(tuple(M.labels[e] for e in seq), first).canonical()
        seen.add(f)
    out = sorted(seen, key=lambda f: (len(f), f.sequence, f.first_triple_is_triangle))
    M._cache["all_fans"] = out
    return out


def _extends(f: Fan, g: Fan) -> bool:
    """g is f with at least one more element at an end (same typing on f's part)."""
    if len(g) <= len(f):
        return False
    for h in (g, g.reversed()):
        s, t = h.sequence, f.sequence
        for off in range(len(s) - len(t) + 1):
            if s[off : off + len(t)] == t and h.triple_is_triangle(off) == f.first_triple_is_triangle:
                return True
    return False


def find_fans(M: LinearMatroid) -> list[Fan]:
    """Maximal fans: those not extendable at either end."""
    fans = all_fans(M)
    return [f for f in fans if not any(_extends(f, g) for g in fans if len(g) == len(f) + 1)]


# --- fan moves ------------------------------------------------------------


def fan_shortening_moves(
    M: LinearMatroid, f: Fan, *, three_connected: bool = False
) -> list[tuple[LinearMatroid, Fan]]:
    """The minors N of M such that M arises from N by a fan-lengthening move on f."""
    if not fan_valid(M, f):
        raise MatroidError(f"{f} is not a fan of the matroid")
    n = len(f)
    if n < 4:
        return []
    seq = f.sequence
    out = []

    def residual(drop: Sequence[int]) -> Fan:
        keep = [i for i in range(n) if i not in drop]
        return Fan(tuple(seq[i] for i in keep), f.is_spoke(keep[0]))

    for end in (0, n - 1):
        x = seq[end]
        N = M.delete([x]) if f.is_spoke(end) else M.contract([x])
        out.append((N, residual([end])))
    if n >= 5:
        for i in range(n - 1):
            if f.is_spoke(i):
                N = M.minor(contract=[seq[i + 1]], delete=[seq[i]])
            else:
                N = M.minor(contract=[seq[i]], delete=[seq[i + 1]])
            out.append((N, residual([i, i + 1])))
    if three_connected:
        from .matroid import is_3connected

        out = [(N, g) for N, g in out if is_3connected(N)]
    return out


def _fresh(M: LinearMatroid, k: int, avoid: Iterable = ()) -> list[str]:
    used = set(M.labels) | {str(x) for x in avoid}
    nums = [int(x) for x in used if x.isdigit()]
    nxt = max(nums) + 1 if nums else 0
    out = []
    while len(out) < k:
        if str(nxt) not in used:
            out.append(str(nxt))
        nxt += 1
    return out


def fan_lengthening_moves(
    M: LinearMatroid, f: Fan, c: Optional[ClassId] = None, *, labels: Optional[Sequence[str]] = None
) -> list[tuple[LinearMatroid, Fan]]:
    """3-connected matroids obtained from M by one fan-lengthening move on f.

    End moves add one element whose type is forced by the adjacent triple.
    Interior moves insert a rim-spoke pair into a gap; they are built as a
    coextension of M with the new spoke added parallel to the element it
    becomes parallel to once the new rim is contracted.
    """
    if not fan_valid(M, f):
        raise MatroidError(f"{f} is not a fan of the matroid")
    x, y = labels if labels is not None else _fresh(M, 2)
    seq = f.sequence
    n = len(seq)
    out: list[tuple[LinearMatroid, Fan]] = []

    def where(g: Fan):
        return lambda K: fan_valid(K, g)

    # prepend
    g = Fan((x,) + seq, not f.first_triple_is_triangle)
    gen = raw_extensions if g.is_spoke(0) else raw_coextensions
    out += [(K, g) for K in gen(M, c, where=where(g), label=x)]
    # append
    last_triangle = f.triple_is_triangle(n - 3)
    g = Fan(seq + (x,), f.first_triple_is_triangle)
    gen = raw_coextensions if last_triangle else raw_extensions
    out += [(K, g) for K in gen(M, c, where=where(g), label=x)]
    # interior pairs
    for gap in range(n + 1):
        g = Fan(seq[:gap] + (x, y) + seq[gap:], f.first_triple_is_triangle)
        u_spoke = g.is_spoke(gap)
        rpos, spos = (gap + 1, gap) if u_spoke else (gap, gap + 1)
        rlab, slab = g.sequence[rpos], g.sequence[spos]
        zpos = rpos + (rpos - spos)  # beyond the rim, away from the spoke
        wpos = spos + (spos - rpos)
        if 0 <= zpos < len(g):
            z = g.sequence[zpos]
            M1 = M.extend(M.full[:, :, M.index(z)], slab)
            out += [(K, g) for K in raw_coextensions(M1, c, where=where(g), label=rlab)]
        else:
            w = g.sequence[wpos]
            D = M.dual()
            D1 = D.extend(D.full[:, :, D.index(w)], rlab)
            out += [
                (K.dual(), g)
                for K in raw_coextensions(D1, c, where=lambda K, g=g: fan_valid(K.dual(), g), label=slab)
            ]
    return out


# --- covering families and closures --------------------------------------


def consistent(f: Sequence, g: Sequence) -> bool:
    """f is a (not necessarily contiguous) subsequence of g or of its reversal."""
    f = tuple(f)

    def sub(s):
        it = iter(s)
        return all(x in it for x in f)

    return sub(g) or sub(tuple(g)[::-1])


def _check_embedding(M: LinearMatroid, N: LinearMatroid) -> None:
    extra = [x for x in M.labels if x not in N._index]
    if any(x not in M._index for x in N.labels):
        raise MatroidError("ground set of N is not contained in ground set of M")
    for k in range(len(extra) + 1):
        for C in itertools.combinations(extra, k):
            if M.rank(C) != len(C):
                continue
            K = M.minor(contract=C, delete=[x for x in extra if x not in C])
            if K.r == N.r and find_isomorphism(K, N, fixed=N.labels) is not None:
                return
    raise MatroidError("the label correspondence does not realize N as a minor")


def covering_families(
    M: LinearMatroid, N: LinearMatroid, base_fans: Sequence[Fan], *, check: bool = True
) -> list[CoveringFamily]:
    """All covering families of M relative to N (embedded by labels) and base_fans."""
    if check:
        _check_embedding(M, N)
    extra = frozenset(x for x in M.labels if x not in N._index)
    fans = all_fans(M)
    cands = [[g for g in fans if consistent(b.sequence, g.sequence)] for b in base_fans]
    out = []

    def search(j, chosen, used):
        if j == len(base_fans):
            covered = set().union(*(set(g.sequence) for g in chosen)) if chosen else set()
            if extra <= covered:
                out.append(CoveringFamily(tuple(chosen), tuple(base_fans)))
            return
        for g in cands[j]:
            s = set(g.sequence)
            if s & used:
                continue
            chosen.append(g)
            search(j + 1, chosen, used | s)
            chosen.pop()

    search(0, [], set())
    return out


def _family_fans(M: LinearMatroid, N: LinearMatroid, base_fans: Sequence[Fan]) -> list[Fan]:
    seen = []
    for fam in covering_families(M, N, base_fans, check=False):
        for g in fam.fans:
            if g not in seen:
                seen.append(g)
    return seen


def fan_extension_closure(
    N: LinearMatroid,
    base_fans: Sequence[Fan],
    k: int,
    c: Optional[ClassId] = None,
) -> list[LinearMatroid]:
    """Fan-extensions of N relative to base_fans with at most |E(N)|+k elements.

    With a class given, only members of the class are kept; every
    intermediate of a class member's lengthening chain is a minor containing
    N, so nothing reachable in the class is lost.
    """
    for a, b in itertools.combinations(base_fans, 2):
        if set(a.sequence) & set(b.sequence):
            raise MatroidError("base fans must be pairwise disjoint")
    for f in base_fans:
        if not fan_valid(N, f):
            raise MatroidError(f"{f} is not a fan of N")
    n0 = N.n
    by_size: dict[int, list[LinearMatroid]] = {n0: [N]}
    members = [N]
    for size in range(n0, n0 + k):
        level = dedup(by_size.get(size, []), fixed=N.labels)
        if size > n0:
            members += level
        for M in level:
            for g in _family_fans(M, N, base_fans):
                for K, _ in fan_lengthening_moves(M, g, c):
                    if K.n <= n0 + k:
                        by_size.setdefault(K.n, []).append(K)
    if k > 0:
        members += dedup(by_size.get(n0 + k, []), fixed=N.labels)
    return dedup(members)


def is_fan_extension(
    M: LinearMatroid, N: LinearMatroid, base_fans: Sequence[Fan], c: Optional[ClassId] = None
) -> bool:
    if M.n < N.n:
        return False
    return any(
        find_isomorphism(M, K) is not None
        for K in fan_extension_closure(N, base_fans, M.n - N.n, c)
        if K.n == M.n
    )


# --- core -----------------------------------------------------------------


def _meet(D: np.ndarray, I: Sequence[int], J: Sequence[int], p: int) -> np.ndarray:
    """The unique projective point in span(D[:, I]) and span(D[:, J])."""
    A, B = D[:, list(I)], D[:, list(J)]
    ns = algebra.nullspace(np.hstack([A, (-B) % p]) % p, p)
    vecs = [(A @ x[: len(I)]) % p for x in ns] if len(ns) else []
    vecs = [v for v in vecs if v.any()]
    if not vecs or algebra.rank(np.array(vecs).T, p) != 1:
        raise MatroidError("closure intersection is not a single point")
    return algebra.normalize_projective(vecs[0], p)


def core(N: LinearMatroid, fans: Sequence[Fan]) -> LinearMatroid:
    """Replace each fan by a fresh triangle (a_i, b_i, c_i) of closure points.

    Over GF(5)^6 each coordinate is solved on its own and the resulting
    vectors must share a zero pattern.
    """
    for a, b in itertools.combinations(fans, 2):
        if set(a.sequence) & set(b.sequence):
            raise MatroidError("fans must be pairwise disjoint")
    for f in fans:
        if not fan_valid(N, f):
            raise MatroidError(f"{f} is not a fan")
    k, p = N.ring.width, N.p
    full = N.full
    new_cols, new_labels = [], []
    for t, f in enumerate(fans, start=1):
        idx = [N.index(x) for x in f.sequence]
        outside = [e for e in range(N.n) if e not in idx]
        rims = [i for j, i in enumerate(idx) if not f.is_spoke(j)]
        m = len(idx)
        specs = [
            ("a", [idx[0]] if f.is_spoke(0) else None, idx[:2]),
            ("b", None, rims),
            ("c", [idx[-1]] if f.is_spoke(m - 1) else None, idx[-2:]),
        ]
        for name, direct, span in specs:
            col = np.zeros((k, N.r), dtype=np.int64)
            for i in range(k):
                if direct is not None:
                    col[i] = full[i][:, direct[0]]
                else:
                    col[i] = _meet(full[i], span, outside, p)
            if k > 1 and len({tuple(col[i] != 0) for i in range(k)}) != 1:
                raise MatroidError("core point has inconsistent supports across coordinates")
            new_cols.append(col)
            new_labels.append(f"{name}{t}")
    clash = set(new_labels) & set(N.labels)
    if clash:
        raise MatroidError(f"core labels collide with ground set: {sorted(clash)}")
    fan_elems = {x for f in fans for x in f.sequence}
    ends = [algebra.normalize_projective(c[0], p) for c, lab in zip(new_cols, new_labels) if lab[0] in "ac"]
    keep = []
    for e, x in enumerate(N.labels):
        if x in fan_elems:
            continue
        v = algebra.normalize_projective(full[0][:, e], p)
        if v.any() and any(np.array_equal(v, w) for w in ends):
            continue  # the set S of the construction
        keep.append(e)
    cols = np.concatenate([full[:, :, keep], np.stack(new_cols, axis=2)], axis=2)
    return LinearMatroid.from_columns(N.ring, cols, [N.labels[e] for e in keep] + new_labels)


# --- generalized parallel connection and wheel gluing ---------------------


def _basis_from(M: LinearMatroid, start: Sequence[int]) -> list[int]:
    basis = list(start)
    for e in range(M.n):
        if e not in basis and M._rank_idx(basis + [e]) == len(basis) + 1:
            basis.append(e)
    return basis


def _is_triangle(M: LinearMatroid, T: Sequence[str]) -> bool:
    try:
        m = M.mask(T)
    except MatroidError:
        return False
    return m in set(triangle_masks(M))


def gpc(M1: LinearMatroid, M2: LinearMatroid, T: Sequence[str]) -> LinearMatroid:
    """Generalized parallel connection along a common triangle T.

    M2 is re-based so that T's first two elements are unit vectors, its two
    leading rows are scaled so that the third element of T carries M1's
    coefficients, and the remaining rows become new rows.
    """
    T = [str(x) for x in T]
    if M1.ring is not M2.ring:
        raise MatroidError("gpc needs matroids over the same ring")
    if not (_is_triangle(M1, T) and _is_triangle(M2, T)):
        raise MatroidError(f"{tuple(T)} is not a triangle of both matroids")
    shared = (set(M1.labels) & set(M2.labels)) - set(T)
    if shared:
        raise MatroidError(f"ground sets meet outside T: {sorted(shared)}")
    t1, t2, t3 = T
    k, p = M1.ring.width, M1.p
    inv = algebra.INV[p]
    b1 = _basis_from(M1, [M1.index(t1), M1.index(t2)])
    b2 = _basis_from(M2, [M2.index(t1), M2.index(t2)])
    S1 = M1._standard_for(b1)
    S2 = M2._standard_for(b2)
    r1, r2 = M1.r, M2.r
    rest = [e for e in range(M2.n) if M2.labels[e] not in T]
    cols = np.zeros((k, r1 + r2 - 2, M1.n + len(rest)), dtype=np.int64)
    cols[:, :r1, : M1.n] = S1
    for i in range(k):
        x, y = S1[i][0, M1.index(t3)], S1[i][1, M1.index(t3)]
        a, b = S2[i][0, M2.index(t3)], S2[i][1, M2.index(t3)]
        if not (x and y and a and b):
            raise MatroidError("column matching infeasible")
        la, lb = (x * inv[a]) % p, (y * inv[b]) % p
        for j, e in enumerate(rest):
            u = S2[i][:, e]
            cols[i, 0, M1.n + j] = (la * u[0]) % p
            cols[i, 1, M1.n + j] = (lb * u[1]) % p
            cols[i, r1:, M1.n + j] = u[2:]
    labels = list(M1.labels) + [M2.labels[e] for e in rest]
    return LinearMatroid.from_columns(M1.ring, cols, labels)


def glued_wheel(n: int, triangle: Sequence[str], tag: str, ring) -> LinearMatroid:
    """Rank-n wheel with triangle (s0, r0, s1) renamed to the given triple."""
    W, _, _ = wheel(n, ring)
    a, b, c = (str(x) for x in triangle)
    ren = {"s0": a, "r0": b, "s1": c}
    return W.relabel({x: ren.get(x, f"{x}_{tag}") for x in W.labels})


def glue_wheels(N: LinearMatroid, spec: WheelGlueSpec) -> LinearMatroid:
    for t in spec.triangles:
        if not _is_triangle(N, t):
            raise MatroidError(f"{t} is not a triangle")
    M = N
    for i, (t, rk) in enumerate(zip(spec.triangles, spec.ranks), start=1):
        tag = str(i)
        W = glued_wheel(rk, t, tag, N.ring)
        while set(W.labels) & set(M.labels) - set(t):
            tag += "'"
            W = glued_wheel(rk, t, tag, N.ring)
        M = gpc(M, W, t)
    return M.delete(spec.X) if spec.X else M


def parse_glue(text: str) -> tuple[str, tuple, int]:
    """``NAME:(a,b,c):k`` -> (NAME, (a,b,c), k)."""
    try:
        name, rest = text.split(":", 1)
        tri, rank = rest.rsplit(":", 1)
        tri = tri.strip()
        if not (tri.startswith("(") and tri.endswith(")")):
            raise ValueError
        elems = tuple(x.strip() for x in tri[1:-1].split(","))
        if len(elems) != 3 or not all(elems):
            raise ValueError
        return name.strip(), elems, int(rank)
    except ValueError:
        raise MatroidError(f"bad glue spec {text!r}; expected NAME:(a,b,c):k") from None


def gluing_family(
    N: LinearMatroid,
    triangles: Sequence[Sequence[str]],
    max_size: int,
    *,
    max_rank: int = 6,
) -> list[LinearMatroid]:
    """Every matroid obtained by gluing wheels to all the given triangles, up to max_size elements."""
    tris = [tuple(str(x) for x in t) for t in triangles]
    union = sorted({x for t in tris for x in t})
    ends = {t[0] for t in tris} | {t[2] for t in tris}
    forced = {t[1] for t in tris if t[1] not in ends}
    optional = [x for x in union if x not in forced]
    out = []
    for ranks in itertools.product(range(2, max_rank + 1), repeat=len(tris)):
        total = N.n + sum(2 * k - 3 for k in ranks)
        if total - len(forced) - len(optional) > max_size:
            continue
        big = glue_wheels(N, WheelGlueSpec(tris, ranks, forced))
        for j in range(len(optional) + 1):
            for extra in itertools.combinations(optional, j):
                if big.n - j > max_size:
                    continue
                out.append(big.delete(extra) if extra else big)
    return dedup(out)
