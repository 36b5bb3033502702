"""Named matroids and the enumerated catalogs of both fragile classes.

Matroids that come from explicit matrices (F7, R10, uniform matroids, P6,
Q6, the product-ring U25) are built directly.  Everything else is derived:
by enumeration (N11, N11+, the size-indexed catalog members ``M_k_i``), by
construction (N12), or by structural evidence picking one catalog member
out of the rest (X8, Y8, M71, M85, M86 and the size-9 roles ``M9_i``).

Catalog order at each size is the fingerprint order of :func:`iso.dedup`.
Role names are independent of that order; they are pinned by the checks in
:func:`h5_roles`, which raise :class:`AmbiguityError` when a rule leaves more
or fewer than one candidate.
"""

from __future__ import annotations

import enum
import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .algebra import Ring
from .constructions import (
    Graft,
    Graph,
    canonical_u25,
    fano,
    graft,
    graphic,
    p6,
    q6,
    r10,
    uniform,
    wheel,
)
from .fragility import (
    ClassId,
    in_class,
    inequivalent_projection_count,
    is_valid_product_rep,
    raw_coextensions,
    raw_extensions,
    extensions,
    coextensions,
)
from .iso import dedup, index_of, isomorphic
from .matroid import (
    LinearMatroid,
    MatroidError,
    is_3connected,
    parallel_classes,
    simplify,
    triangle_masks,
)
from .structure import Fan, WheelGlueSpec, all_fans, core, find_fans, glue_wheels, gluing_family

log = logging.getLogger(__name__)

__all__ = [
    "AmbiguityError",
    "Provenance",
    "NamedMatroid",
    "Graph",
    "Graft",
    "uniform",
    "wheel",
    "graphic",
    "graft",
    "enumerate_class",
    "install_levels",
    "catalog_levels",
    "minor_links",
    "dual_index",
    "h5_roles",
    "named",
    "NAMES",
]


class AmbiguityError(MatroidError):
    """A derivation rule did not single out exactly one matroid."""


class Provenance(enum.Enum):
    EXPLICIT = "explicit-matrix"
    ENUMERATED = "derived-by-enumeration"
    CONSTRUCTED = "derived-by-construction"


@dataclass(frozen=True)
class NamedMatroid:
    name: str
    matroid: LinearMatroid
    provenance: Provenance
    evidence: tuple = field(default_factory=tuple)  # (description, passed)

    def __post_init__(self):
        failed = [d for d, ok in self.evidence if not ok]
        if failed:
            raise AmbiguityError(f"{self.name}: evidence failed: {'; '.join(failed)}")


# --- class catalogs -----------------------------------------------------------

_LEVELS: dict[ClassId, dict[int, list[LinearMatroid]]] = {}
_LINKS: dict[tuple, list[frozenset]] = {}


def seeds(c: ClassId) -> list[LinearMatroid]:
    if c is ClassId.H5_FRAGILE:
        U = canonical_u25()
        return [U, U.dual()]
    F = fano()
    return [F, F.dual()]


def enumerate_class(
    c: ClassId, max_size: int, *, progress: Optional[Callable[[int, int], None]] = None
) -> dict[int, list[LinearMatroid]]:
    """3-connected class members of every size up to ``max_size``, one per isomorphism class.

    Each level is all 3-connected in-class single-element extensions and
    coextensions of the previous level; the splitter theorem makes this
    exhaustive because neither seed is a wheel or a whirl.
    """
    levels = _LEVELS.setdefault(c, {})
    s0 = seeds(c)[0].n
    if s0 not in levels:
        levels[s0] = dedup(seeds(c))
        if progress:
            progress(s0, len(levels[s0]))
    size = max(levels)
    while size < max_size:
        nxt = []
        for M in levels[size]:
            nxt += raw_extensions(M, c)
            nxt += raw_coextensions(M, c)
        size += 1
        levels[size] = dedup(nxt)
        if progress:
            progress(size, len(levels[size]))
    return {k: v for k, v in levels.items() if k <= max_size}


def install_levels(c: ClassId, levels: dict[int, list[LinearMatroid]]) -> None:
    """Seed the in-process catalog, e.g. from a disk cache.  Levels must be contiguous."""
    sizes = sorted(levels)
    if sizes and sizes != list(range(sizes[0], sizes[-1] + 1)):
        raise MatroidError("catalog levels must be contiguous")
    _LEVELS[c] = {k: list(v) for k, v in levels.items()}
    for key in [k for k in _LINKS if k[0] is c]:
        del _LINKS[key]


def catalog_levels(c: ClassId) -> dict[int, list[LinearMatroid]]:
    return dict(_LEVELS.get(c, {}))


def minor_links(c: ClassId, size: int) -> list[frozenset]:
    """For each member of the given size, the indices one size down of its 3-connected single-element minors."""
    key = (c, size)
    if key in _LINKS:
        return _LINKS[key]
    levels = enumerate_class(c, size)
    below = levels.get(size - 1, [])
    out = []
    for M in levels[size]:
        hit = set()
        for x in M.labels:
            for K in (M.delete([x]), M.contract([x])):
                if is_3connected(K):
                    j = index_of(K, below)
                    if j is not None:
                        hit.add(j)
        out.append(frozenset(hit))
    _LINKS[key] = out
    return out


def minors_at(c: ClassId, size: int, i: int, target: int) -> frozenset:
    """Catalog indices at size ``target`` of 3-connected minors of member ``(size, i)``."""
    cur = {i}
    for s in range(size, target, -1):
        links = minor_links(c, s)
        cur = set().union(*(links[j] for j in cur)) if cur else set()
    return frozenset(cur)


def dual_index(c: ClassId, size: int, i: int) -> int:
    level = enumerate_class(c, size)[size]
    j = index_of(level[i].dual(), level)
    if j is None:
        raise MatroidError("catalog is not closed under duality")
    return j


# --- structural evidence ---------------------------------------------------


def _u25_plain() -> LinearMatroid:
    return uniform(2, 5, Ring.GF5)


def _si_is_u25(K: LinearMatroid) -> bool:
    S, _ = simplify(K)
    return S.n == 5 and isomorphic(S.projection(0), _u25_plain())


def _parallel_sizes(K: LinearMatroid) -> list[int]:
    return sorted(len(p) for p in parallel_classes(K) if len(p) > 1)


def fan_families(M: LinearMatroid, lengths: Sequence[int]) -> list[tuple]:
    """Disjoint tuples of fans of M with the given lengths."""
    fans = all_fans(M)
    pools = [[f for f in fans if len(f) == k] for k in lengths]
    out = []
    for fam in itertools.product(*pools):
        elems = [x for f in fam for x in f.sequence]
        if len(set(elems)) != len(elems):
            continue
        # equal lengths: keep one ordering
        if any(lengths[a] == lengths[b] and fam[a].sequence > fam[b].sequence for a, b in itertools.combinations(range(len(fam)), 2)):
            continue
        out.append(fam)
    return out


def core_families(M: LinearMatroid, lengths: Sequence[int], pred: Callable) -> list[tuple]:
    """Fan families of the given lengths whose core exists and satisfies ``pred``."""
    out = []
    for fam in fan_families(M, lengths):
        try:
            K = core(M, list(fam))
        except MatroidError:
            continue
        if pred(K, fam):
            out.append(fam)
    return out


def _segment_sizes(M: LinearMatroid) -> int:
    """Largest number of points on a rank-2 flat."""
    best = 0
    for a, b in itertools.combinations(M.labels, 2):
        if M.rank([a, b]) == 2:
            best = max(best, len(M.closure([a, b])))
    return best


def _x8_like(M: LinearMatroid) -> bool:
    return _segment_sizes(M) >= 4 and _segment_sizes(M.dual()) >= 4


# Fan-family shapes and core tests for the size-9 roles.  ``high`` means the
# role sits on the higher-rank member of its dual pair.
def _core_918(K, fam):
    return K.n == 9 and _parallel_sizes(K) == [3, 3] and _si_is_u25(K)


def _core_915(K, fam):
    return K.n == 7 and _parallel_sizes(K) == [2, 2] and _si_is_u25(K)


def _core_92(K, fam):
    return K.n == 6 and _parallel_sizes(K) == [2] and _si_is_u25(K)


def _core_97(K, fam):
    return fam[0].first_triple_is_triangle and K.n == 7 and is_3connected(K) and in_class(K, ClassId.H5_FRAGILE)


def _core_90(K, fam):
    return _si_is_u25(K)


ROLE_RULES = {
    "M9_18": ((3, 3, 3), _core_918, True),
    "M9_7": ((5,), _core_97, False),
    "M9_15": ((5, 3), _core_915, True),
    "M9_2": ((4, 4), _core_92, False),
    "M9_0": ((7,), _core_90, False),
}

PROOF_ORDER = ("M9_9", "M9_18", "M9_7", "M9_15", "M9_2", "M9_1", "M9_0")


@dataclass
class RoleTable:
    """Size-9 role assignments plus the smaller named members they rest on."""

    roles: dict  # role name -> catalog index at size 9
    duals: dict  # catalog index -> dual catalog index (size 9)
    families: dict  # role name -> list of qualifying fan families
    excluded: tuple  # size-9 indices with an X8 / Y8 / Y8* minor
    small: dict  # name -> (size, index) for X8, Y8, Y8*, M71, M85, M86
    notes: list = field(default_factory=list)
    ambiguous: dict = field(default_factory=dict)  # role -> candidate indices when a rule ties

    def context(self, role: str) -> set[int]:
        """Indices excluded before ``role`` is handled: X8/Y8 members and earlier roles with duals."""
        out = set(self.excluded)
        for r in PROOF_ORDER:
            if r == role:
                break
            if r in self.roles:
                i = self.roles[r]
                out |= {i, self.duals[i]}
        return out

    def index(self, name: str) -> tuple[int, int]:
        m = re.fullmatch(r"M9_(\d+)", name)
        if m:
            k = int(m.group(1))
            base, flip = (f"M9_{k}", False) if f"M9_{k}" in self.roles else (f"M9_{k - 10}" if k >= 10 else f"M9_{k + 10}", True)
            if base not in self.roles:
                raise KeyError(name)
            i = self.roles[base]
            return 9, (self.duals[i] if flip else i)
        return self.small[name]


_ROLES: Optional[RoleTable] = None


def _gluing_products(N: LinearMatroid, size: int) -> list[LinearMatroid]:
    """Gluing products of the shapes allowed for U25-based members, up to ``size`` elements."""
    out = []
    L = N.labels
    a, b, c, d, e = L[:5]
    for tris in ([(a, c, b), (a, d, b), (a, e, b)], [(a, b, c), (c, d, e)]):
        for j in range(1, len(tris) + 1):
            for sub in itertools.combinations(tris, j):
                out += gluing_family(N, sub, size, max_rank=4)
    return out


def h5_roles(*, check_gluing: bool = True) -> RoleTable:
    """Assign the size-9 roles of the proof to catalog members by evidence.

    Needs the catalog up to size 11 (terminal roles are tested against all
    growth by two elements).
    """
    global _ROLES
    if _ROLES is not None:
        return _ROLES
    c = ClassId.H5_FRAGILE
    L = enumerate_class(c, 11)
    notes = []
    duals = {i: dual_index(c, 9, i) for i in range(len(L[9]))}
    small: dict = {}

    # X8: 4-point segment and 4-element cosegment
    x8 = [i for i, M in enumerate(L[8]) if _x8_like(M)]
    if len(x8) != 1:
        raise AmbiguityError(f"X8 candidates {x8}")
    small["X8"] = (8, x8[0])
    notes.append(f"X8 = M_8_{x8[0]}: the only 8-element member with a 4-point segment and a 4-element cosegment")

    # Y8: the dual pair whose minor-closure with X8 excludes exactly three size-9 dual pairs
    cont = {j: {i for i in range(len(L[9])) if j in minor_links(c, 9)[i]} for j in range(len(L[8]))}
    d8 = {j: dual_index(c, 8, j) for j in range(len(L[8]))}
    x_set = cont[x8[0]] | cont[d8[x8[0]]]
    y_cands = []
    for j in range(len(L[8])):
        if j in (x8[0], d8[x8[0]]) or j > d8[j]:
            continue
        hit = x_set | cont[j] | cont[d8[j]]
        pairs = {frozenset((i, duals[i])) for i in hit}
        if len(hit) == 6 and len(pairs) == 3:
            y_cands.append(j)
    if check_gluing:
        products = _gluing_products(canonical_u25(), 8)
        y_cands = [j for j in y_cands if not any(isomorphic(L[8][j], P) for P in products if P.n == 8)]
    if len(y_cands) != 1:
        raise AmbiguityError(f"Y8 candidates {y_cands}")
    y = y_cands[0]
    small["Y8"], small["Y8*"] = (8, y), (8, d8[y])
    excluded = tuple(sorted(x_set | cont[y] | cont[d8[y]]))
    notes.append(f"Y8, Y8* = M_8_{y}, M_8_{d8[y]}; size-9 members with an X8/Y8/Y8* minor: {list(excluded)}")

    def low(i):  # the lower-rank member of a dual pair
        return i if L[9][i].r <= L[9][duals[i]].r else duals[i]

    roles: dict = {}
    families: dict = {}
    ambiguous: dict = {}
    table = RoleTable(roles, duals, families, excluded, small, notes, ambiguous)

    def taken():
        return set(excluded) | {x for i in roles.values() for x in (i, duals[i])}

    def terminal(i, ctx):
        """Every member grown from i by at most two elements contains a context member, apart from i itself."""
        for s in (10, 11):
            for j in range(len(L[s])):
                mins = minors_at(c, s, j, 9)
                if i in mins and not (mins & ctx):
                    return False
        return True

    fams: dict = {}
    for role, (lengths, pred, high) in ROLE_RULES.items():
        fams[role] = {}
        for i in range(len(L[9])):
            if i in excluded or ((i == low(i)) == high and L[9][i].r != L[9][duals[i]].r):
                continue
            fs = core_families(L[9][i], lengths, pred)
            if fs:
                fams[role][i] = fs
    term_cache: dict = {}

    def cands_for(role, free):
        if role in ROLE_RULES:
            return [i for i in sorted(fams[role]) if i in free]
        ctx = table.context(role)
        out = []
        for i in free:
            if i != low(i):
                continue
            key = (i, frozenset(ctx))
            if key not in term_cache:
                term_cache[key] = terminal(i, ctx)
            if term_cache[key]:
                out.append(i)
        return out

    solutions = []

    def search(k):
        if k == len(PROOF_ORDER):
            if len(taken()) == len(L[9]):
                solutions.append(dict(roles))
            return
        role = PROOF_ORDER[k]
        for i in cands_for(role, sorted(set(range(len(L[9]))) - taken())):
            roles[role] = i
            search(k + 1)
            del roles[role]

    search(0)
    for role in PROOF_ORDER:
        per_rule = sorted(fams[role]) if role in ROLE_RULES else None
        if per_rule is not None and len(per_rule) > 1:
            ambiguous[role] = per_rule
    if len(solutions) != 1:
        raise AmbiguityError(f"{len(solutions)} role assignments satisfy the evidence: {solutions}")
    roles.update(solutions[0])
    for role in PROOF_ORDER:
        i = roles[role]
        families[role] = fams[role][i] if role in ROLE_RULES else []
        extra = f"; the rule alone admits {ambiguous[role]}, the others are forced elsewhere" if role in ambiguous else ""
        notes.append(f"{role} = M_9_{i} (dual M_9_{duals[i]}){extra}")

    # M71: core of the M9_7 family
    fam7 = families["M9_7"][0]
    K = core(L[9][roles["M9_7"]], list(fam7))
    j = index_of(K, L[7])
    small["M71"] = (7, j)
    # M86: the 8-element minor of M9_7 containing M71
    m86 = [k for k in minor_links(c, 9)[roles["M9_7"]] if j in minor_links(c, 8)[k]]
    if len(m86) != 1:
        raise AmbiguityError(f"M86 candidates {m86}")
    small["M86"] = (8, m86[0])
    # M85: 8-element member whose size-9 extensions are the M9_2 and M9_9 pairs plus excluded ones
    want = {x for r in ("M9_2", "M9_9") for x in (roles[r], duals[roles[r]])}
    m85 = [k for k in range(len(L[8])) if want <= cont[k] and cont[k] - want <= set(excluded)]
    if len(m85) != 1:
        raise AmbiguityError(f"M85 candidates {m85}")
    small["M85"] = (8, m85[0])
    notes.append(f"M71 = M_7_{j}, M86 = M_8_{m86[0]}, M85 = M_8_{m85[0]}")
    if len(set(roles.values())) != len(roles) or len(taken()) != len(L[9]):
        raise AmbiguityError("role assignment does not partition the size-9 catalog")
    _ROLES = table
    return table


def reset() -> None:
    global _ROLES
    _ROLES = None
    _LEVELS.clear()
    _LINKS.clear()


# --- the Fano side ------------------------------------------------------------


def _n11() -> LinearMatroid:
    ext = extensions(r10(), ClassId.FANO_FRAGILE)
    if len(ext) != 1:
        raise AmbiguityError(f"R10 has {len(ext)} Fano-fragile extensions")
    return ext[0]


def _n11_plus() -> LinearMatroid:
    co = coextensions(_n11(), ClassId.FANO_FRAGILE)
    if len(co) != 1:
        raise AmbiguityError(f"N11 has {len(co)} Fano-fragile coextensions")
    return co[0]


def _four_fans(M: LinearMatroid) -> list[Fan]:
    return [f for f in find_fans(M) if len(f) == 4]


def _n12_predicate(M: LinearMatroid) -> bool:
    """Three disjoint 4-fans whose leading elements form a circuit and second elements an independent set."""
    fans = _four_fans(M)
    for fam in itertools.combinations(fans, 3):
        if len({x for f in fam for x in f.sequence}) != 12:
            continue
        for orient in itertools.product((False, True), repeat=3):
            fs = [f.reversed() if o else f for f, o in zip(fam, orient)]
            if len({f.first_triple_is_triangle for f in fs}) != 1:
                continue
            first = [f.sequence[0] for f in fs]
            second = [f.sequence[1] for f in fs]
            if M.rank(first) == 2 and M.is_independent(second):
                return True
    return False


def n12_candidates() -> list[LinearMatroid]:
    """Glue rank-3 wheels to the three triangles of F7 through one point, delete that point and the three middles."""
    F = fano()
    out = []
    for x in F.labels:
        tris = [F.subset(m) for m in triangle_masks(F) if x in F.subset(m)]
        pairs = [sorted(t - {x}) for t in tris]
        for flip in itertools.product((0, 1), repeat=3):
            spec_tris = []
            for (u, v), fl in zip(pairs, flip):
                mid, end = (u, v) if fl == 0 else (v, u)
                spec_tris.append((x, mid, end))
            X = {x} | {t[1] for t in spec_tris}
            M = glue_wheels(F, WheelGlueSpec(spec_tris, (3, 3, 3), X))
            if M.n == 12 and is_3connected(M) and in_class(M, ClassId.FANO_FRAGILE) and _n12_predicate(M):
                out.append(M)
    return dedup(out)


def _n12() -> LinearMatroid:
    cands = n12_candidates()
    if len(cands) != 1:
        raise AmbiguityError(f"{len(cands)} gluings satisfy the N12 evidence")
    return cands[0]


# --- registry -----------------------------------------------------------------


def _ev(desc: str, ok) -> tuple:
    return (desc, bool(ok))


def _uniform_named(name, r, n):
    M = uniform(r, n, Ring.GF5x6)
    return NamedMatroid(name, M, Provenance.EXPLICIT, (_ev(f"rank {r}", M.r == r), _ev(f"{n} elements", M.n == n)))


def _catalog_member(size: int, i: int) -> LinearMatroid:
    level = enumerate_class(ClassId.H5_FRAGILE, size)[size]
    if not 0 <= i < len(level):
        raise KeyError(f"M_{size}_{i}")
    return level[i]


def _build(name: str) -> NamedMatroid:
    E, D, C = Provenance.EXPLICIT, Provenance.ENUMERATED, Provenance.CONSTRUCTED
    if name == "F7":
        M = fano()
        return NamedMatroid(name, M, E, (_ev("7 triangles", len(triangle_masks(M)) == 7), _ev("rank 3", M.r == 3)))
    if name == "F7*":
        M = fano().dual()
        return NamedMatroid(name, M, E, (_ev("rank 4", M.r == 4),))
    if name == "R10":
        M = r10()
        dels = [M.delete([x]) for x in M.labels]
        return NamedMatroid(
            name,
            M,
            E,
            (
                _ev("10 elements, rank 5", (M.n, M.r) == (10, 5)),
                _ev("self-dual", isomorphic(M, M.dual())),
                _ev("single-element deletions isomorphic", all(isomorphic(dels[0], K) for K in dels)),
            ),
        )
    if name == "N11":
        M = _n11()
        return NamedMatroid(name, M, D, (_ev("only Fano-fragile extension of R10", True), _ev("11 elements", M.n == 11)))
    if name == "N11+":
        M = _n11_plus()
        return NamedMatroid(name, M, D, (_ev("only Fano-fragile coextension of N11", True), _ev("12 elements", M.n == 12)))
    if name == "N12":
        M = _n12()
        return NamedMatroid(
            name,
            M,
            C,
            (_ev("three 4-fans: leading elements a circuit, second elements independent", _n12_predicate(M)),),
        )
    if name in ("U25", "U35"):
        U = canonical_u25()
        M = U if name == "U25" else U.dual()
        return NamedMatroid(
            name,
            M,
            E,
            (_ev("valid product representation", is_valid_product_rep(M)), _ev("6 inequivalent projections", inequivalent_projection_count(M) == 6)),
        )
    if name in ("U26", "U36", "U46"):
        r = int(name[1])
        return _uniform_named(name, r, 6)
    if name in ("P6", "Q6"):
        M = (p6() if name == "P6" else q6()).lift(Ring.GF5x6)
        return NamedMatroid(name, M, E, (_ev("rank 3, 6 elements", (M.r, M.n) == (3, 6)), _ev("3-connected", is_3connected(M))))
    m = re.fullmatch(r"M_(\d+)_(\d+)", name)
    if m:
        size, i = int(m.group(1)), int(m.group(2))
        M = _catalog_member(size, i)
        return NamedMatroid(name, M, D, (_ev("3-connected", is_3connected(M)), _ev("in class", in_class(M, ClassId.H5_FRAGILE))))
    if re.fullmatch(r"M9_\d+", name) or name in ("X8", "Y8", "Y8*", "M71", "M85", "M86"):
        R = h5_roles()
        size, i = R.index(name)
        M = _catalog_member(size, i)
        return NamedMatroid(name, M, D, tuple(_ev(n, True) for n in R.notes if name.split("*")[0] in n) or (_ev("role evidence", True),))
    raise KeyError(name)


NAMES = (
    "F7", "F7*", "R10", "N11", "N11+", "N12",
    "U25", "U35", "U26", "U36", "U46", "P6", "Q6",
    "X8", "Y8", "Y8*", "M71", "M85", "M86",
    "M9_0", "M9_1", "M9_2", "M9_7", "M9_9", "M9_15", "M9_18",
    "M_k_i",
)

_NAMED: dict[str, NamedMatroid] = {}


def named(name: str) -> NamedMatroid:
    """The matroid registered under ``name``; ``M_k_i`` is catalog member i of size k."""
    key = name.strip()
    if key not in _NAMED:
        try:
            _NAMED[key] = _build(key)
        except KeyError:
            raise KeyError(f"unknown matroid name {name!r}") from None
    return _NAMED[key]
