"""Verification tasks, catalog persistence and reports.

Each task re-runs one step of the case analysis and returns a
:class:`Report`.  Claims about size-9 members are made inside a minimal
counterexample, so a grown matroid that contains an earlier-handled size-9
member (or one with an X8 / Y8 / Y8* minor) is set aside; ``counts`` records
how many grown matroids were set aside this way and how many fail the
claim without that context (``literal_*`` keys).
"""

from __future__ import annotations

import enum
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import catalog
from .catalog import AmbiguityError, core_families
from .fragility import (
    ClassId,
    coextensions,
    extensions,
    grow,
    has_minor,
    in_class,
)
from .io import from_text, to_text, write_matroid
from .iso import find_isomorphism, fingerprint, index_of, isomorphic
from .matroid import (
    LinearMatroid,
    MatroidError,
    is_3connected,
    is_3connected_up_to_sp,
    parallel_classes,
    simplify,
)
from .constructions import fano, r10
from .structure import core, fan_extension_closure, find_fans

FORMAT_VERSION = 1
DEFAULT_CACHE = "fragile-cache"
H5 = ClassId.H5_FRAGILE
FANO = ClassId.FANO_FRAGILE
ROLE_SIZE = 11  # catalog depth needed to place every member of grow(M9_i, 2)

TASKS = ("N11", "N12", "M9_9", "M9_18", "M9_7", "M9_15", "M9_2", "M9_1", "M9_0", "hypotheses", "duality")


class Status(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    AMBIGUOUS = "ambiguous"


@dataclass
class Report:
    task: str
    status: Status
    counts: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    millis: int = 0
    notes: list = field(default_factory=list)

    def __post_init__(self):
        self.status = Status(self.status)
        if self.status is Status.FAIL and not self.witnesses:
            raise ValueError(f"failed report for {self.task} carries no witness")

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    matroid: LinearMatroid
    size: int
    cls: ClassId
    provenance: str
    fingerprint: tuple

    def __post_init__(self):
        if self.size != self.matroid.n or self.fingerprint != fingerprint(self.matroid):
            raise MatroidError(f"catalog entry {self.name} does not match its matroid")
        if not (is_3connected(self.matroid) and in_class(self.matroid, self.cls)):
            raise MatroidError(f"catalog entry {self.name} is not a 3-connected class member")


# --- cache --------------------------------------------------------------------


def resolve_cache_dir(flag: Optional[str] = None) -> Path:
    """``--cache-dir`` beats ``FRAGILE_CACHE_DIR`` beats ``./fragile-cache``."""
    return Path(flag or os.environ.get("FRAGILE_CACHE_DIR") or DEFAULT_CACHE)


class Cache:
    def __init__(self, directory=None):
        self.dir = resolve_cache_dir(None if directory is None else str(directory))

    def _catalog_path(self, c: ClassId) -> Path:
        return self.dir / f"catalog-{c.value}.json"

    def load_catalog(self, c: ClassId) -> Optional[dict[int, list[LinearMatroid]]]:
        path = self._catalog_path(c)
        if not path.exists():
            return None
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            return None
        if data.get("format") != FORMAT_VERSION or data.get("class") != c.value:
            return None
        return {int(k): [from_text(t) for t in v] for k, v in data["levels"].items()}

    def save_catalog(self, c: ClassId, levels: dict[int, list[LinearMatroid]]) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        data = {
            "format": FORMAT_VERSION,
            "class": c.value,
            "levels": {str(k): [to_text(M) for M in v] for k, v in sorted(levels.items())},
        }
        path = self._catalog_path(c)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(data), encoding="utf-8")
        tmp.replace(path)
        return path

    def write_witness(self, task: str, k: int, M: LinearMatroid) -> str:
        d = self.dir / "witnesses"
        d.mkdir(parents=True, exist_ok=True)
        return str(write_matroid(M, d / f"{task}-{k}.txt"))


def ensure_catalog(c: ClassId, max_size: int, cache: Cache) -> dict[int, list[LinearMatroid]]:
    """Load the catalog from disk when it reaches ``max_size``, otherwise extend it and save."""
    have = catalog.catalog_levels(c)
    if have and max(have) >= max_size:
        if not cache._catalog_path(c).exists():
            cache.save_catalog(c, have)
        return {k: v for k, v in have.items() if k <= max_size}
    disk = cache.load_catalog(c)
    if disk and (not have or max(disk) > max(have)):
        catalog.install_levels(c, disk)
    levels = catalog.enumerate_class(c, max_size)
    disk_max = max(disk) if disk else 0
    if max(levels) > disk_max:
        cache.save_catalog(c, catalog.catalog_levels(c))
    return levels


# --- helpers -----------------------------------------------------------------


def _timed(fn):
    def run(*args, **kw):
        t0 = time.perf_counter()
        rep = fn(*args, **kw)
        rep.millis = int(1000 * (time.perf_counter() - t0))
        return rep

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _finish(task, ok, counts, bad, cache, notes=()):
    witnesses = [cache.write_witness(task, k, M) for k, M in enumerate(bad)] if not ok else []
    if not ok and not witnesses:
        raise AssertionError("failure without witness")
    return Report(task, Status.PASS if ok else Status.FAIL, counts, witnesses, notes=list(notes))


def _missing(grown: Sequence[LinearMatroid], closure: Sequence[LinearMatroid]) -> list[LinearMatroid]:
    return [g for g in grown if not any(k.n == g.n and find_isomorphism(g, k) is not None for k in closure)]


def _size9_minors(M: LinearMatroid) -> frozenset:
    """Catalog indices of size-9 members that are minors of a catalog member M."""
    j = index_of(M, catalog.catalog_levels(H5)[M.n])
    if j is None:
        raise MatroidError("grown matroid is missing from the catalog")
    return catalog.minors_at(H5, M.n, j, 9)


def _base_for(role: str, base: Optional[LinearMatroid]) -> tuple[LinearMatroid, list]:
    R = catalog.h5_roles()
    L = catalog.catalog_levels(H5)
    if base is None:
        return L[9][R.roles[role]], R.families.get(role, [])
    if role in catalog.ROLE_RULES:
        lengths, pred, _ = catalog.ROLE_RULES[role]
        return base, core_families(base, lengths, pred)
    return base, []


def _context_split(grown, base, ctx):
    """(grown members outside the context, members set aside)."""
    keep, aside = [], []
    for g in grown:
        if g is not base and _size9_minors(g) & ctx:
            aside.append(g)
        else:
            keep.append(g)
    return keep, aside


def _not_in_class(task, base, cache, c=H5, *, member=True):
    ok = base.ring is c.ring and is_3connected(base) and (not member or in_class(base, c))
    if not ok:
        return _finish(task, False, {"base_in_class": 0}, [base], cache)
    return None


# --- tasks --------------------------------------------------------------------


@_timed
def verify_n11(cache: Cache, base: Optional[LinearMatroid] = None) -> Report:
    R10 = base if base is not None else r10()
    # R10 has no Fano minor; only its extensions are class members
    bad = _not_in_class("N11", R10, cache, FANO, member=False)
    if bad:
        return bad
    counts = {}
    e1 = extensions(R10, FANO)
    counts["extensions_R10"] = len(e1)
    if len(e1) != 1:
        return _finish("N11", False, counts, e1 or [R10], cache)
    N11 = e1[0]
    e2, c2 = extensions(N11, FANO), coextensions(N11, FANO)
    counts["extensions_N11"], counts["coextensions_N11"] = len(e2), len(c2)
    if e2 or len(c2) != 1:
        return _finish("N11", False, counts, e2 + c2 or [N11], cache)
    N11p = c2[0]
    grown = grow(N11p, 2, FANO)
    counts["grown"] = len(grown)
    best = None
    for f in [f for f in find_fans(N11p) if len(f) == 4] + [f for f in find_fans(N11p) if len(f) > 4]:
        try:
            K = core(N11p, [f])
        except MatroidError:
            continue
        if find_isomorphism(K, N11) is None:
            continue
        miss = _missing(grown, fan_extension_closure(N11p, [f], 2, FANO))
        if best is None or len(miss) < len(best[1]):
            best = (f, miss)
        if not miss:
            break
    if best is None:
        counts["families"] = 0
        return _finish("N11", False, counts, [N11p], cache)
    counts["missing"] = len(best[1])
    return _finish("N11", not best[1], counts, best[1], cache, [f"fan {best[0]}"])


@_timed
def verify_n12(cache: Cache, base: Optional[LinearMatroid] = None) -> Report:
    N = base if base is not None else catalog.named("N12").matroid
    bad = _not_in_class("N12", N, cache, FANO)
    if bad:
        return bad
    grown = grow(N, 2, FANO)
    counts = {"grown": len(grown)}
    best = None
    for fam in catalog.fan_families(N, (4, 4, 4)):
        try:
            K = core(N, list(fam))
        except MatroidError:
            continue
        S, _ = simplify(K)
        pcs = sorted(len(p) for p in parallel_classes(K) if len(p) > 1)
        if pcs != [3] or not isomorphic(S, fano()):
            continue
        miss = _missing(grown, fan_extension_closure(N, list(fam), 2, FANO))
        if best is None or len(miss) < len(best[1]):
            best = (fam, miss)
        if not miss:
            break
    if best is None:
        counts["families"] = 0
        return _finish("N12", False, counts, [N], cache)
    counts["missing"] = len(best[1])
    return _finish("N12", not best[1], counts, best[1], cache, [" ".join(str(f) for f in best[0])])


def _setup_h5(cache):
    ensure_catalog(H5, ROLE_SIZE, cache)
    return catalog.h5_roles()


@_timed
def verify_terminal(role: str, cache: Cache, base: Optional[LinearMatroid] = None) -> Report:
    """grow(M, 2) inside the context is M alone."""
    R = _setup_h5(cache)
    N, _ = _base_for(role, base)
    bad = _not_in_class(role, N, cache)
    if bad:
        return bad
    grown = grow(N, 2, H5)
    keep, aside = _context_split(grown, N, R.context(role))
    others = [g for g in keep if g is not N]
    counts = {"grown": len(grown), "set_aside": len(aside), "outside_context": len(keep), "literal_others": len(grown) - 1}
    return _finish(role, not others, counts, others, cache)


@_timed
def verify_fan_case(role: str, cache: Cache, base: Optional[LinearMatroid] = None) -> Report:
    """grow(M, 2) inside the context lies in the closure of some qualifying fan family."""
    R = _setup_h5(cache)
    N, fams = _base_for(role, base)
    bad = _not_in_class(role, N, cache)
    if bad:
        return bad
    counts = {"families": len(fams)}
    if not fams:
        return _finish(role, False, counts, [N], cache, ["no fan family with the required core"])
    grown = grow(N, 2, H5)
    keep, aside = _context_split(grown, N, R.context(role))
    counts.update(grown=len(grown), set_aside=len(aside))
    best = None
    for fam in fams:
        cl = fan_extension_closure(N, list(fam), 2, H5)
        miss = _missing(grown, cl)
        miss_ctx = [g for g in miss if any(g is k for k in keep)]
        key = (len(miss_ctx), len(miss))
        if best is None or key < best[0]:
            best = (key, fam, miss_ctx, miss)
        if not miss:
            break
    (_, fam, miss_ctx, miss) = best
    counts.update(missing=len(miss_ctx), literal_missing=len(miss))
    return _finish(role, not miss_ctx, counts, miss_ctx, cache, [" ".join(str(f) for f in fam)])


@_timed
def verify_m9_0(cache: Cache, base: Optional[LinearMatroid] = None) -> Report:
    """Every grown member has an M85-minor or lies in the closure of the 7-fan."""
    R = _setup_h5(cache)
    N, fams = _base_for("M9_0", base)
    bad = _not_in_class("M9_0", N, cache)
    if bad:
        return bad
    if not fams:
        return _finish("M9_0", False, {"families": 0}, [N], cache)
    M85 = catalog.named("M85").matroid
    grown = grow(N, 2, H5)
    keep, aside = _context_split(grown, N, R.context("M9_0"))
    cl = fan_extension_closure(N, list(fams[0]), 2, H5)
    outside = _missing(grown, cl)
    neither = [g for g in outside if not has_minor(g, M85)]
    neither_ctx = [g for g in neither if any(g is k for k in keep)]
    counts = {
        "grown": len(grown),
        "set_aside": len(aside),
        "closure": len(cl),
        "with_M85": sum(1 for g in outside if has_minor(g, M85)),
        "missing": len(neither_ctx),
        "literal_missing": len(neither),
    }
    return _finish("M9_0", not neither_ctx, counts, neither_ctx, cache, [str(fams[0][0])])


def _minors_with(M: LinearMatroid, N: LinearMatroid, depth: int):
    """Proper minors of M down to |E(N)|+1 elements that still have an N-minor (depth levels)."""
    seen = []
    frontier = [M]
    for _ in range(depth):
        nxt = []
        for K in frontier:
            for x in K.labels:
                for J in (K.delete([x]), K.contract([x])):
                    if J.n > N.n and has_minor(J, N) and not any(J.same_matroid(S) and J.labels == S.labels for S in nxt):
                        nxt.append(J)
        seen += nxt
        frontier = nxt
    return seen


@_timed
def verify_hypotheses(cache: Cache, base: Optional[LinearMatroid] = None) -> Report:
    """Every minor of a grown member that keeps the base minor is 3-connected up to series and parallel sets."""
    R = _setup_h5(cache)
    L = catalog.catalog_levels(H5)
    bases = [base] if base is not None else [L[9][R.roles[r]] for r in catalog.PROOF_ORDER]
    checked, bad = 0, []
    for N in bases:
        for M in grow(N, 2, H5):
            if not is_3connected_up_to_sp(M):
                bad.append(M)
            for J in _minors_with(M, N, M.n - N.n - 1):
                checked += 1
                if not is_3connected_up_to_sp(J):
                    bad.append(J)
    return _finish("hypotheses", not bad, {"bases": len(bases), "minors_checked": checked}, bad, cache)


@_timed
def verify_duality(cache: Cache, base: Optional[LinearMatroid] = None, max_size: int = 9) -> Report:
    levels = ensure_catalog(H5, max_size, cache)
    bad = []
    counts = {}
    for size, level in sorted(levels.items()):
        counts[str(size)] = len(level)
        for M in level:
            if index_of(M.dual(), level) is None:
                bad.append(M)
    return _finish("duality", not bad, counts, bad, cache)


def verify(task: str, cache: Optional[Cache] = None, base: Optional[LinearMatroid] = None) -> Report:
    cache = cache or Cache()
    try:
        if task == "N11":
            return verify_n11(cache, base)
        if task == "N12":
            return verify_n12(cache, base)
        if task in ("M9_9", "M9_1"):
            return verify_terminal(task, cache, base)
        if task in ("M9_18", "M9_7", "M9_15", "M9_2"):
            return verify_fan_case(task, cache, base)
        if task == "M9_0":
            return verify_m9_0(cache, base)
        if task == "hypotheses":
            return verify_hypotheses(cache, base)
        if task == "duality":
            return verify_duality(cache, base)
    except AmbiguityError as exc:
        return Report(task, Status.AMBIGUOUS, notes=[str(exc)])
    raise KeyError(f"unknown task {task!r}")


@_timed
def run_catalog(c: ClassId, max_size: int, cache: Optional[Cache] = None) -> Report:
    if max_size > 12:
        raise ValueError("catalog size is capped at 12")
    cache = cache or Cache()
    levels = ensure_catalog(c, max_size, cache)
    counts = {str(k): len(v) for k, v in sorted(levels.items()) if k <= max_size}
    return Report(f"catalog-{c.value}", Status.PASS, counts)


def catalog_entries(c: ClassId, max_size: int, cache: Optional[Cache] = None) -> list[CatalogEntry]:
    levels = ensure_catalog(c, max_size, cache or Cache())
    return [
        CatalogEntry(f"M_{k}_{i}", M, k, c, catalog.Provenance.ENUMERATED.value, fingerprint(M))
        for k, level in sorted(levels.items())
        for i, M in enumerate(level)
    ]
