"""Command line: ``fragile catalog | verify | construct``.

Exit codes: 0 success, 1 verification failure, 2 usage or file-format
error, 3 a derivation could not single out a named matroid.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from . import catalog, harness
from .catalog import AmbiguityError
from .fragility import ClassId
from .io import FormatError, read_matroid, to_text
from .matroid import MatroidError
from .structure import WheelGlueSpec, glue_wheels, parse_glue

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_AMBIGUOUS = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fragile", description=__doc__.splitlines()[0])
    p.add_argument("--cache-dir", help="catalog cache (default: $FRAGILE_CACHE_DIR or ./fragile-cache)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for verify --all")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks; never changes results")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", help="enumerate a class up to a size")
    c.add_argument("--class", dest="cls", choices=[x.value for x in ClassId], required=True)
    c.add_argument("--max-size", type=int, required=True)
    c.add_argument("--format", choices=("text", "json"), default="text")

    v = sub.add_parser("verify", help="run verification tasks")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--task", choices=harness.TASKS)
    g.add_argument("--all", action="store_true")
    v.add_argument("--base", help="matroid file replacing the task's base matroid")
    v.add_argument("--format", choices=("text", "json"), default="json")

    k = sub.add_parser("construct", help="emit a matroid file")
    g = k.add_mutually_exclusive_group(required=True)
    g.add_argument("--name")
    g.add_argument("--glue", action="append", help="NAME:(a,b,c):k, repeatable; all must share NAME")
    k.add_argument("--delete", default="", help="comma-separated labels to delete afterwards")
    k.add_argument("-o", "--output")
    return p


def _print_report(rep: harness.Report, fmt: str) -> None:
    if fmt == "json":
        print(rep.to_json())
        return
    counts = " ".join(f"{k}={v}" for k, v in rep.counts.items())
    print(f"{rep.task}: {rep.status.value} ({rep.millis} ms) {counts}")
    for w in rep.witnesses:
        print(f"  witness {w}")
    for n in rep.notes:
        print(f"  {n}")


def _verify_one(args: tuple) -> dict:
    task, cache_dir = args
    return harness.verify(task, harness.Cache(cache_dir)).to_dict()


def _cmd_verify(ns, cache) -> int:
    if ns.all:
        tasks = list(harness.TASKS)
        if ns.jobs > 1:
            # the role table and catalog are built once before fanning out
            harness.ensure_catalog(ClassId.H5_FRAGILE, harness.ROLE_SIZE, cache)
            with ProcessPoolExecutor(ns.jobs) as ex:
                dicts = list(ex.map(_verify_one, [(t, str(cache.dir)) for t in tasks]))
            reports = [harness.Report(**d) for d in dicts]
        else:
            reports = [harness.verify(t, cache) for t in tasks]
    else:
        base = read_matroid(ns.base) if ns.base else None
        reports = [harness.verify(ns.task, cache, base)]
    for rep in reports:
        _print_report(rep, ns.format)
    if any(r.status is harness.Status.AMBIGUOUS for r in reports):
        return EXIT_AMBIGUOUS
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _cmd_construct(ns, cache) -> int:
    if ns.name:
        if _needs_catalog(ns.name):
            _prepare_named(ns.name, cache)
        M = catalog.named(ns.name).matroid
    else:
        specs = [parse_glue(s) for s in ns.glue]
        names = {s[0] for s in specs}
        if len(names) != 1:
            raise MatroidError("all glue specs must name the same base matroid")
        N = catalog.named(names.pop()).matroid
        tris = [s[1] for s in specs]
        ranks = [s[2] for s in specs]
        union = {x for t in tris for x in t}
        dels = [x.strip() for x in ns.delete.split(",") if x.strip()]
        X = {x for x in dels if x in union}
        M = glue_wheels(N, WheelGlueSpec(tris, ranks, X))
        rest = [x for x in dels if x not in X]
        if rest:
            M = M.delete(rest)
    text = to_text(M)
    if ns.output:
        with open(ns.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _needs_catalog(name: str) -> bool:
    return bool(re.fullmatch(r"M_\d+_\d+|M9_\d+|X8|Y8\*?|M71|M85|M86", name))


def _prepare_named(name: str, cache) -> None:
    m = re.fullmatch(r"M_(\d+)_\d+", name)
    size = int(m.group(1)) if m else harness.ROLE_SIZE
    harness.ensure_catalog(ClassId.H5_FRAGILE, size, cache)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    cache = harness.Cache(ns.cache_dir)
    try:
        if ns.command == "catalog":
            c = ClassId(ns.cls)
            rep = harness.run_catalog(c, ns.max_size, cache)
            _print_report(rep, ns.format)
            return EXIT_OK
        if ns.command == "verify":
            return _cmd_verify(ns, cache)
        return _cmd_construct(ns, cache)
    except AmbiguityError as exc:
        print(f"ambiguous: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (FormatError, MatroidError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
