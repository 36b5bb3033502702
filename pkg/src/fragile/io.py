"""Line-oriented matroid file format.

::

    fragile-matroid v1
    ring gf5x6
    rank 2 cols 5
    a b c d e
    1:1:1:1:1:1 1:1:1:1:1:1 1:1:1:1:1:1
    1:1:1:1:1:1 2:2:3:3:4:4 3:4:2:4:2:3
    sha256 <hex digest of every preceding byte>

``cols`` is the ground-set size; row lines hold the reduced matrix A of
the standard form ``[I | A]``.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from . import algebra
from .algebra import Ring, RingError
from .matroid import LinearMatroid, MatroidError

MAGIC = "fragile-matroid v1"


class FormatError(ValueError):
    """Malformed matroid file or checksum mismatch."""


def _entry(ring: Ring, digits) -> str:
    return ":".join(str(int(d)) for d in digits)


def to_text(M: LinearMatroid) -> str:
    for x in M.labels:
        if not x or any(ch.isspace() for ch in x):
            raise FormatError(f"label {x!r} cannot be serialized")
    lines = [MAGIC, f"ring {M.ring.value}", f"rank {M.r} cols {M.n}", " ".join(M.labels)]
    for i in range(M.r):
        lines.append(" ".join(_entry(M.ring, M.reduced[:, i, j]) for j in range(M.n - M.r)))
    body = "".join(line + "\n" for line in lines)
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return body + f"sha256 {digest}\n"


def from_text(text: str) -> LinearMatroid:
    if not text.endswith("\n"):
        raise FormatError("missing trailing newline")
    body, sep, last = text[:-1].rpartition("\n")
    if not sep or not last.startswith("sha256 "):
        raise FormatError("missing checksum line")
    body += "\n"
    if hashlib.sha256(body.encode("utf-8")).hexdigest() != last.split(" ", 1)[1].strip():
        raise FormatError("checksum mismatch")
    lines = body.split("\n")[:-1]
    if len(lines) < 4 or lines[0] != MAGIC:
        raise FormatError("bad header")
    try:
        ring = Ring.parse(lines[1].removeprefix("ring "))
        parts = lines[2].split()
        if len(parts) != 4 or parts[0] != "rank" or parts[2] != "cols":
            raise FormatError(f"bad size line {lines[2]!r}")
        r, n = int(parts[1]), int(parts[3])
    except (RingError, ValueError) as exc:
        raise FormatError(str(exc)) from None
    labels = lines[3].split()
    if len(labels) != n or not 0 <= r <= n:
        raise FormatError("label count or rank does not match header")
    rows = lines[4:]
    if len(rows) != r:
        raise FormatError(f"expected {r} matrix rows, found {len(rows)}")
    A = np.zeros((ring.width, r, n - r), dtype=np.int64)
    for i, row in enumerate(rows):
        toks = row.split()
        if len(toks) != n - r:
            raise FormatError(f"row {i} has {len(toks)} entries, expected {n - r}")
        for j, tok in enumerate(toks):
            try:
                A[:, i, j] = algebra.parse_value(ring, tok).digits
            except RingError as exc:
                raise FormatError(str(exc)) from None
    try:
        return LinearMatroid(ring, A, labels)
    except MatroidError as exc:
        raise FormatError(str(exc)) from None


def write_matroid(M: LinearMatroid, path) -> Path:
    path = Path(path)
    path.write_text(to_text(M), encoding="utf-8")
    return path


def read_matroid(path) -> LinearMatroid:
    return from_text(Path(path).read_text(encoding="utf-8"))
