"""Scalars for GF(2), GF(5) and the six-fold product ring GF(5)^6.

Matrices are handled as numpy integer arrays of shape ``(k, rows, cols)``
where ``k`` is 1 for the prime fields and 6 for the product ring; each
slice ``mat[i]`` is an ordinary GF(p) matrix (a coordinate projection).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class RingError(ValueError):
    """Raised on mixed-ring operations or malformed ring values."""


class NonInvertibleError(ArithmeticError):
    """Raised when dividing by a value with a zero coordinate."""


class Ring(enum.Enum):
    GF2 = "gf2"
    GF5 = "gf5"
    GF5x6 = "gf5x6"

    @property
    def p(self) -> int:
        return 2 if self is Ring.GF2 else 5

    @property
    def width(self) -> int:
        """Number of coordinates (1 for the prime fields)."""
        return 6 if self is Ring.GF5x6 else 1

    @classmethod
    def parse(cls, text: str) -> "Ring":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise RingError(f"unknown ring {text!r}") from None


INV = {2: np.array([0, 1]), 5: np.array([0, 1, 3, 2, 4])}

_SHIFTS = tuple(3 * i for i in range(6))


def _pack(digits) -> int:
    return sum(int(d) << s for d, s in zip(digits, _SHIFTS))


@dataclass(frozen=True)
class RingValue:
    """An immutable ring scalar; GF(5)^6 payloads are packed 3 bits per digit."""

    ring: Ring
    payload: int

    def __post_init__(self):
        if self.ring is Ring.GF5x6:
            if not 0 <= self.payload < 1 << 18 or any(d > 4 for d in self.digits):
                raise RingError(f"bad GF(5)^6 payload {self.payload}")
        elif not 0 <= self.payload < self.ring.p:
            raise RingError(f"bad {self.ring.value} payload {self.payload}")

    @classmethod
    def of(cls, ring: Ring, value) -> "RingValue":
        if ring is Ring.GF5x6:
            if isinstance(value, (int, np.integer)):
                value = (int(value) % 5,) * 6
            value = tuple(int(v) for v in value)
            if len(value) != 6:
                raise RingError("GF(5)^6 values have exactly 6 coordinates")
            if any(not 0 <= v <= 4 for v in value):
                raise RingError(f"coordinates out of range: {value}")
            return cls(ring, _pack(value))
        return cls(ring, int(value) % ring.p)

    @classmethod
    def zero(cls, ring: Ring) -> "RingValue":
        return cls.of(ring, 0)

    @classmethod
    def one(cls, ring: Ring) -> "RingValue":
        return cls.of(ring, 1)

    @property
    def digits(self) -> tuple[int, ...]:
        if self.ring is Ring.GF5x6:
            return tuple((self.payload >> s) & 7 for s in _SHIFTS)
        return (self.payload,)

    def __add__(self, other):
        return ring_combine(self, other, "add")

    def __sub__(self, other):
        return ring_combine(self, other, "sub")

    def __mul__(self, other):
        return ring_combine(self, other, "mul")

    def __truediv__(self, other):
        return ring_combine(self, other, "div")

    def __neg__(self):
        return ring_combine(RingValue.zero(self.ring), self, "sub")

    def is_unit(self) -> bool:
        return all(self.digits)

    def __str__(self) -> str:
        return format_value(self)


def ring_combine(a: RingValue, b: RingValue, op: str) -> RingValue:
    """Coordinatewise ``add``/``sub``/``mul``/``div``."""
    if a.ring is not b.ring:
        raise RingError(f"ring mismatch: {a.ring.value} vs {b.ring.value}")
    p = a.ring.p
    x, y = np.array(a.digits), np.array(b.digits)
    if op == "add":
        z = x + y
    elif op == "sub":
        z = x - y
    elif op == "mul":
        z = x * y
    elif op == "div":
        if not all(y):
            raise NonInvertibleError(f"{format_value(b)} is not invertible")
        z = x * INV[p][y]
    else:
        raise RingError(f"unknown operation {op!r}")
    z %= p
    if a.ring is Ring.GF5x6:
        return RingValue(a.ring, _pack(z))
    return RingValue(a.ring, int(z[0]))


def format_value(v: RingValue) -> str:
    return ":".join(str(d) for d in v.digits)


def parse_value(ring: Ring, text: str) -> RingValue:
    parts = text.split(":")
    if len(parts) != ring.width:
        raise RingError(f"expected {ring.width} coordinate(s) in {text!r}")
    try:
        digits = [int(t) for t in parts]
    except ValueError:
        raise RingError(f"malformed ring value {text!r}") from None
    if any(not 0 <= d < ring.p for d in digits):
        raise RingError(f"digit out of range in {text!r}")
    return RingValue.of(ring, digits if ring is Ring.GF5x6 else digits[0])


def tuple_permute(x: RingValue, sigma) -> RingValue:
    """Reorder GF(5)^6 coordinates: result[i] = x[sigma[i]] (0-based)."""
    if x.ring is not Ring.GF5x6:
        raise RingError("tuple_permute needs a GF(5)^6 value")
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(6)):
        raise RingError(f"not a permutation of 6 positions: {sigma}")
    d = x.digits
    return RingValue.of(Ring.GF5x6, [d[s] for s in sigma])


@lru_cache(maxsize=None)
def allowed_cross_ratios() -> frozenset[RingValue]:
    """Product-ring values in which each of 2, 3, 4 occurs exactly twice."""
    out = set()
    for perm in set(itertools.permutations((2, 2, 3, 3, 4, 4))):
        out.add(RingValue.of(Ring.GF5x6, perm))
    return frozenset(out)


# --- GF(p) matrix kernels -------------------------------------------------


def rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(p) and the pivot columns."""
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    inv = INV[p]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = (a[r] * inv[a[r, c]]) % p
        f = a[:, c].copy()
        f[r] = 0
        a = (a - np.outer(f, a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(mat: np.ndarray, p: int) -> int:
    if mat.size == 0:
        return 0
    return len(rref(mat, p)[1])


def nullspace(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis of {x : mat @ x = 0} as rows of the returned array."""
    mat = np.asarray(mat)
    rows, cols = mat.shape
    a, pivots = rref(mat, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-a[i, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), cols)


def inverse(mat: np.ndarray, p: int) -> np.ndarray:
    n = mat.shape[0]
    a, pivots = rref(np.hstack([mat, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)):
        raise NonInvertibleError("singular matrix")
    return a[:, n:]


def normalize_projective(v: np.ndarray, p: int) -> np.ndarray:
    """Scale so that the first nonzero entry is 1."""
    v = np.asarray(v, dtype=np.int64) % p
    nz = np.nonzero(v)[0]
    if nz.size == 0:
        return v
    return (v * INV[p][v[nz[0]]]) % p


@lru_cache(maxsize=None)
def projective_points(r: int, p: int) -> np.ndarray:
    """All nonzero vectors of GF(p)^r with first nonzero entry 1, lexicographic."""
    pts = []
    for lead in range(r):
        tail = r - lead - 1
        for rest in itertools.product(range(p), repeat=tail):
            pts.append((0,) * lead + (1,) + rest)
    out = np.array(pts, dtype=np.int64).reshape(len(pts), r)
    out.setflags(write=False)
    return out
