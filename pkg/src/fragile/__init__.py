"""Linear matroids over GF(2), GF(5) and GF(5)^6, with the fragility, fan and
gluing machinery needed to re-check the case analysis for Fano-fragile and
{U25, U35}-fragile matroids."""

from .algebra import Ring, RingValue, allowed_cross_ratios, ring_combine, tuple_permute
from .fragility import ClassId, extensions, coextensions, grow, has_minor, in_class
from .io import read_matroid, write_matroid
from .iso import dedup, find_isomorphism, fingerprint, isomorphic
from .matroid import LinearMatroid, MatroidError, from_matrix

__all__ = [
    "ClassId",
    "LinearMatroid",
    "MatroidError",
    "Ring",
    "RingValue",
    "allowed_cross_ratios",
    "coextensions",
    "dedup",
    "extensions",
    "find_isomorphism",
    "fingerprint",
    "from_matrix",
    "grow",
    "has_minor",
    "in_class",
    "isomorphic",
    "read_matroid",
    "ring_combine",
    "tuple_permute",
    "write_matroid",
]

__version__ = "0.1.0"
