"""Seeded random generators for matrices, tuples and planted instances.

Every source of randomness in the package flows through numpy's PCG64
generator; with equal seeds all downstream results are bit-reproducible.
"""

from __future__ import annotations

import numpy as np

from .ffield import FieldSpec, Scalar
from .linalg import Mat, det
from .tuples import (
    EquivalenceWitness,
    MatTuple,
    SimilarityWitness,
    SubstitutionMatrix,
    apply_equivalence,
    apply_similarity,
)

RNG_NAME = "numpy.PCG64"
RNG_VERSION = 1


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_scalar(field: FieldSpec, rng) -> Scalar:
    c = rng.integers(0, field.p, size=2, dtype=np.int64)
    return Scalar(field, int(c[0]), int(c[1]) if field.deg == 2 else 0)


def random_matrix(field: FieldSpec, m: int, n: int, rng) -> Mat:
    data = rng.integers(0, field.p, size=(m, n, 2), dtype=np.int64)
    if field.deg == 1:
        data[..., 1] = 0
    return Mat(field, data)


def random_invertible(field: FieldSpec, n: int, rng) -> Mat:
    while True:
        M = random_matrix(field, n, n, rng)
        if not det(M).is_zero():
            return M


def random_pair(field: FieldSpec, n: int, rng) -> MatTuple:
    return MatTuple([random_matrix(field, n, n, rng) for _ in range(2)])


def random_tuple(field: FieldSpec, t: int, m: int, n: int, rng) -> MatTuple:
    return MatTuple([random_matrix(field, m, n, rng) for _ in range(t)])


def random_equivalence(field: FieldSpec, m: int, n: int, rng) -> EquivalenceWitness:
    return EquivalenceWitness(
        random_invertible(field, m, rng), random_invertible(field, n, rng)
    )


def random_substitution(field: FieldSpec, rng) -> SubstitutionMatrix:
    while True:
        a, b, c, d = (random_scalar(field, rng) for _ in range(4))
        if not (a * d - b * c).is_zero():
            return SubstitutionMatrix(a, b, c, d)


def random_similar_instance(field: FieldSpec, n: int, rng):
    """A planted similarity instance: ((A,B), (C,D), S) with S^-1 (A,B) S = (C,D)."""
    T = random_pair(field, n, rng)
    w = SimilarityWitness(random_invertible(field, n, rng))
    return T, apply_similarity(w, T), w


def random_equivalent_instance(field: FieldSpec, t: int, m: int, n: int, rng):
    """A planted equivalence instance: (T, U, w) with R T S = U."""
    T = random_tuple(field, t, m, n, rng)
    w = random_equivalence(field, m, n, rng)
    return T, apply_equivalence(w, T), w
