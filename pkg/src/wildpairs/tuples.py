"""Matrix tuples and the four transformation groups acting on them.

A MatTuple is an ordered, nonempty list of matrices of one common extent.
The four relations, each certified by a replayable witness:

  equivalence        (A_i) |-> (R A_i S),     R, S nonsingular
  *congruence        (A_i) |-> (S* A_i S),    S nonsingular (square tuples)
  similarity         (A_i) |-> (S^-1 A_i S),  S nonsingular (square tuples)
  substitution       (A, B) |-> (r11 A + r12 B, r21 A + r22 B), [r_ij] nonsingular

No function here ever asserts relatedness without a witness; verify_witness
replays the action and compares bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionError, FieldMismatchError, SingularMatrixError
from .ffield import Scalar
from .linalg import Mat, det, direct_sum, inverse


class MatTuple:
    """Ordered tuple of same-extent matrices over one field."""

    __slots__ = ("mats",)

    def __init__(self, mats):
        mats = tuple(mats)
        if not mats:
            raise ValueError("empty tuple")
        field = mats[0].field
        shape = mats[0].shape
        for M in mats:
            if M.field != field:
                raise FieldMismatchError("mixed fields in tuple")
            if M.shape != shape:
                raise DimensionError("tuple components differ in extent")
        self.mats = mats

    @property
    def t(self) -> int:
        return len(self.mats)

    @property
    def field(self):
        return self.mats[0].field

    @property
    def m(self) -> int:
        return self.mats[0].rows

    @property
    def n(self) -> int:
        return self.mats[0].cols

    @property
    def shape(self) -> tuple[int, int]:
        return self.mats[0].shape

    def is_square(self) -> bool:
        return self.m == self.n

    def __getitem__(self, i) -> Mat:
        return self.mats[i]

    def __iter__(self):
        return iter(self.mats)

    def __len__(self) -> int:
        return len(self.mats)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MatTuple)
            and self.t == other.t
            and all(a == b for a, b in zip(self.mats, other.mats))
        )

    def __hash__(self):
        return hash(tuple(self.mats))

    def __repr__(self) -> str:
        return f"MatTuple(t={self.t}, {self.m}x{self.n} over {self.field})"


def pair(A: Mat, B: Mat) -> MatTuple:
    return MatTuple([A, B])


def _require_nonsingular(M: Mat, name: str) -> None:
    if not M.is_square():
        raise DimensionError(f"{name} must be square")
    if det(M).is_zero():
        raise SingularMatrixError(f"{name} is singular")


@dataclass(frozen=True)
class EquivalenceWitness:
    """(R, S) nonsingular with R T S = U componentwise."""

    R: Mat
    S: Mat

    def __post_init__(self):
        _require_nonsingular(self.R, "R")
        _require_nonsingular(self.S, "S")

    def inverse(self) -> "EquivalenceWitness":
        return EquivalenceWitness(inverse(self.R), inverse(self.S))

    def compose(self, then: "EquivalenceWitness") -> "EquivalenceWitness":
        """Witness for T -> V given self: T -> U and then: U -> V."""
        return EquivalenceWitness(then.R @ self.R, self.S @ then.S)


@dataclass(frozen=True)
class CongruenceWitness:
    """S nonsingular with star(S) T S = U componentwise; the left factor
    star(S) is implied, never stored."""

    S: Mat

    def __post_init__(self):
        _require_nonsingular(self.S, "S")

    def as_equivalence(self) -> EquivalenceWitness:
        return EquivalenceWitness(self.S.star(), self.S)


@dataclass(frozen=True)
class SimilarityWitness:
    """S nonsingular with S^-1 T S = U componentwise."""

    S: Mat

    def __post_init__(self):
        _require_nonsingular(self.S, "S")


@dataclass(frozen=True)
class SubstitutionMatrix:
    """Nonsingular 2x2 scalar matrix acting on pairs by linear substitution."""

    r11: Scalar
    r12: Scalar
    r21: Scalar
    r22: Scalar

    def __post_init__(self):
        if (self.r11 * self.r22 - self.r12 * self.r21).is_zero():
            raise SingularMatrixError("substitution matrix is singular")

    @classmethod
    def from_mat(cls, M: Mat) -> "SubstitutionMatrix":
        if M.shape != (2, 2):
            raise DimensionError("substitution matrix must be 2x2")
        return cls(M[0, 0], M[0, 1], M[1, 0], M[1, 1])

    def as_mat(self) -> Mat:
        return Mat.from_rows(
            self.r11.field, [[self.r11, self.r12], [self.r21, self.r22]]
        )


def apply_equivalence(w: EquivalenceWitness, T: MatTuple) -> MatTuple:
    if w.R.cols != T.m or w.S.rows != T.n:
        raise DimensionError(
            f"witness extents ({w.R.shape}, {w.S.shape}) do not fit {T.shape}"
        )
    return MatTuple([w.R @ A @ w.S for A in T])


def apply_star_congruence(w: CongruenceWitness, T: MatTuple) -> MatTuple:
    if not T.is_square():
        raise DimensionError("*congruence needs a square tuple")
    if w.S.rows != T.n:
        raise DimensionError(f"witness extent {w.S.shape} does not fit {T.shape}")
    Sst = w.S.star()
    return MatTuple([Sst @ A @ w.S for A in T])


def apply_similarity(w: SimilarityWitness, T: MatTuple) -> MatTuple:
    if not T.is_square():
        raise DimensionError("similarity needs a square tuple")
    if w.S.rows != T.n:
        raise DimensionError(f"witness extent {w.S.shape} does not fit {T.shape}")
    Sinv = inverse(w.S)
    return MatTuple([Sinv @ A @ w.S for A in T])


def apply_substitution(r: SubstitutionMatrix, T: MatTuple) -> MatTuple:
    if T.t != 2:
        raise DimensionError("substitution acts on pairs (t = 2)")
    A, B = T[0], T[1]
    return MatTuple(
        [
            A.scale(r.r11) + B.scale(r.r12),
            A.scale(r.r21) + B.scale(r.r22),
        ]
    )


def tuple_direct_sum(T: MatTuple, U: MatTuple) -> MatTuple:
    if T.t != U.t:
        raise DimensionError(f"tuple lengths differ: {T.t} vs {U.t}")
    return MatTuple([direct_sum(a, b) for a, b in zip(T, U)])


def tuple_direct_sum_many(tuples: list[MatTuple]) -> MatTuple:
    if not tuples:
        raise ValueError("direct sum of no tuples")
    out = tuples[0]
    for T in tuples[1:]:
        out = tuple_direct_sum(out, T)
    return out


_APPLY = {
    "equivalence": apply_equivalence,
    "congruence": apply_star_congruence,
    "similarity": apply_similarity,
    "substitution": apply_substitution,
}


def verify_witness(kind: str, w, T: MatTuple, U: MatTuple) -> bool:
    """Replay the claimed action of w on T and compare with U bit-exactly."""
    if kind not in _APPLY:
        raise ValueError(f"unknown witness kind {kind!r}")
    try:
        image = _APPLY[kind](w, T)
    except (DimensionError, FieldMismatchError):
        return False
    return image == U
