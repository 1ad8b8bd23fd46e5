"""Morphism spaces of matrix tuples, randomized isomorphism decision, and
Krull-Schmidt decomposition with replayable witnesses.

A t-tuple of m x n matrices is read as a representation of the quiver with
two vertices and t parallel arrows: t linear maps F^n -> F^m.  A morphism
(T -> U) is a pair (left, right) with left . A_i = B_i . right for every i;
invertible morphisms are exactly equivalences R T S = U via R = left,
S = right^-1.

Decisions are Monte Carlo with an exact fast-reject: hom-space dimensions are
compared first, and a returned witness is always replayed before being
handed out.  When sampling fails, the certificate carries the failure bound
((m+n)/q)^trials, the degree of det(left).det(right) over the field of size
q, valid under the assumption the tuples are in fact equivalent.

The decomposition follows Fitting splits: first on the echelon basis of the
endomorphism ring, then on primary factors of minimal polynomials of basis
elements and seeded random elements.  Indecomposability of every summand is
certified by End/rad(End) being 1-dimensional, with the radical computed by
the trace form of the regular representation (valid for p > dim End).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _poly
from .errors import (
    DimensionError,
    FieldMismatchError,
    FieldTooSmallError,
    SplitSearchError,
    WitnessError,
)
from .linalg import (
    Mat,
    _pein,
    _pmul,
    _rref,
    det,
    direct_sum,
    inverse,
    kron,
    min_poly,
    poly_eval_mat,
    rank,
    solve_homogeneous,
    vstack,
)
from .sampling import rng_from_seed
from .tuples import (
    EquivalenceWitness,
    MatTuple,
    SimilarityWitness,
    apply_equivalence,
    apply_similarity,
    tuple_direct_sum_many,
    verify_witness,
)

MIN_RANDOMIZED_PRIME = 100
_RANDOM_SPLIT_ATTEMPTS = 64


# ---------------------------------------------------------------------------
# hom spaces

@dataclass(frozen=True)
class HomBasis:
    """Echelon-canonical basis of Hom(source, target); each element is a
    (left, right) pair satisfying left . A_i = B_i . right exactly."""

    source: MatTuple
    target: MatTuple
    basis: tuple[tuple[Mat, Mat], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


def _check_compatible(T: MatTuple, U: MatTuple) -> None:
    if T.t != U.t:
        raise DimensionError(f"tuple lengths differ: {T.t} vs {U.t}")
    if T.field != U.field:
        raise FieldMismatchError("tuples over different fields")


def _joint_rows(field, pairs, mshape, nshape) -> np.ndarray:
    mp_, m = mshape
    np_, n = nshape
    rows = np.zeros((len(pairs), mp_ * m + np_ * n, 2), dtype=np.int64)
    for k, (left, right) in enumerate(pairs):
        rows[k, : mp_ * m] = left.data.reshape(mp_ * m, 2)
        rows[k, mp_ * m:] = right.data.reshape(np_ * n, 2)
    return rows


def hom_basis(T: MatTuple, U: MatTuple) -> HomBasis:
    """All morphisms T -> U, solved from the stacked intertwining system and
    returned as an echelon-canonical basis."""
    _check_compatible(T, U)
    field = T.field
    m, n = T.shape
    mp_, np_ = U.shape

    fast = None
    if m == n and mp_ == np_:
        for i in range(T.t):
            if not det(T[i]).is_zero() and not det(U[i]).is_zero():
                fast = i
                break

    if fast is not None:
        # R is determined: R = B_f^-1 L A_f, leaving a conjugation system in L.
        Af, Bf_inv = T[fast], inverse(U[fast])
        blocks = []
        I_left = Mat.identity(field, mp_)
        I_right = Mat.identity(field, m)
        for i in range(T.t):
            if i == fast:
                continue
            At = T[i] @ inverse(Af)
            Bt = U[i] @ Bf_inv
            blocks.append(kron(I_left, At.transpose()) - kron(Bt, I_right))
        if blocks:
            K = solve_homogeneous(vstack(*blocks))
        else:
            K = Mat.identity(field, mp_ * m)
        pairs = []
        for k in range(K.rows):
            left = Mat(field, K.data[k].reshape(mp_, m, 2))
            right = Bf_inv @ left @ Af
            pairs.append((left, right))
    else:
        blocks = []
        for i in range(T.t):
            lhs = kron(Mat.identity(field, mp_), T[i].transpose())
            rhs = kron(U[i], Mat.identity(field, n))
            row = np.concatenate([lhs.data, (-rhs.data) % field.p], axis=1)
            blocks.append(Mat(field, row))
        system = vstack(*blocks) if blocks else Mat.zeros(field, 0, mp_ * m + np_ * n)
        K = solve_homogeneous(system)
        pairs = []
        for k in range(K.rows):
            left = Mat(field, K.data[k, : mp_ * m].reshape(mp_, m, 2))
            right = Mat(field, K.data[k, mp_ * m:].reshape(np_, n, 2))
            pairs.append((left, right))

    # one canonical form regardless of the solve path
    joint = _joint_rows(field, pairs, (mp_, m), (np_, n))
    canon, _ = _rref(field, joint)
    out = []
    for k in range(len(pairs)):
        left = Mat(field, canon[k, : mp_ * m].reshape(mp_, m, 2))
        right = Mat(field, canon[k, mp_ * m:].reshape(np_, n, 2))
        for i in range(T.t):
            assert left @ T[i] == U[i] @ right, "intertwining violated"
        out.append((left, right))
    return HomBasis(T, U, tuple(out))


def hom_dim(T: MatTuple, U: MatTuple) -> int:
    return hom_basis(T, U).dim


def end_ring(T: MatTuple) -> HomBasis:
    return hom_basis(T, T)


def _combine(field, stack: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Linear combination sum_k coeffs[k] * stack[k] over the field."""
    prod = _pmul(field, stack, coeffs[:, None, None, :])
    return prod.sum(axis=0) % field.p


def _sample_morphism(field, basis, rng) -> tuple[Mat, Mat]:
    coeffs = rng.integers(0, field.p, size=(len(basis), 2), dtype=np.int64)
    if field.deg == 1:
        coeffs[:, 1] = 0
    lefts = np.stack([b[0].data for b in basis])
    rights = np.stack([b[1].data for b in basis])
    return (
        Mat(field, _combine(field, lefts, coeffs)),
        Mat(field, _combine(field, rights, coeffs)),
    )


# ---------------------------------------------------------------------------
# randomized deciders

@dataclass(frozen=True)
class Certificate:
    """Evidence for a 'no witness found' outcome.

    exact=True means the answer is a proven no (the reason says which
    invariant separated the inputs).  exact=False means sampling failed;
    failure_bound is the probability of that happening if the inputs were in
    fact related.
    """

    exact: bool
    reason: str
    hom_dim_forward: int | None = None
    hom_dim_backward: int | None = None
    trials: int = 0
    failure_bound: Fraction | None = None


@dataclass(frozen=True)
class DecideResult:
    witness: object | None
    certificate: Certificate | None

    @property
    def found(self) -> bool:
        return self.witness is not None


def decide_equivalence(
    T: MatTuple, U: MatTuple, trials: int = 32, seed: int = 0
) -> DecideResult:
    """Monte Carlo equivalence decision with exact fast-rejects.

    Returns a verified EquivalenceWitness, or a Certificate: exact when hom
    dimensions already separate T and U, probabilistic after `trials`
    failed samples from Hom(T, U).
    """
    _check_compatible(T, U)
    field = T.field
    if T == U:
        w = EquivalenceWitness(
            Mat.identity(field, T.m), Mat.identity(field, T.n)
        )
        return DecideResult(w, None)
    if T.shape != U.shape:
        return DecideResult(
            None, Certificate(True, f"extent mismatch: {T.shape} vs {U.shape}")
        )
    fwd = hom_basis(T, U)
    bwd = hom_basis(U, T)
    if fwd.dim != bwd.dim:
        return DecideResult(
            None,
            Certificate(
                True,
                "hom dimension asymmetry",
                fwd.dim,
                bwd.dim,
            ),
        )
    if fwd.dim == 0:
        return DecideResult(
            None, Certificate(True, "hom space is zero", 0, 0)
        )
    if field.p < MIN_RANDOMIZED_PRIME:
        raise FieldTooSmallError(
            f"randomized mode needs p >= {MIN_RANDOMIZED_PRIME}, got {field.p}; "
            "use the exhaustive oracle instead"
        )
    rng = rng_from_seed(seed)
    for _ in range(trials):
        left, right = _sample_morphism(field, fwd.basis, rng)
        if det(left).is_zero() or det(right).is_zero():
            continue
        w = EquivalenceWitness(left, inverse(right))
        assert verify_witness("equivalence", w, T, U)
        return DecideResult(w, None)
    bound = min(Fraction(1), Fraction(T.m + T.n, field.order) ** trials)
    return DecideResult(
        None,
        Certificate(
            False,
            f"no invertible morphism in {trials} samples",
            fwd.dim,
            bwd.dim,
            trials,
            bound,
        ),
    )


def _one_sided_basis(T: MatTuple, U: MatTuple) -> list[Mat]:
    """Basis of {X : X A_i = B_i X for all i} for square same-extent tuples."""
    field = T.field
    n = T.n
    blocks = []
    I = Mat.identity(field, n)
    for i in range(T.t):
        blocks.append(kron(I, T[i].transpose()) - kron(U[i], I))
    K = solve_homogeneous(vstack(*blocks))
    out = []
    for k in range(K.rows):
        X = Mat(field, K.data[k].reshape(n, n, 2))
        for i in range(T.t):
            assert X @ T[i] == U[i] @ X
        out.append(X)
    return out


def decide_similarity(
    T: MatTuple, U: MatTuple, trials: int = 32, seed: int = 0
) -> DecideResult:
    """Simultaneous-similarity decision for square tuples, via one-sided
    intertwiners X A_i = B_i X; a verified witness S satisfies
    S^-1 T S = U componentwise."""
    _check_compatible(T, U)
    if not (T.is_square() and U.is_square()):
        raise DimensionError("similarity needs square tuples")
    field = T.field
    if T == U:
        return DecideResult(SimilarityWitness(Mat.identity(field, T.n)), None)
    if T.shape != U.shape:
        return DecideResult(
            None, Certificate(True, f"extent mismatch: {T.shape} vs {U.shape}")
        )
    fwd = _one_sided_basis(T, U)
    bwd = _one_sided_basis(U, T)
    if len(fwd) != len(bwd):
        return DecideResult(
            None, Certificate(True, "intertwiner dimension asymmetry", len(fwd), len(bwd))
        )
    if not fwd:
        return DecideResult(
            None, Certificate(True, "intertwiner space is zero", 0, 0)
        )
    if field.p < MIN_RANDOMIZED_PRIME:
        raise FieldTooSmallError(
            f"randomized mode needs p >= {MIN_RANDOMIZED_PRIME}, got {field.p}; "
            "use the exhaustive oracle instead"
        )
    rng = rng_from_seed(seed)
    stack = np.stack([X.data for X in fwd])
    for _ in range(trials):
        coeffs = rng.integers(0, field.p, size=(len(fwd), 2), dtype=np.int64)
        if field.deg == 1:
            coeffs[:, 1] = 0
        X = Mat(field, _combine(field, stack, coeffs))
        if det(X).is_zero():
            continue
        w = SimilarityWitness(inverse(X))
        assert verify_witness("similarity", w, T, U)
        return DecideResult(w, None)
    bound = min(Fraction(1), Fraction(T.n, field.order) ** trials)
    return DecideResult(
        None,
        Certificate(
            False,
            f"no invertible intertwiner in {trials} samples",
            len(fwd),
            len(bwd),
            trials,
            bound,
        ),
    )


# ---------------------------------------------------------------------------
# endomorphism rings and radicals

def _coords_in_basis(field, joint_rows: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Coordinates of vec in the span of RREF rows; exact, by pivot lookup."""
    pivots = []
    for r in range(joint_rows.shape[0]):
        nz = np.nonzero(joint_rows[r].any(axis=-1))[0]
        pivots.append(int(nz[0]))
    coords = vec[pivots]
    recon = _pein(field, "k,kn->n", coords, joint_rows)
    assert np.array_equal(recon, vec), "vector not in span of basis"
    return coords


def radical_of_end(T: MatTuple) -> list[tuple[Mat, Mat]]:
    """Radical of End(T) as a list of nilpotent morphisms (trace-form
    criterion on the regular representation; needs p > dim End)."""
    return _radical_morphisms(end_ring(T))


def _radical_morphisms(E: HomBasis) -> list[tuple[Mat, Mat]]:
    field = E.source.field
    k = E.dim
    if k == 0:
        return []
    if field.p <= k:
        raise FieldTooSmallError(
            f"trace-form radical needs p > dim End = {k}, got p = {field.p}"
        )
    m, n = E.source.shape
    joint = _joint_rows(field, E.basis, (m, m), (n, n))
    # left-multiplication matrices of the basis in its own coordinates
    L = np.zeros((k, k, k, 2), dtype=np.int64)
    for i, (li, ri) in enumerate(E.basis):
        for j, (lj, rj) in enumerate(E.basis):
            comp_left = li @ lj
            comp_right = ri @ rj
            vec = np.concatenate(
                [comp_left.data.reshape(-1, 2), comp_right.data.reshape(-1, 2)]
            )
            L[i, :, j] = _coords_in_basis(field, joint, vec)
    gram = np.zeros((k, k, 2), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            gram[i, j] = _pein(field, "ab,ba->", L[i], L[j])
    rad_rows = solve_homogeneous(Mat(field, gram))
    lefts = np.stack([b[0].data for b in E.basis])
    rights = np.stack([b[1].data for b in E.basis])
    out = []
    for r in range(rad_rows.rows):
        coeffs = rad_rows.data[r]
        left = Mat(field, _combine(field, lefts, coeffs))
        right = Mat(field, _combine(field, rights, coeffs))
        if not (left.pow(max(m, 1)).is_zero() and right.pow(max(n, 1)).is_zero()):
            raise RuntimeError("radical element failed nilpotency replay")
        out.append((left, right))
    return out


# ---------------------------------------------------------------------------
# decomposition

@dataclass(frozen=True)
class Decomposition:
    """T ~ direct sum of summands, witnessed; replaying the witness on the
    original tuple must reproduce the direct sum bit-exactly."""

    summands: tuple[MatTuple, ...]
    witness: EquivalenceWitness

    @property
    def extents(self) -> list[tuple[int, int]]:
        return sorted(S.shape for S in self.summands)

    def summand_sum(self) -> MatTuple | None:
        if not self.summands:
            return None
        return tuple_direct_sum_many(list(self.summands))

    def replays_on(self, T: MatTuple) -> bool:
        image = apply_equivalence(self.witness, T)
        if not self.summands:
            return image.shape == (0, 0)
        return image == tuple_direct_sum_many(list(self.summands))


def _identity_witness(T: MatTuple) -> EquivalenceWitness:
    return EquivalenceWitness(
        Mat.identity(T.field, T.m), Mat.identity(T.field, T.n)
    )


def _column_space(field, M: Mat) -> np.ndarray:
    """Columns spanning the column space, planes (rows, r, 2), canonical."""
    R, piv = _rref(field, M.transpose().data)
    return R[: len(piv)].transpose(1, 0, 2).copy()


def fitting_split(T: MatTuple, e: tuple[Mat, Mat]) -> Decomposition | None:
    """Split T along ker/im of a stabilized power of the endomorphism e.

    Returns None when e is nilpotent or invertible (no information), else a
    two-summand decomposition with verified witness.
    """
    left, right = e
    for i in range(T.t):
        if not (left @ T[i] == T[i] @ right):
            raise WitnessError("e is not an endomorphism of T")
    field = T.field
    m, n = T.shape
    K = 1
    while K < max(m, n, 1):
        K <<= 1
    lK = left.pow(K)
    rK = right.pow(K)
    r1, r0 = rank(lK), rank(rK)
    if (r1, r0) == (0, 0) or (r1, r0) == (m, n):
        return None
    U_blocks = []
    for Mk, size, r in ((lK, m, r1), (rK, n, r0)):
        im_cols = _column_space(field, Mk)
        ker_cols = solve_homogeneous(Mk).data.transpose(1, 0, 2)
        U = Mat(field, np.concatenate([im_cols, ker_cols], axis=1))
        assert U.shape == (size, size)
        U_blocks.append(U)
    U1, U0 = U_blocks
    w = EquivalenceWitness(inverse(U1), U0)
    image = apply_equivalence(w, T)
    for M in image:
        assert not M.data[:r1, r0:].any() and not M.data[r1:, :r0].any(), (
            "Fitting blocks are not invariant"
        )
    S_im = MatTuple([M.block(0, r1, 0, r0) for M in image])
    S_ker = MatTuple([M.block(r1, m, r0, n) for M in image])
    return Decomposition((S_im, S_ker), w)


def _find_split(T: MatTuple, E: HomBasis, rng) -> Decomposition:
    # deterministic first: plain Fitting on the echelon basis of End
    for e in E.basis:
        d = fitting_split(T, e)
        if d is not None:
            return d
    # then primary splits from minimal polynomials: basis elements first,
    # then seeded random elements of End
    field = T.field

    def try_primary(e):
        f = _poly.lcm(field, min_poly(e[0]), min_poly(e[1]))
        factors = _poly.factor(field, f, rng)
        if len(factors) < 2:
            return None
        g = factors[0][0]
        y = (poly_eval_mat(g, e[0]), poly_eval_mat(g, e[1]))
        d = fitting_split(T, y)
        assert d is not None, "primary factor must split"
        return d

    for e in E.basis:
        d = try_primary(e)
        if d is not None:
            return d
    for _ in range(_RANDOM_SPLIT_ATTEMPTS):
        e = _sample_morphism(field, E.basis, rng)
        d = try_primary(e)
        if d is not None:
            return d
    raise SplitSearchError(
        f"no splitting endomorphism found for a decomposable {T.shape} tuple"
    )


def _sorted_decomposition(D: Decomposition) -> Decomposition:
    def key(S: MatTuple):
        return (S.m, S.n, b"".join(M.data.tobytes() for M in S.mats))

    order = sorted(range(len(D.summands)), key=lambda i: key(D.summands[i]))
    if order == list(range(len(D.summands))):
        return D
    field = D.witness.R.field
    row_sizes = [S.m for S in D.summands]
    col_sizes = [S.n for S in D.summands]
    row_off = np.cumsum([0] + row_sizes)
    col_off = np.cumsum([0] + col_sizes)
    m_tot, n_tot = int(row_off[-1]), int(col_off[-1])
    Pr = np.zeros((m_tot, m_tot, 2), dtype=np.int64)
    Pc = np.zeros((n_tot, n_tot, 2), dtype=np.int64)
    r = c = 0
    for b in order:
        for i in range(row_sizes[b]):
            Pr[r + i, row_off[b] + i, 0] = 1
        for j in range(col_sizes[b]):
            Pc[col_off[b] + j, c + j, 0] = 1
        r += row_sizes[b]
        c += col_sizes[b]
    w_perm = EquivalenceWitness(Mat(field, Pr), Mat(field, Pc))
    return Decomposition(
        tuple(D.summands[b] for b in order), D.witness.compose(w_perm)
    )


def krull_schmidt(T: MatTuple, seed: int = 0) -> Decomposition:
    """Full decomposition of T into certified indecomposables.

    The summands are canonically sorted (by extent, then entries); the
    witness replays T onto their direct sum bit-exactly.  Needs
    p > m^2 + n^2 so the radical criterion is valid at every level.
    """
    m, n = T.shape
    field = T.field
    if field.p <= m * m + n * n:
        raise FieldTooSmallError(
            f"krull_schmidt needs p > m^2 + n^2 = {m * m + n * n}, got {field.p}"
        )
    if (m, n) == (0, 0):
        return Decomposition((), _identity_witness(T))
    rng = rng_from_seed(seed)
    D = _sorted_decomposition(_ks_recurse(T, rng))
    assert D.replays_on(T), "decomposition witness failed replay"
    return D


def _ks_recurse(T: MatTuple, rng) -> Decomposition:
    E = end_ring(T)
    rad = _radical_morphisms(E)
    if E.dim - len(rad) == 1:
        return Decomposition((T,), _identity_witness(T))
    D2 = _find_split(T, E, rng)
    subs = [_ks_recurse(S, rng) for S in D2.summands]
    summands = tuple(s for sub in subs for s in sub.summands)
    w_sum = EquivalenceWitness(
        direct_sum(*[sub.witness.R for sub in subs]),
        direct_sum(*[sub.witness.S for sub in subs]),
    )
    return Decomposition(summands, D2.witness.compose(w_sum))
