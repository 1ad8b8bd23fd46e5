"""Reduction gadgets carrying pair similarity into *congruence of form pairs.

For n x n matrices A, B and a scalar eps, the 4n x 4n gadget pair is

    first  = [ 0    0  | I  0 ]      second = [ 0      0    | A  0 ]
             [ 0    0  | 0  I ]               [ 0      0    | 0  B ]
             [ 2I   I  | 0  0 ]               [ eps A* 0    | 0  0 ]
             [ 0   2I  | 0  0 ]               [ 0    eps B* | 0  0 ]

Similarity witnesses transport forward through R = diag((S*)^-1, (S*)^-1,
S, S); the backward direction recovers a similarity witness from any
*congruence witness by decomposing the associated three-matrix tuples and
cancelling their eigenvalue-1/2 summands against the eigenvalue-2 ones.

The large padded pair (identity/zero/ones multiples plus a gadget, 35n x 35n
at the default multiplicities) feeds the algebra construction; its two rank
equalities are what pins substitutions to diagonal form.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _poly
from .errors import (
    DimensionError,
    ExtractionError,
    FieldMismatchError,
    WitnessError,
)
from .ffield import Scalar
from .homspace import Decomposition, decide_equivalence, krull_schmidt
from .linalg import Mat, char_poly, det, direct_sum, inverse, rank
from .tuples import (
    CongruenceWitness,
    EquivalenceWitness,
    MatTuple,
    SimilarityWitness,
    SubstitutionMatrix,
    apply_equivalence,
    apply_similarity,
    tuple_direct_sum,
    verify_witness,
)

DEFAULT_MULTIPLICITIES = (20, 10, 1)

CHAR3_CAVEAT = (
    "characteristic 3: the eigenvalue separation 2 != 1/2 behind the "
    "backward direction degenerates; results are reported, not asserted"
)


@dataclass(frozen=True)
class GadgetPair:
    """A 4n x 4n pair built from (A, B) and eps, tagged with its origin."""

    pair: MatTuple
    epsilon: Scalar
    n: int
    provenance: str


@dataclass(frozen=True)
class BigPair:
    """Padded pair (I,0)^a + (0,I)^b + (I,I)^c + gadget, extent (a+b+c+4)n."""

    pair: MatTuple
    n: int
    multiplicities: tuple[int, int, int]


def _as_scalar(field, eps) -> Scalar:
    if isinstance(eps, Scalar):
        if eps.field != field:
            raise FieldMismatchError("eps from another field")
        return eps
    return field.scalar(int(eps))


def _check_pair_args(A: Mat, B: Mat):
    if A.field != B.field:
        raise FieldMismatchError("A and B over different fields")
    if not (A.is_square() and B.is_square()) or A.rows != B.rows:
        raise DimensionError("A and B must be square of one extent")


def build_T(eps, A: Mat, B: Mat) -> GadgetPair:
    """The 4n x 4n gadget pair for (A, B) at the scalar eps."""
    _check_pair_args(A, B)
    field = A.field
    eps = _as_scalar(field, eps)
    n = A.rows
    Z = Mat.zeros(field, n, n)
    I = Mat.identity(field, n)
    first = [
        [Z, Z, I, Z],
        [Z, Z, Z, I],
        [I.scale(2), I, Z, Z],
        [Z, I.scale(2), Z, Z],
    ]
    second = [
        [Z, Z, A, Z],
        [Z, Z, Z, B],
        [A.star().scale(eps), Z, Z, Z],
        [Z, B.star().scale(eps), Z, Z],
    ]
    from .linalg import block_assemble

    g = GadgetPair(
        MatTuple([block_assemble(first), block_assemble(second)]), eps, n, "T"
    )
    assert g.pair[0] == _expected_first(field, n), "gadget block layout broken"
    return g


def _expected_first(field, n: int) -> Mat:
    from .linalg import block_assemble

    Z = Mat.zeros(field, n, n)
    I = Mat.identity(field, n)
    return block_assemble(
        [
            [Z, Z, I, Z],
            [Z, Z, Z, I],
            [I.scale(2), I, Z, Z],
            [Z, I.scale(2), Z, Z],
        ]
    )


def classify_symmetry(G: GadgetPair) -> str:
    """Which form family the second gadget matrix lands in:
    hermitian (nonidentity involution), symmetric, skew, or none."""
    M = G.pair[1]
    if M.field.deg == 2 and M.star() == M:
        return "hermitian"
    if M.transpose() == M:
        return "symmetric"
    if M.transpose() == -M:
        return "skew"
    return "none"


_FAMILY_EPS = {"hermitian": 1, "symmetric": 1, "skew": -1}


def gadget_for_family(family: str, A: Mat, B: Mat) -> GadgetPair:
    """Build the gadget for one of the three form families.

    The hermitian family needs a nonidentity involution, so it is rejected
    on degree-1 fields instead of silently degrading to symmetric.
    """
    if family not in _FAMILY_EPS:
        raise ValueError(f"unknown family {family!r}")
    if family == "hermitian" and A.field.deg != 2:
        raise ValueError(
            "hermitian family needs the nonidentity involution: use a deg-2 field"
        )
    if family in ("symmetric", "skew") and A.field.deg != 1:
        raise ValueError(f"{family} family is stated for identity-involution fields")
    return build_T(_FAMILY_EPS[family], A, B)


def transport_witness(S: SimilarityWitness, eps, pairT: MatTuple) -> CongruenceWitness:
    """Forward transport: from S^-1 (A,B) S = (C,D) build R with
    star(R) T_eps(A,B) R = T_eps(C,D), verified before returning."""
    if pairT.t != 2 or not pairT.is_square():
        raise DimensionError("transport needs a square pair")
    A, B = pairT[0], pairT[1]
    Sst_inv = inverse(S.S.star())
    R = direct_sum(Sst_inv, Sst_inv, S.S, S.S)
    image = apply_similarity(S, pairT)
    g_src = build_T(eps, A, B)
    g_dst = build_T(eps, image[0], image[1])
    w = CongruenceWitness(R)
    if not verify_witness("congruence", w, g_src.pair, g_dst.pair):
        raise RuntimeError("transported witness failed replay")  # pragma: no cover
    return w


# ---------------------------------------------------------------------------
# proof-side triples

def build_proof_triples(eps, A: Mat, B: Mat):
    """The three-matrix tuples behind the backward direction.

    Returns (P, F, G):
      P = (P1, P1*, X)          square 4n, anti-block-diagonal
      F = (I, [2I 0; I 2I], diag(A, B))          square 2n
      G = ([2I I; 0 2I], I, diag(eps A*, eps B*)) square 2n
    and checks that P right-multiplied by the half swap equals F + G
    bit-exactly.
    """
    _check_pair_args(A, B)
    field = A.field
    eps = _as_scalar(field, eps)
    n = A.rows
    from .linalg import block_assemble

    Z = Mat.zeros(field, n, n)
    I = Mat.identity(field, n)
    Z2 = Mat.zeros(field, 2 * n, 2 * n)
    I2 = Mat.identity(field, 2 * n)
    K = block_assemble([[I.scale(2), I], [Z, I.scale(2)]])
    KT = block_assemble([[I.scale(2), Z], [I, I.scale(2)]])
    X_top = block_assemble([[A, Z], [Z, B]])
    X_bot = block_assemble([[A.star().scale(eps), Z], [Z, B.star().scale(eps)]])
    P1 = block_assemble([[Z2, I2], [K, Z2]])
    P2 = P1.star()
    P3 = block_assemble([[Z2, X_top], [X_bot, Z2]])
    P = MatTuple([P1, P2, P3])
    F = MatTuple([I2, KT, X_top])
    G = MatTuple([K, I2, X_bot])
    swap = half_swap(field, 2 * n)
    shifted = apply_equivalence(
        EquivalenceWitness(Mat.identity(field, 4 * n), swap), P
    )
    assert shifted == tuple_direct_sum(F, G), "P is not a permuted F + G"
    return P, F, G


def half_swap(field, half: int) -> Mat:
    """Permutation matrix swapping the two half-blocks of size `half`."""
    Z = Mat.zeros(field, half, half)
    I = Mat.identity(field, half)
    from .linalg import block_assemble

    return block_assemble([[Z, I], [I, Z]])


def _binomial_power(field, root: int, k: int) -> np.ndarray:
    """(x - root)^k as ascending plane coefficients."""
    out = _poly.const(1)
    lin = np.array([[(-root) % field.p, 0], [1, 0]], dtype=np.int64)
    for _ in range(k):
        out = _poly.mul(field, out, lin)
    return out


def _summand_type(H: MatTuple) -> str:
    """Classify an indecomposable summand of the combined F + G tuple.

    'F' summands have invertible first component and operator spectrum {2};
    'G' summands have invertible second component and operator spectrum {2}
    read the other way (i.e. spectrum {1/2} after normalization).
    """
    if not H.is_square():
        raise ExtractionError(f"nonsquare summand {H.shape} cannot be classified")
    field = H.field
    k = H.n
    target = _binomial_power(field, 2, k)
    if not det(H[0]).is_zero():
        op = H[1] @ inverse(H[0])
        if _poly.eq(_poly.trim(char_poly(op)), target):
            return "F"
    if not det(H[1]).is_zero():
        op = H[0] @ inverse(H[1])
        if _poly.eq(_poly.trim(char_poly(op)), target):
            return "G"
    raise ExtractionError("summand matches neither family pattern")


def _block_permutation(field, shapes, order) -> EquivalenceWitness:
    """Witness mapping +blocks (current order) to +blocks reordered so that
    new block k is old block order[k]."""
    row_sizes = [s[0] for s in shapes]
    col_sizes = [s[1] for s in shapes]
    row_off = np.cumsum([0] + row_sizes)
    col_off = np.cumsum([0] + col_sizes)
    m_tot, n_tot = int(row_off[-1]), int(col_off[-1])
    Pr = np.zeros((m_tot, m_tot, 2), dtype=np.int64)
    Pc = np.zeros((n_tot, n_tot, 2), dtype=np.int64)
    r = c = 0
    for b in order:
        for i in range(row_sizes[b]):
            Pr[r + i, int(row_off[b]) + i, 0] = 1
        for j in range(col_sizes[b]):
            Pc[int(col_off[b]) + j, c + j, 0] = 1
        r += row_sizes[b]
        c += col_sizes[b]
    return EquivalenceWitness(Mat(field, Pr), Mat(field, Pc))


class _MatchFailure(Exception):
    pass


def _match_witness(src, dst, trials, seed) -> EquivalenceWitness:
    """Witness +src -> +dst by pairwise equivalence matching of summands."""
    if len(src) != len(dst):
        raise _MatchFailure(f"summand counts differ: {len(src)} vs {len(dst)}")
    field = src[0].field
    used = [False] * len(dst)
    sigma = []
    wits = []
    for i, S in enumerate(src):
        hit = None
        for j, Dst in enumerate(dst):
            if used[j] or S.shape != Dst.shape:
                continue
            res = decide_equivalence(S, Dst, trials=trials, seed=seed + 101 * i + j)
            if res.found:
                hit = (j, res.witness)
                break
        if hit is None:
            raise _MatchFailure(f"summand {i} of shape {S.shape} unmatched")
        used[hit[0]] = True
        sigma.append(hit[0])
        wits.append(hit[1])
    w_sum = EquivalenceWitness(
        direct_sum(*[w.R for w in wits]), direct_sum(*[w.S for w in wits])
    )
    # current block order is dst[sigma[0]], dst[sigma[1]], ...; restore dst order
    inv = [0] * len(sigma)
    for pos, j in enumerate(sigma):
        inv[j] = pos
    shapes = [dst[j].shape for j in sigma]
    perm = _block_permutation(field, shapes, inv)
    return w_sum.compose(perm)


def extract_similarity(
    R: CongruenceWitness,
    eps,
    pair_src: MatTuple,
    pair_dst: MatTuple,
    seed: int = 0,
    trials: int = 32,
    retries: int = 4,
) -> SimilarityWitness:
    """Backward direction: from a verified *congruence witness between the
    two gadgets, produce a verified similarity witness for the pairs.

    Pipeline: lift R to an equivalence of the three-matrix tuples, decompose
    both sides and both explicit F tuples, drop the eigenvalue-1/2 summands,
    match the rest pairwise, and read the similarity off the block structure
    of the resulting F-to-F witness.
    """
    A, B = pair_src[0], pair_src[1]
    C, D = pair_dst[0], pair_dst[1]
    field = A.field
    eps = _as_scalar(field, eps)
    g_src = build_T(eps, A, B)
    g_dst = build_T(eps, C, D)
    if not verify_witness("congruence", R, g_src.pair, g_dst.pair):
        raise WitnessError("R is not a *congruence between the two gadgets")
    if field.p == 3:
        warnings.warn(CHAR3_CAVEAT)
    P_src, F_src, G_src = build_proof_triples(eps, A, B)
    P_dst, F_dst, G_dst = build_proof_triples(eps, C, D)
    W_P = EquivalenceWitness(R.S.star(), R.S)
    assert verify_witness("equivalence", W_P, P_src, P_dst)
    swap = half_swap(field, 2 * A.rows)
    to_fg = EquivalenceWitness(Mat.identity(field, 4 * A.rows), swap)
    FG_src = apply_equivalence(to_fg, P_src)
    FG_dst = apply_equivalence(to_fg, P_dst)
    assert FG_src == tuple_direct_sum(F_src, G_src)

    last = None
    for attempt in range(retries):
        shift = seed + 1009 * attempt
        try:
            w_f = _cancel(FG_src, FG_dst, F_src, F_dst, trials, shift)
            n = A.rows
            Pmat = w_f.S.block(0, n, 0, n)
            witness = SimilarityWitness(Pmat)
            if verify_witness("similarity", witness, pair_src, pair_dst):
                return witness
            last = ExtractionError("extracted block failed similarity replay")
        except _MatchFailure as exc:
            last = exc
    raise ExtractionError(f"extraction failed after {retries} retries: {last}")


def _cancel(FG_src, FG_dst, F_src, F_dst, trials, seed) -> EquivalenceWitness:
    """Equivalence witness F_src -> F_dst via decomposition and matching."""
    D_L = krull_schmidt(FG_src, seed=seed + 1)
    D_R = krull_schmidt(FG_dst, seed=seed + 2)
    D_FA = krull_schmidt(F_src, seed=seed + 3)
    D_FC = krull_schmidt(F_dst, seed=seed + 4)
    f_left = [S for S in D_L.summands if _summand_type(S) == "F"]
    f_right = [S for S in D_R.summands if _summand_type(S) == "F"]
    w1 = _match_witness(list(D_FA.summands), f_left, trials, seed + 11)
    w2 = _match_witness(f_left, f_right, trials, seed + 12)
    w3 = _match_witness(f_right, list(D_FC.summands), trials, seed + 13)
    return (
        D_FA.witness.compose(w1).compose(w2).compose(w3)
        .compose(D_FC.witness.inverse())
    )


# ---------------------------------------------------------------------------
# the padded pair

def build_P35(
    A: Mat, B: Mat, multiplicities: tuple[int, int, int] = DEFAULT_MULTIPLICITIES
) -> BigPair:
    """(I,0)^a + (0,I)^b + (I,I)^c + gadget, every scalar block scaled to
    n x n; extent (a+b+c+4) n, 35n at the default (20, 10, 1)."""
    _check_pair_args(A, B)
    a, b, c = multiplicities
    if min(a, b, c) < 0:
        raise ValueError("multiplicities must be nonnegative")
    field = A.field
    n = A.rows
    gadget = build_T(0, A, B)
    first = direct_sum(
        Mat.identity(field, a * n),
        Mat.zeros(field, b * n, b * n),
        Mat.identity(field, c * n),
        gadget.pair[0],
    )
    second = direct_sum(
        Mat.zeros(field, a * n, a * n),
        Mat.identity(field, b * n),
        Mat.identity(field, c * n),
        gadget.pair[1],
    )
    return BigPair(MatTuple([first, second]), n, (a, b, c))


def rank_separation_check(
    A: Mat,
    B: Mat,
    r: SubstitutionMatrix,
    multiplicities: tuple[int, int, int] = DEFAULT_MULTIPLICITIES,
) -> bool:
    """Do both rank equalities rank(r11 M1 + r12 M2) = rank M1 and
    rank(r21 M1 + r22 M2) = rank M2 hold on the padded pair?

    True for diagonal substitutions, false once an off-diagonal entry is
    nonzero (the identity/zero padding inflates one of the mixtures).
    """
    big = build_P35(A, B, multiplicities)
    M1, M2 = big.pair[0], big.pair[1]
    mix1 = M1.scale(r.r11) + M2.scale(r.r12)
    mix2 = M1.scale(r.r21) + M2.scale(r.r22)
    return rank(mix1) == rank(M1) and rank(mix2) == rank(M2)
