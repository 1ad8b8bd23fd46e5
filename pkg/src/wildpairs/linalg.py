"""Dense exact matrices over F_p / F_{p^2} and the solvers everything else uses.

A matrix is stored as an int64 array of shape (rows, cols, 2): two coefficient
planes c0, c1 with entry = c0 + c1*t, both reduced mod p.  Degree-1 fields keep
plane 1 identically zero, so one code path serves both fields; products use
(a0 + a1 t)(b0 + b1 t) = (a0 b0 + d a1 b1) + (a0 b1 + a1 b0) t with t^2 = d.

All pivoting is deterministic (first nonzero column, then first nonzero row),
so echelon forms, kernel bases and everything derived from them are
reproducible across runs and platforms.  0-extent matrices are first-class:
0 x n, n x 0 and 0 x 0 all work, with det of the 0 x 0 matrix equal to 1.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, FieldMismatchError, SingularMatrixError
from .ffield import FieldSpec, Scalar, scalar_from_string, scalar_to_string


# ---------------------------------------------------------------------------
# plane-level arithmetic helpers (private; arrays of shape (..., 2))

def _pein(field: FieldSpec, spec: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise einsum over coefficient planes.

    `spec` is an einsum subscript for the plane-0 arrays; the plane axis is
    handled here.  Works for matmul, kron-after-reshape, tensor contractions.
    """
    p = field.p
    a0, a1 = a[..., 0], a[..., 1]
    b0, b1 = b[..., 0], b[..., 1]
    if field.deg == 1:
        c0 = np.einsum(spec, a0, b0) % p
        c1 = np.zeros_like(c0)
    else:
        d = field.d
        c0 = (np.einsum(spec, a0, b0) + d * np.einsum(spec, a1, b1)) % p
        c1 = (np.einsum(spec, a0, b1) + np.einsum(spec, a1, b0)) % p
    return np.stack([c0, c1], axis=-1)


def _pmul(field: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Broadcast elementwise product of plane arrays."""
    p = field.p
    a0, a1 = a[..., 0], a[..., 1]
    b0, b1 = b[..., 0], b[..., 1]
    if field.deg == 1:
        return np.stack([a0 * b0 % p, np.zeros_like(a0 * b0)], axis=-1)
    d = field.d
    return np.stack(
        [(a0 * b0 + d * a1 * b1) % p, (a0 * b1 + a1 * b0) % p], axis=-1
    )


def _pinv_entry(field: FieldSpec, c0: int, c1: int) -> tuple[int, int]:
    p, d = field.p, field.d
    norm = (c0 * c0 - d * c1 * c1) % p
    if norm == 0:
        raise ZeroDivisionError("zero pivot")
    ninv = pow(norm, p - 2, p)
    return c0 * ninv % p, (-c1 * ninv) % p


def _conj(field: FieldSpec, a: np.ndarray) -> np.ndarray:
    if field.deg == 1:
        return a
    out = a.copy()
    out[..., 1] = (-out[..., 1]) % field.p
    return out


# ---------------------------------------------------------------------------
# Mat

class Mat:
    """An immutable-by-convention dense matrix over a FieldSpec."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data: np.ndarray):
        assert data.ndim == 3 and data.shape[2] == 2, data.shape
        self.field = field
        self.data = data.astype(np.int64) % field.p
        self.data.flags.writeable = False

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_rows(cls, field: FieldSpec, rows) -> "Mat":
        """Build from a list of rows whose entries are ints, Scalars,
        (c0, c1) pairs, or serialized strings."""
        r = len(rows)
        c = len(rows[0]) if r else 0
        data = np.zeros((r, c, 2), dtype=np.int64)
        for i, row in enumerate(rows):
            if len(row) != c:
                raise DimensionError("ragged rows")
            for j, v in enumerate(row):
                if isinstance(v, Scalar):
                    if v.field != field:
                        raise FieldMismatchError("entry from another field")
                    data[i, j] = (v.c0, v.c1)
                elif isinstance(v, str):
                    s = scalar_from_string(field, v)
                    data[i, j] = (s.c0, s.c1)
                elif isinstance(v, tuple):
                    data[i, j] = (v[0] % field.p, v[1] % field.p)
                else:
                    data[i, j] = (int(v) % field.p, 0)
        return cls(field, data)

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Mat":
        return cls(field, np.zeros((rows, cols, 2), dtype=np.int64))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Mat":
        data = np.zeros((n, n, 2), dtype=np.int64)
        data[np.arange(n), np.arange(n), 0] = 1
        return cls(field, data)

    # -- basic attributes ----------------------------------------------------

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def entry(self, i: int, j: int) -> Scalar:
        c0, c1 = self.data[i, j]
        return Scalar(self.field, int(c0), int(c1))

    def __getitem__(self, ij) -> Scalar:
        return self.entry(*ij)

    def is_zero(self) -> bool:
        return not self.data.any()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Mat)
            and self.field == other.field
            and self.shape == other.shape
            and np.array_equal(self.data, other.data)
        )

    def __hash__(self):
        return hash((self.field, self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        if self.rows * self.cols == 0:
            return f"Mat({self.rows}x{self.cols} over {self.field})"
        body = "; ".join(
            " ".join(scalar_to_string(self.entry(i, j)) for j in range(self.cols))
            for i in range(self.rows)
        )
        return f"Mat[{body}]"

    def to_lists(self) -> list[list[str]]:
        return [
            [scalar_to_string(self.entry(i, j)) for j in range(self.cols)]
            for i in range(self.rows)
        ]

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Mat"):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionError(f"{self.shape} + {other.shape}")
        return Mat(self.field, self.data + other.data)

    def __sub__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionError(f"{self.shape} - {other.shape}")
        return Mat(self.field, self.data - other.data)

    def __neg__(self) -> "Mat":
        return Mat(self.field, -self.data)

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.cols != other.rows:
            raise DimensionError(f"{self.shape} @ {other.shape}")
        return Mat(self.field, _pein(self.field, "ik,kj->ij", self.data, other.data))

    def scale(self, s) -> "Mat":
        """Multiply every entry by a Scalar (or int)."""
        if not isinstance(s, Scalar):
            s = self.field.scalar(int(s))
        if s.field != self.field:
            raise FieldMismatchError("scale factor from another field")
        f = np.array([s.c0, s.c1], dtype=np.int64)
        return Mat(self.field, _pmul(self.field, self.data, f))

    def transpose(self) -> "Mat":
        return Mat(self.field, self.data.transpose(1, 0, 2))

    def conj(self) -> "Mat":
        return Mat(self.field, _conj(self.field, self.data))

    def star(self) -> "Mat":
        """Conjugate transpose; plain transpose on deg-1 fields."""
        return Mat(self.field, _conj(self.field, self.data.transpose(1, 0, 2)))

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "Mat":
        return Mat(self.field, self.data[r0:r1, c0:c1].copy())

    def pow(self, k: int) -> "Mat":
        if not self.is_square():
            raise DimensionError("pow of nonsquare matrix")
        out = Mat.identity(self.field, self.rows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            k >>= 1
            if k:
                base = base @ base
        return out


def star(M: Mat) -> Mat:
    return M.star()


def mat_arith(A: Mat, B, op: str) -> Mat:
    if op == "add":
        return A + B
    if op == "sub":
        return A - B
    if op == "mul":
        return A @ B
    if op == "scale":
        return A.scale(B)
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# elimination

def _rref(field: FieldSpec, data: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with deterministic pivoting.

    Pivot choice: scan columns left to right, take the first row (top to
    bottom) with a nonzero entry.  Returns (reduced copy, pivot columns).
    """
    p = field.p
    M = data.copy()
    rows, cols = M.shape[0], M.shape[1]
    pivots: list[int] = []
    r = 0
    for j in range(cols):
        if r == rows:
            break
        colnz = np.nonzero(M[r:, j].any(axis=-1))[0]
        if colnz.size == 0:
            continue
        i = r + int(colnz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        f0, f1 = _pinv_entry(field, int(M[r, j, 0]), int(M[r, j, 1]))
        fac = np.array([f0, f1], dtype=np.int64)
        M[r] = _pmul(field, M[r], fac)
        others = np.nonzero(M[:, j].any(axis=-1))[0]
        others = others[others != r]
        if others.size:
            g = M[others, j].copy()  # (k, 2)
            prod = _pmul(field, g[:, None, :], M[r][None, :, :])  # (k, cols, 2)
            M[others] = (M[others] - prod) % p
        pivots.append(j)
        r += 1
    return M, pivots


def rank(M: Mat) -> int:
    return len(_rref(M.field, M.data)[1])


def det(M: Mat) -> Scalar:
    """Determinant by forward elimination; det of the 0x0 matrix is 1."""
    if not M.is_square():
        raise DimensionError("det of nonsquare matrix")
    field = M.field
    p = field.p
    A = M.data.copy()
    n = M.rows
    sign = 1
    d0, d1 = 1, 0
    for j in range(n):
        colnz = np.nonzero(A[j:, j].any(axis=-1))[0]
        if colnz.size == 0:
            return field.zero()
        i = j + int(colnz[0])
        if i != j:
            A[[j, i]] = A[[i, j]]
            sign = -sign
        a0, a1 = int(A[j, j, 0]), int(A[j, j, 1])
        dd = field.d
        d0, d1 = (
            (d0 * a0 + dd * d1 * a1) % p,
            (d0 * a1 + d1 * a0) % p,
        )
        f0, f1 = _pinv_entry(field, a0, a1)
        below = j + 1 + np.nonzero(A[j + 1:, j].any(axis=-1))[0]
        if below.size:
            g = _pmul(field, A[below, j], np.array([f0, f1], dtype=np.int64))
            prod = _pmul(field, g[:, None, :], A[j][None, :, :])
            A[below] = (A[below] - prod) % p
    return Scalar(field, sign * d0, sign * d1)


def inverse(M: Mat) -> Mat:
    if not M.is_square():
        raise DimensionError("inverse of nonsquare matrix")
    n = M.rows
    aug = np.concatenate([M.data, Mat.identity(M.field, n).data], axis=1)
    R, pivots = _rref(M.field, aug)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return Mat(M.field, R[:, n:])


def is_nonsingular(M: Mat) -> bool:
    return M.is_square() and not det(M).is_zero()


def solve_homogeneous(M: Mat) -> Mat:
    """Echelon-canonical basis of the right null space, one vector per row.

    The basis matrix is itself in reduced row echelon form (leading ones),
    so equal kernels always serialize identically.
    """
    field = M.field
    R, pivots = _rref(field, M.data)
    cols = M.cols
    free = [j for j in range(cols) if j not in pivots]
    basis = np.zeros((len(free), cols, 2), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f, 0] = 1
        for r, pj in enumerate(pivots):
            basis[k, pj] = (-R[r, f]) % field.p
    canon, _ = _rref(field, basis)
    return Mat(field, canon)


def solve_linear(A: Mat, b: Mat) -> Mat | None:
    """One solution x (column) of A x = b, or None if inconsistent."""
    if b.rows != A.rows or b.cols != 1:
        raise DimensionError("right-hand side must be a conforming column")
    aug = np.concatenate([A.data, b.data], axis=1)
    R, pivots = _rref(A.field, aug)
    if A.cols in pivots:
        return None
    x = np.zeros((A.cols, 1, 2), dtype=np.int64)
    for r, j in enumerate(pivots):
        x[j, 0] = R[r, A.cols]
    return Mat(A.field, x)


# ---------------------------------------------------------------------------
# assembly

def direct_sum(*mats: Mat) -> Mat:
    """Block-diagonal sum; accepts any number of blocks, including none of
    positive extent (the result may be 0 x 0)."""
    if not mats:
        raise ValueError("direct_sum of nothing (field unknown)")
    field = mats[0].field
    for M in mats:
        if M.field != field:
            raise FieldMismatchError("mixed fields in direct_sum")
    rows = sum(M.rows for M in mats)
    cols = sum(M.cols for M in mats)
    data = np.zeros((rows, cols, 2), dtype=np.int64)
    r = c = 0
    for M in mats:
        data[r:r + M.rows, c:c + M.cols] = M.data
        r += M.rows
        c += M.cols
    return Mat(field, data)


def block_assemble(grid: list[list[Mat]]) -> Mat:
    """Assemble a matrix from a 2-d grid of blocks with consistent extents."""
    if not grid or not grid[0]:
        raise ValueError("empty block grid")
    field = grid[0][0].field
    ncols_blocks = len(grid[0])
    heights = [row[0].rows for row in grid]
    widths = [grid[0][j].cols for j in range(ncols_blocks)]
    for i, row in enumerate(grid):
        if len(row) != ncols_blocks:
            raise DimensionError("ragged block grid")
        for j, M in enumerate(row):
            if M.field != field:
                raise FieldMismatchError("mixed fields in block grid")
            if M.rows != heights[i] or M.cols != widths[j]:
                raise DimensionError(
                    f"block ({i},{j}) is {M.shape}, expected "
                    f"({heights[i]}, {widths[j]})"
                )
    data = np.zeros((sum(heights), sum(widths), 2), dtype=np.int64)
    r = 0
    for i, row in enumerate(grid):
        c = 0
        for j, M in enumerate(row):
            data[r:r + heights[i], c:c + widths[j]] = M.data
            c += widths[j]
        r += heights[i]
    return Mat(field, data)


def hstack(*mats: Mat) -> Mat:
    return block_assemble([list(mats)])


def vstack(*mats: Mat) -> Mat:
    return block_assemble([[M] for M in mats])


def kron(A: Mat, B: Mat) -> Mat:
    A._check(B)
    field = A.field
    prod = _pein(field, "ij,kl->ikjl", A.data, B.data)
    return Mat(field, prod.reshape(A.rows * B.rows, A.cols * B.cols, 2))


# ---------------------------------------------------------------------------
# characteristic polynomial (Berkowitz: division-free, exact over any field)

def char_poly(M: Mat) -> np.ndarray:
    """Coefficients of det(xI - M), ascending degree, as a plane array of
    shape (n+1, 2).  Division-free, so valid over any of our fields."""
    if not M.is_square():
        raise DimensionError("char_poly of nonsquare matrix")
    field = M.field
    n = M.rows
    if n == 0:
        out = np.zeros((1, 2), dtype=np.int64)
        out[0, 0] = 1
        return out
    A = M.data
    # C holds coefficients highest-degree-first; starts with [1, -a00].
    C = np.zeros((2, 2), dtype=np.int64)
    C[0, 0] = 1
    C[1] = (-A[0, 0]) % field.p
    for i in range(1, n):
        sub = A[:i, :i]
        row = A[i, :i]
        col = A[:i, i]
        items = np.zeros((i + 2, 2), dtype=np.int64)
        items[0, 0] = 1
        items[1] = (-A[i, i]) % field.p
        v = col
        for k in range(i):
            dot = _pein(field, "j,j->", row, v)
            items[k + 2] = (-dot) % field.p
            if k + 1 < i:
                v = _pein(field, "ij,j->i", sub, v)
        # lower-triangular Toeplitz product = truncated polynomial product
        new_C = np.zeros((i + 2, 2), dtype=np.int64)
        for jj in range(i + 2):
            kmax = min(jj, C.shape[0] - 1)
            acc = _pein(field, "k,k->", items[jj - kmax:jj + 1][::-1], C[:kmax + 1])
            new_C[jj] = acc
        C = new_C
    return C[::-1].copy()  # ascending


def min_poly(M: Mat) -> np.ndarray:
    """Monic minimal polynomial of a square matrix, ascending plane coeffs.

    Found as the first linear dependence among vec(M^0), vec(M^1), ...; the
    0 x 0 matrix has minimal polynomial 1.
    """
    if not M.is_square():
        raise DimensionError("min_poly of nonsquare matrix")
    field = M.field
    n = M.rows
    if n == 0:
        out = np.zeros((1, 2), dtype=np.int64)
        out[0, 0] = 1
        return out
    powers = [Mat.identity(field, n)]
    for k in range(1, n + 1):
        powers.append(powers[-1] @ M)
        A = Mat(field, np.stack([P.data.reshape(n * n, 2) for P in powers[:k]], axis=1))
        b = Mat(field, powers[k].data.reshape(n * n, 1, 2))
        x = solve_linear(A, b)
        if x is not None:
            coeffs = np.zeros((k + 1, 2), dtype=np.int64)
            coeffs[:k] = (-x.data[:, 0, :]) % field.p
            coeffs[k, 0] = 1
            return coeffs
    raise AssertionError("Cayley-Hamilton violated")  # pragma: no cover


def poly_eval_mat(coeffs: np.ndarray, M: Mat) -> Mat:
    """Evaluate a polynomial (ascending plane coefficients) at a square Mat."""
    field = M.field
    n = M.rows
    out = Mat.zeros(field, n, n)
    power = Mat.identity(field, n)
    for k in range(coeffs.shape[0]):
        c = Scalar(field, int(coeffs[k, 0]), int(coeffs[k, 1]))
        if not c.is_zero():
            out = out + power.scale(c)
        if k + 1 < coeffs.shape[0]:
            power = power @ M
    return out
