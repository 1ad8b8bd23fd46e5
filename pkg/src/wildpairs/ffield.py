"""Exact arithmetic in F_p (p an odd prime) and its quadratic extension F_{p^2}.

F_{p^2} is realized as F_p[t]/(t^2 - d) for the smallest quadratic nonresidue
d, and carries the order-2 automorphism c0 + c1*t |-> c0 - c1*t.  On F_p the
involution is the identity.  Elements are stored as coefficient pairs
(c0, c1) with 0 <= c0, c1 < p; for deg-1 fields c1 is identically zero, which
lets every routine in the package treat both cases uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FieldMismatchError

DEFAULT_RANDOM_PRIME = 10007
DEFAULT_ORACLE_PRIME = 3

# Deterministic Miller-Rabin witnesses, valid for all n < 3.3 * 10^24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A prime field F_p or its quadratic extension F_p[t]/(t^2 - nonresidue)."""

    p: int
    deg: int
    nonresidue: int | None = None

    @property
    def order(self) -> int:
        return self.p**self.deg

    @property
    def d(self) -> int:
        """Nonresidue as a plain int; 0 for deg-1 fields (t never appears)."""
        return self.nonresidue if self.deg == 2 else 0

    def zero(self) -> "Scalar":
        return Scalar(self, 0, 0)

    def one(self) -> "Scalar":
        return Scalar(self, 1, 0)

    def scalar(self, c0: int, c1: int = 0) -> "Scalar":
        if c1 % self.p != 0 and self.deg == 1:
            raise ValueError("t-coefficient in a degree-1 field")
        return Scalar(self, c0 % self.p, c1 % self.p)

    def __str__(self) -> str:
        return f"F_{self.p}" if self.deg == 1 else f"F_{self.p}^2"


def field_make(p: int, deg: int = 1) -> FieldSpec:
    """Construct F_p (deg 1) or F_{p^2} (deg 2); p must be an odd prime.

    For deg 2 the modulus t^2 - d uses the smallest positive quadratic
    nonresidue d, found deterministically by Euler's criterion.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if p == 2:
        raise ValueError("characteristic 2 is excluded")
    if deg not in (1, 2):
        raise ValueError(f"deg must be 1 or 2, got {deg}")
    if deg == 1:
        return FieldSpec(p, 1, None)
    d = 2
    while pow(d, (p - 1) // 2, p) != p - 1:
        d += 1
    return FieldSpec(p, 2, d)


class Scalar:
    """An element c0 + c1*t of a FieldSpec, immutable."""

    __slots__ = ("field", "c0", "c1")

    def __init__(self, field: FieldSpec, c0: int, c1: int = 0):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "c0", c0 % field.p)
        object.__setattr__(self, "c1", c1 % field.p)

    def __setattr__(self, *a):
        raise AttributeError("Scalar is immutable")

    def _check(self, other: "Scalar"):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __add__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar(self.field, self.c0 + other.c0, self.c1 + other.c1)

    def __sub__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar(self.field, self.c0 - other.c0, self.c1 - other.c1)

    def __neg__(self) -> "Scalar":
        return Scalar(self.field, -self.c0, -self.c1)

    def __mul__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        p, d = self.field.p, self.field.d
        c0 = (self.c0 * other.c0 + d * self.c1 * other.c1) % p
        c1 = (self.c0 * other.c1 + self.c1 * other.c0) % p
        return Scalar(self.field, c0, c1)

    def inverse(self) -> "Scalar":
        p, d = self.field.p, self.field.d
        # Norm c0^2 - d*c1^2 is anisotropic since d is a nonresidue.
        norm = (self.c0 * self.c0 - d * self.c1 * self.c1) % p
        if norm == 0:
            raise ZeroDivisionError("inverse of zero scalar")
        ninv = pow(norm, p - 2, p)
        return Scalar(self.field, self.c0 * ninv, -self.c1 * ninv)

    def __truediv__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return self * other.inverse()

    def is_zero(self) -> bool:
        return self.c0 == 0 and self.c1 == 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Scalar)
            and self.field == other.field
            and self.c0 == other.c0
            and self.c1 == other.c1
        )

    def __hash__(self):
        return hash((self.field, self.c0, self.c1))

    def __repr__(self) -> str:
        return f"Scalar({scalar_to_string(self)!r} in {self.field})"


def involute(a: Scalar) -> Scalar:
    """Identity on F_p; conjugation c0 + c1*t |-> c0 - c1*t on F_{p^2}."""
    if a.field.deg == 1:
        return a
    return Scalar(a.field, a.c0, -a.c1)


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def scalar_to_string(a: Scalar) -> str:
    """Serialize: "c0" on deg-1 fields, "c0+c1*t" on deg-2 fields."""
    if a.field.deg == 1:
        return str(a.c0)
    return f"{a.c0}+{a.c1}*t"


def scalar_from_string(field: FieldSpec, s: str) -> Scalar:
    s = s.strip().replace(" ", "")
    if "t" in s:
        if field.deg != 2:
            raise ValueError(f"t-part {s!r} in a degree-1 field")
        head, tail = s.split("+", 1) if "+" in s else ("0", s)
        if not tail.endswith("*t") and not tail.endswith("t"):
            raise ValueError(f"bad scalar literal {s!r}")
        tail = tail[:-2] if tail.endswith("*t") else tail[:-1]
        return Scalar(field, int(head), int(tail) if tail not in ("", "-") else 1)
    return Scalar(field, int(s), 0)
