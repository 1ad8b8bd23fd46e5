"""Univariate polynomial arithmetic and factorization over F_p / F_{p^2}.

A polynomial is an int64 plane array of shape (k, 2), ascending degree,
trimmed so the leading coefficient is nonzero; the zero polynomial has shape
(0, 2).  Only what the decomposition machinery needs: Euclidean arithmetic,
modular exponentiation, and Cantor-Zassenhaus factorization (q odd).  All
callers guarantee deg f < p, so squarefree radicals via gcd(f, f') are exact.
"""

from __future__ import annotations

import numpy as np

from .ffield import FieldSpec
from .linalg import _pinv_entry, _pmul


def trim(f: np.ndarray) -> np.ndarray:
    k = f.shape[0]
    while k > 0 and not f[k - 1].any():
        k -= 1
    return f[:k]


def deg(f: np.ndarray) -> int:
    return f.shape[0] - 1


def is_zero(f: np.ndarray) -> bool:
    return f.shape[0] == 0


def zero() -> np.ndarray:
    return np.zeros((0, 2), dtype=np.int64)


def const(c0: int, c1: int = 0) -> np.ndarray:
    return trim(np.array([[c0, c1]], dtype=np.int64))

def x_poly() -> np.ndarray:
    return np.array([[0, 0], [1, 0]], dtype=np.int64)


def eq(f: np.ndarray, g: np.ndarray) -> bool:
    f, g = trim(f), trim(g)
    return f.shape == g.shape and np.array_equal(f, g)


def add(field: FieldSpec, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = max(f.shape[0], g.shape[0])
    out = np.zeros((n, 2), dtype=np.int64)
    out[: f.shape[0]] += f
    out[: g.shape[0]] += g
    return trim(out % field.p)


def sub(field: FieldSpec, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = max(f.shape[0], g.shape[0])
    out = np.zeros((n, 2), dtype=np.int64)
    out[: f.shape[0]] += f
    out[: g.shape[0]] -= g
    return trim(out % field.p)


def mul(field: FieldSpec, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    if is_zero(f) or is_zero(g):
        return zero()
    p, d = field.p, field.d
    f0, f1 = f[:, 0], f[:, 1]
    g0, g1 = g[:, 0], g[:, 1]
    c0 = (np.convolve(f0, g0) + d * np.convolve(f1, g1)) % p
    c1 = (np.convolve(f0, g1) + np.convolve(f1, g0)) % p
    return trim(np.stack([c0, c1], axis=-1))


def scale(field: FieldSpec, f: np.ndarray, c: tuple[int, int]) -> np.ndarray:
    if is_zero(f):
        return f
    fac = np.array(c, dtype=np.int64)
    return trim(_pmul(field, f, fac))


def monic(field: FieldSpec, f: np.ndarray) -> np.ndarray:
    f = trim(f)
    if is_zero(f):
        return f
    lead = f[-1]
    if lead[0] == 1 and lead[1] == 0:
        return f
    inv = _pinv_entry(field, int(lead[0]), int(lead[1]))
    return scale(field, f, inv)


def divmod_poly(field: FieldSpec, f: np.ndarray, g: np.ndarray):
    g = trim(g)
    if is_zero(g):
        raise ZeroDivisionError("polynomial division by zero")
    f = trim(f).copy()
    dg = deg(g)
    if deg(f) < dg:
        return zero(), f
    inv = np.array(_pinv_entry(field, int(g[-1, 0]), int(g[-1, 1])), dtype=np.int64)
    q = np.zeros((deg(f) - dg + 1, 2), dtype=np.int64)
    rem = f
    while deg(rem) >= dg and not is_zero(rem):
        shift = deg(rem) - dg
        c = _pmul(field, rem[-1], inv)
        q[shift] = c
        sub_part = _pmul(field, g, c)
        rem = rem.copy()
        rem[shift: shift + dg + 1] = (rem[shift: shift + dg + 1] - sub_part) % field.p
        rem = trim(rem)
    return trim(q), rem


def gcd(field: FieldSpec, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    f, g = trim(f), trim(g)
    while not is_zero(g):
        _, r = divmod_poly(field, f, g)
        f, g = g, r
    return monic(field, f)


def lcm(field: FieldSpec, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    if is_zero(f) or is_zero(g):
        return zero()
    q, _ = divmod_poly(field, mul(field, f, g), gcd(field, f, g))
    return monic(field, q)


def pow_mod(field: FieldSpec, base: np.ndarray, e: int, mod: np.ndarray) -> np.ndarray:
    _, base = divmod_poly(field, base, mod)
    out = const(1)
    while e:
        if e & 1:
            _, out = divmod_poly(field, mul(field, out, base), mod)
        e >>= 1
        if e:
            _, base = divmod_poly(field, mul(field, base, base), mod)
    return out


def derivative(field: FieldSpec, f: np.ndarray) -> np.ndarray:
    if deg(f) < 1:
        return zero()
    ks = np.arange(1, f.shape[0], dtype=np.int64) % field.p
    out = f[1:] * ks[:, None] % field.p
    return trim(out)


def _random_poly(field: FieldSpec, max_deg: int, rng) -> np.ndarray:
    data = rng.integers(0, field.p, size=(max_deg + 1, 2), dtype=np.int64)
    if field.deg == 1:
        data[:, 1] = 0
    return trim(data)


def _ddf(field: FieldSpec, f: np.ndarray):
    """Distinct-degree split of a squarefree monic f: [(product, degree)]."""
    out = []
    q = field.order
    h = x_poly()
    _, h = divmod_poly(field, h, f)
    fstar = f
    d = 0
    while deg(fstar) > 0:
        d += 1
        if 2 * d > deg(fstar):
            out.append((fstar, deg(fstar)))
            break
        h = pow_mod(field, h, q, fstar)
        g = gcd(field, sub(field, h, x_poly()), fstar)
        if deg(g) > 0:
            out.append((g, d))
            fstar, _ = divmod_poly(field, fstar, g)
            _, h = divmod_poly(field, h, fstar)
    return out


def _edf(field: FieldSpec, f: np.ndarray, d: int, rng) -> list[np.ndarray]:
    """Cantor-Zassenhaus equal-degree split (q odd) of monic squarefree f
    whose irreducible factors all have degree d."""
    n = deg(f)
    if n == d:
        return [f]
    exp = (field.order**d - 1) // 2
    while True:
        a = _random_poly(field, n - 1, rng)
        if deg(a) < 1:
            continue
        g = gcd(field, a, f)
        if 0 < deg(g) < n:
            break
        b = pow_mod(field, a, exp, f)
        g = gcd(field, sub(field, b, const(1)), f)
        if 0 < deg(g) < n:
            break
    rest, _ = divmod_poly(field, f, g)
    return _edf(field, g, d, rng) + _edf(field, monic(field, rest), d, rng)


def factor(field: FieldSpec, f: np.ndarray, rng) -> list[tuple[np.ndarray, int]]:
    """Monic irreducible factors with multiplicities, deterministically sorted
    by (degree, coefficient bytes).  Requires deg f < p."""
    f = monic(field, f)
    if deg(f) < 1:
        return []
    if deg(f) >= field.p:
        raise ValueError("factorization requires deg f < p")
    radical = f
    g = gcd(field, f, derivative(field, f))
    if deg(g) > 0:
        radical, _ = divmod_poly(field, f, g)
    irreducibles: list[np.ndarray] = []
    for part, d in _ddf(field, monic(field, radical)):
        irreducibles.extend(_edf(field, part, d, rng))
    out = []
    for h in irreducibles:
        e = 0
        rem = f
        while True:
            qq, r = divmod_poly(field, rem, h)
            if not is_zero(r):
                break
            e += 1
            rem = qq
        out.append((h, e))
    out.sort(key=lambda pair: (deg(pair[0]), pair[0].tobytes()))
    return out
