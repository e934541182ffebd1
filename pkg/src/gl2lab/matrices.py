"""2x2 matrices over Z/NZ: exact arithmetic, CRT, canonical lifts.

Every matrix carries its modulus; mixing moduli is a hard error, never a
coercion.  Entries are machine ints reduced into [0, N).  All moduli in this
project are small (at most a few hundred), so there is no big-integer tier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ModulusMismatch, NonCoprimeModuli, NotADivisor, NotInvertible


@dataclass(frozen=True, order=True)
class Mat2:
    """An element of M_2(Z/NZ), usually of GL_2(Z/NZ)."""

    modulus: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        n = self.modulus
        if n < 1:
            raise ValueError("modulus must be >= 1, got %r" % (n,))
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name) % n
            object.__setattr__(self, name, v)

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return "Mat2(%d; [%d,%d,%d,%d])" % (self.modulus, self.a, self.b, self.c, self.d)


def identity(n: int) -> Mat2:
    return Mat2(n, 1, 0, 0, 1)


def minus_identity(n: int) -> Mat2:
    return Mat2(n, -1, 0, 0, -1)


def _same_modulus(x: Mat2, y: Mat2) -> int:
    if x.modulus != y.modulus:
        raise ModulusMismatch("mixed moduli %d and %d" % (x.modulus, y.modulus))
    return x.modulus


def mul(x: Mat2, y: Mat2) -> Mat2:
    n = _same_modulus(x, y)
    return Mat2(
        n,
        x.a * y.a + x.b * y.c,
        x.a * y.b + x.b * y.d,
        x.c * y.a + x.d * y.c,
        x.c * y.b + x.d * y.d,
    )


def det(x: Mat2) -> int:
    return (x.a * x.d - x.b * x.c) % x.modulus


def is_invertible(x: Mat2) -> bool:
    return math.gcd(det(x), x.modulus) == 1


def inv(x: Mat2) -> Mat2:
    n = x.modulus
    d = det(x)
    if math.gcd(d, n) != 1:
        raise NotInvertible("det %d is not a unit mod %d" % (d, n))
    u = pow(d, -1, n)
    return Mat2(n, u * x.d, -u * x.b, -u * x.c, u * x.a)


def crt_combine(x: Mat2, y: Mat2) -> Mat2:
    """The unique matrix mod M*N reducing to x mod M and to y mod N."""
    m, n = x.modulus, y.modulus
    if math.gcd(m, n) != 1:
        raise NonCoprimeModuli("moduli %d and %d share a factor" % (m, n))
    # e = a + M * ((b - a) / M mod N) entrywise
    minv = pow(m, -1, n)
    out = []
    for xa, ya in zip(x.entries, y.entries):
        out.append(xa + m * ((ya - xa) * minv % n))
    return Mat2(m * n, *out)


def reduce(x: Mat2, m: int) -> Mat2:
    if m < 1 or x.modulus % m != 0:
        raise NotADivisor("%d does not divide modulus %d" % (m, x.modulus))
    return Mat2(m, x.a, x.b, x.c, x.d)


def lift(x: Mat2, target: int) -> Mat2:
    """Lift x mod M to an invertible matrix mod `target`.

    Canonical choice: write target = M' * C with M' the largest divisor
    sharing every prime of M and C coprime to M; the lift keeps the same
    entries at the M'-part (entrywise lift stays invertible along prime
    powers) and is the identity at the coprime part.  For gcd(M, target/M)=1
    this is exactly crt_combine(x, Id).  Always reduce(lift(x), M) == x.
    """
    m = x.modulus
    if target % m != 0:
        raise NotADivisor("%d does not divide %d" % (m, target))
    if not is_invertible(x):
        raise NotInvertible("cannot lift a non-invertible matrix")
    if target == m:
        return x
    # largest divisor of target coprime to m, by stripping shared primes
    cop = target
    g = math.gcd(cop, m)
    while g != 1:
        cop //= g
        g = math.gcd(cop, m)
    mpart = target // cop  # same prime support as m, so entrywise lift stays invertible
    entry_lift = Mat2(mpart, x.a, x.b, x.c, x.d)
    if cop == 1:
        return entry_lift
    return crt_combine(entry_lift, identity(cop))


def element_order(x: Mat2) -> int:
    if not is_invertible(x):
        raise NotInvertible("order undefined for non-invertible matrix")
    e = identity(x.modulus)
    p = x
    k = 1
    while p != e:
        p = mul(p, x)
        k += 1
    return k


def trace(x: Mat2) -> int:
    return (x.a + x.d) % x.modulus


# --- packed-integer codec -------------------------------------------------
#
# A matrix mod N packs into the int a + N*b + N^2*c + N^3*d.  With N <= 143
# this stays below 2^31, so int64 numpy arrays of packed codes are safe for
# vectorized closure work.  The codec lives here so every module agrees on
# the encoding.


def encode(x: Mat2) -> int:
    n = x.modulus
    return x.a + n * (x.b + n * (x.c + n * x.d))


def decode(code: int, n: int) -> Mat2:
    a = code % n
    code //= n
    b = code % n
    code //= n
    c = code % n
    return Mat2(n, a, b, c, code // n)


def from_list(entries, n: int) -> Mat2:
    """Build from the row-major literal [a,b,c,d] used in files and the CLI."""
    if len(entries) != 4:
        raise ValueError("matrix literal needs exactly 4 entries, got %r" % (entries,))
    return Mat2(n, *entries)
