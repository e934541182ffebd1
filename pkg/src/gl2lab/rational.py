"""Exact arithmetic on elliptic curves over Q.

Everything here runs on arbitrary-precision rationals (`fractions.Fraction`);
there is deliberately no floating point.  The module covers the group law on
long Weierstrass models, reduction to short form, torsion via the integral
point bound, degree-2 isogenies by the classical kernel-translation
construction, and small bookkeeping helpers (Mordell-Weil decompositions
over a known generator, translation parity types).

Ranks are never computed here: they are data supplied by the registry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian
from typing import Iterator, Optional, Sequence

from .errors import (
    BasisMismatch,
    BoundExceeded,
    KernelNotOrder2,
    PointNotOnCurve,
    PreconditionViolated,
    SingularCurve,
    ZeroTwist,
)

Q = Fraction


def _frac(v) -> Fraction:
    """Coerce ints / strings like '3/4' to Fraction."""
    if isinstance(v, Fraction):
        return v
    return Fraction(v)


def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a rational, or None if q is not a square."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class RationalPoint:
    """A point on an elliptic curve: affine (x, y), or the point at infinity."""

    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    @staticmethod
    def infinity() -> "RationalPoint":
        return RationalPoint(None, None)

    @staticmethod
    def of(x, y) -> "RationalPoint":
        return RationalPoint(_frac(x), _frac(y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self) -> str:
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"


O = RationalPoint.infinity()


@dataclass(frozen=True)
class EllipticCurve:
    """A long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.discriminant() == 0:
            raise SingularCurve(f"singular model {self.coefficients()}")

    @staticmethod
    def from_coeffs(coeffs: Sequence) -> "EllipticCurve":
        a1, a2, a3, a4, a6 = (_frac(c) for c in coeffs)
        return EllipticCurve(a1, a2, a3, a4, a6)

    @staticmethod
    def short(A, B) -> "EllipticCurve":
        return EllipticCurve(0, 0, 0, _frac(A), _frac(B))

    def coefficients(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    # standard b/c covariants
    def b2(self) -> Fraction:
        return self.a1 * self.a1 + 4 * self.a2

    def b4(self) -> Fraction:
        return 2 * self.a4 + self.a1 * self.a3

    def b6(self) -> Fraction:
        return self.a3 * self.a3 + 4 * self.a6

    def b8(self) -> Fraction:
        return (
            self.a1 * self.a1 * self.a6
            + 4 * self.a2 * self.a6
            - self.a1 * self.a3 * self.a4
            + self.a2 * self.a3 * self.a3
            - self.a4 * self.a4
        )

    def c4(self) -> Fraction:
        return self.b2() ** 2 - 24 * self.b4()

    def c6(self) -> Fraction:
        return -self.b2() ** 3 + 36 * self.b2() * self.b4() - 216 * self.b6()

    def discriminant(self) -> Fraction:
        b2, b4, b6, b8 = self.b2(), self.b4(), self.b6(), self.b8()
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def j_invariant(self) -> Fraction:
        return self.c4() ** 3 / self.discriminant()

    @property
    def is_short(self) -> bool:
        return self.a1 == 0 and self.a2 == 0 and self.a3 == 0

    def short_model(self) -> "ShortForm":
        """Depress to y^2 = x^3 + Ax + B and remember the change of variables.

        The substitution is x = X - b2/12, y = Y - (a1 x + a3)/2, which gives
        A = -c4/48 and B = -c6/864.
        """
        A = -self.c4() / 48
        B = -self.c6() / 864
        return ShortForm(EllipticCurve.short(A, B), self)

    # ----- group law -------------------------------------------------

    def evaluate(self, x: Fraction, y: Fraction) -> Fraction:
        """LHS - RHS of the Weierstrass equation; zero iff (x, y) is on the curve."""
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x ** 3 + self.a2 * x * x + self.a4 * x + self.a6
        return lhs - rhs

    def on_curve(self, P: RationalPoint) -> bool:
        if P.is_infinity:
            return True
        return self.evaluate(P.x, P.y) == 0

    def _require(self, P: RationalPoint):
        if not self.on_curve(P):
            raise PointNotOnCurve(f"{P} is not on {self.coefficients()}")

    def neg(self, P: RationalPoint) -> RationalPoint:
        if P.is_infinity:
            return P
        return RationalPoint(P.x, -P.y - self.a1 * P.x - self.a3)

    def add(self, P: RationalPoint, R: RationalPoint) -> RationalPoint:
        if P.is_infinity:
            return R
        if R.is_infinity:
            return P
        x1, y1, x2, y2 = P.x, P.y, R.x, R.y
        if x1 == x2 and y1 + y2 + self.a1 * x2 + self.a3 == 0:
            return O
        if x1 == x2:
            lam = (3 * x1 * x1 + 2 * self.a2 * x1 + self.a4 - self.a1 * y1) / (
                2 * y1 + self.a1 * x1 + self.a3
            )
        else:
            lam = (y2 - y1) / (x2 - x1)
        nu = y1 - lam * x1
        x3 = lam * lam + self.a1 * lam - self.a2 - x1 - x2
        y3 = -(lam + self.a1) * x3 - nu - self.a3
        return RationalPoint(x3, y3)

    def sub(self, P: RationalPoint, R: RationalPoint) -> RationalPoint:
        return self.add(P, self.neg(R))

    def scalar_mul(self, n: int, P: RationalPoint) -> RationalPoint:
        if n < 0:
            return self.scalar_mul(-n, self.neg(P))
        acc = O
        addend = P
        while n:
            if n & 1:
                acc = self.add(acc, addend)
            addend = self.add(addend, addend)
            n >>= 1
        return acc

    def point_order(self, P: RationalPoint, cap: int = 12) -> Optional[int]:
        """Order of P if at most cap, else None (then P is non-torsion over Q)."""
        acc = P
        for n in range(1, cap + 1):
            if acc.is_infinity:
                return n
            acc = self.add(acc, P)
        return None


@dataclass(frozen=True)
class ShortForm:
    """A depressed model together with the curve it came from.

    Maps a point (x, y) on the original curve to the short model via
    X = x + b2/12, Y = y + (a1 x + a3)/2.
    """

    curve: EllipticCurve
    original: EllipticCurve

    def to_short(self, P: RationalPoint) -> RationalPoint:
        if P.is_infinity:
            return P
        X = P.x + self.original.b2() / 12
        Y = P.y + (self.original.a1 * P.x + self.original.a3) / 2
        return RationalPoint(X, Y)

    def from_short(self, P: RationalPoint) -> RationalPoint:
        if P.is_infinity:
            return P
        x = P.x - self.original.b2() / 12
        y = P.y - (self.original.a1 * x + self.original.a3) / 2
        return RationalPoint(x, y)


def j_invariant(E: EllipticCurve) -> Fraction:
    return E.j_invariant()


def quadratic_twist(E: EllipticCurve, d: int) -> EllipticCurve:
    """The twist y^2 = x^3 + d^2 A x + d^3 B of a short model."""
    if d == 0:
        raise ZeroTwist("twist parameter must be nonzero")
    if not E.is_short:
        E = E.short_model().curve
    return EllipticCurve.short(d * d * E.a4, d ** 3 * E.a6)


# ----- torsion ------------------------------------------------------------


_ALLOWED_CYCLIC = tuple(range(1, 11)) + (12,)
_ALLOWED_SPLIT = (2, 4, 6, 8)


def mazur_validate(structure: Sequence[int]) -> bool:
    """True iff the invariant factors form one of the fifteen allowed groups."""
    inv = tuple(n for n in structure if n > 1)
    if len(inv) == 0:
        return True
    if len(inv) == 1:
        return inv[0] in _ALLOWED_CYCLIC
    if len(inv) == 2:
        return inv[0] == 2 and inv[1] in _ALLOWED_SPLIT
    return False


def _divisors_of(n: int) -> Iterator[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    yield from small
    yield from reversed(large)


def _integral_rescale(A: Fraction, B: Fraction) -> tuple[int, int, int]:
    """Smallest u with u^4 A and u^6 B integral; returns (u, A', B')."""

    def valuation(n: int, p: int) -> int:
        v = 0
        while n % p == 0:
            v += 1
            n //= p
        return v

    u = 1
    den = A.denominator * B.denominator
    p = 2
    while p * p <= den:
        if den % p == 0:
            va = valuation(A.denominator, p)
            vb = valuation(B.denominator, p)
            u *= p ** max(-(-va // 4), -(-vb // 6))
            while den % p == 0:
                den //= p
        p += 1 if p == 2 else 2
    if den > 1:  # one large prime left over
        u *= den
    Ai = A * u ** 4
    Bi = B * u ** 6
    assert Ai.denominator == 1 and Bi.denominator == 1
    return u, int(Ai), int(Bi)


def _short_integral_torsion(A: int, B: int) -> list[RationalPoint]:
    """All torsion points on y^2 = x^3 + Ax + B by the integral-point bound.

    Candidate points have integral coordinates with y = 0 or y^2 | disc;
    candidates are kept only if their order is at most 12.
    """
    E = EllipticCurve.short(A, B)
    disc = int(E.discriminant())
    found = {(None, None)}
    points = [O]

    def consider(x: int, y: int):
        if E.evaluate(Fraction(x), Fraction(y)) != 0:
            return
        P = RationalPoint.of(x, y)
        if E.point_order(P) is None:
            return
        for Q_ in (P, E.neg(P)):
            key = (Q_.x, Q_.y)
            if key not in found:
                found.add(key)
                points.append(Q_)

    # y = 0: integer roots of the cubic divide B (or x = 0 when B = 0)
    if B == 0:
        consider(0, 0)
    for d in _divisors_of(B if B != 0 else A):
        for x in (d, -d):
            if x ** 3 + A * x + B == 0:
                consider(x, 0)

    # y != 0: y^2 divides the discriminant
    for y in _divisors_of(disc):
        if disc % (y * y) != 0:
            continue
        c = B - y * y
        if c == 0:
            consider(0, y)
        for d in _divisors_of(c if c != 0 else A):
            for x in (d, -d):
                if x ** 3 + A * x + c == 0:
                    consider(x, y)

    # close under addition (the group is small, at most 16 points)
    changed = True
    while changed:
        changed = False
        current = list(points)
        for P in current:
            for R in current:
                S = E.add(P, R)
                key = (S.x, S.y)
                if key not in found:
                    if E.point_order(S) is None:
                        continue
                    found.add(key)
                    points.append(S)
                    changed = True
    return points


@dataclass(frozen=True)
class TorsionSubgroup:
    structure: tuple[int, ...]  # invariant factors, e.g. (2, 4)
    generators: tuple[RationalPoint, ...]  # on the original model
    points: tuple[RationalPoint, ...]

    @property
    def order(self) -> int:
        n = 1
        for f in self.structure:
            n *= f
        return n


def torsion_subgroup(E: EllipticCurve) -> TorsionSubgroup:
    """Rational torsion of E, computed on an integral short model."""
    sf = E.short_model()
    u, A, B = _integral_rescale(sf.curve.a4, sf.curve.a6)
    Ei = EllipticCurve.short(A, B)

    def scale_back(P: RationalPoint) -> RationalPoint:
        if P.is_infinity:
            return P
        return sf.from_short(RationalPoint(P.x / (u * u), P.y / (u ** 3)))

    pts_i = _short_integral_torsion(A, B)
    pts = [scale_back(P) for P in pts_i]
    n = len(pts)

    orders = {}
    for P in pts:
        orders[(P.x, P.y)] = E.point_order(P) or 0
    max_order = max(orders.values())

    if max_order == n:
        structure = (n,) if n > 1 else ()
        gen = next(P for P in pts if orders[(P.x, P.y)] == n) if n > 1 else None
        gens = (gen,) if gen is not None else ()
    else:
        # Mazur leaves only Z/2 x Z/2M here
        m = n // 2
        assert max_order == m, "unexpected torsion shape"
        g1 = next(P for P in pts if orders[(P.x, P.y)] == m)
        span = {((E.scalar_mul(k, g1)).x, (E.scalar_mul(k, g1)).y) for k in range(m)}
        g2 = next(P for P in pts if orders[(P.x, P.y)] == 2 and (P.x, P.y) not in span)
        structure = (2, m)
        gens = (g2, g1)
    result = TorsionSubgroup(structure, gens, tuple(pts))
    assert mazur_validate(result.structure)
    return result


# ----- degree-2 isogenies -------------------------------------------------


@dataclass(frozen=True)
class Isogeny2:
    """A degree-2 isogeny between short models, with its evaluation map."""

    domain: EllipticCurve
    codomain: EllipticCurve
    kernel_x: Fraction

    def __call__(self, P: RationalPoint) -> RationalPoint:
        if P.is_infinity:
            return O
        if P.x == self.kernel_x:
            return O
        x0 = self.kernel_x
        t = 3 * x0 * x0 + self.domain.a4
        dx = P.x - x0
        return RationalPoint(P.x + t / dx, P.y * (1 - t / (dx * dx)))


def two_isogeny(E: EllipticCurve, kernel: RationalPoint) -> Isogeny2:
    """Quotient of E by a rational 2-torsion point.

    With the kernel at x0 on y^2 = x^3 + Ax + B, set t = 3 x0^2 + A and
    w = x0 t; the codomain is y^2 = x^3 + (A - 5t) x + (B - 7w).
    """
    if not E.is_short:
        raise PreconditionViolated("two_isogeny expects a short model")
    if kernel.is_infinity or kernel.y != 0 or not E.on_curve(kernel):
        raise KernelNotOrder2(f"{kernel} is not a 2-torsion point of the model")
    x0 = kernel.x
    t = 3 * x0 * x0 + E.a4
    w = x0 * t
    codomain = EllipticCurve.short(E.a4 - 5 * t, E.a6 - 7 * w)
    return Isogeny2(E, codomain, x0)


def minimal_scaling_match(C: EllipticCurve, target: EllipticCurve):
    """A change of variables x -> u^2 x + r, y -> u^3 y carrying C onto target.

    Both models must be short, which forces r = 0; u is recovered exactly from
    the covariants via c4(C) = u^4 c4(T), c6(C) = u^6 c6(T).  Returns (u, r)
    or None when the curves are not isomorphic this way.
    """
    if not (C.is_short and target.is_short):
        raise PreconditionViolated("scaling match expects short models")
    c4c, c6c = C.c4(), C.c6()
    c4t, c6t = target.c4(), target.c6()
    if (c4t == 0) != (c4c == 0) or (c6t == 0) != (c6c == 0):
        return None
    if c4t == 0:
        # j = 0: u^6 = c6(C)/c6(T)
        ratio = c6c / c6t
        u2 = _nth_root(ratio, 3)
        if u2 is None:
            return None
        u = rational_sqrt(u2)
        return (u, Q(0)) if u else None
    if c6t == 0:
        # j = 1728: u^4 = c4(C)/c4(T)
        u2 = rational_sqrt(c4c / c4t)
        if u2 is None or u2 <= 0:
            return None
        u = rational_sqrt(u2)
        return (u, Q(0)) if u else None
    u2 = (c6c * c4t) / (c4c * c6t)
    if u2 <= 0:
        return None
    if c4c != u2 * u2 * c4t or c6c != u2 ** 3 * c6t:
        return None
    u = rational_sqrt(u2)
    return (u, Q(0)) if u else None


def _nth_root(q: Fraction, n: int) -> Optional[Fraction]:
    neg = q < 0
    if neg and n % 2 == 0:
        return None
    num, den = abs(q.numerator), q.denominator
    rn = round(num ** (1.0 / n))
    rd = round(den ** (1.0 / n))
    for a in (rn - 1, rn, rn + 1):
        for b in (rd - 1, rd, rd + 1):
            if a > 0 and b > 0 and a ** n == num and b ** n == den:
                r = Fraction(a, b)
                return -r if neg else r
    return None


# ----- Mordell-Weil bookkeeping ------------------------------------------


def mw_decompose(
    E: EllipticCurve,
    P: RationalPoint,
    g1: RationalPoint,
    torsion_gens: Sequence[RationalPoint],
    bound: int,
) -> tuple[int, ...]:
    """Write P as A*g1 + sum(c_i * t_i) with |A| <= bound.

    Raises BoundExceeded when no decomposition exists within the bound —
    the caller may retry with a larger one.
    """
    if bound < 1:
        raise PreconditionViolated("bound must be at least 1")
    E._require(P)
    E._require(g1)
    t_orders = []
    for t in torsion_gens:
        E._require(t)
        o = E.point_order(t)
        if o is None:
            raise PreconditionViolated("torsion generator is not torsion")
        t_orders.append(o)

    for a in range(0, bound + 1):
        for A in {a, -a}:
            base = E.scalar_mul(A, g1)
            for coeffs in _cartesian(*(range(o) for o in t_orders)):
                S = base
                for c, t in zip(coeffs, torsion_gens):
                    S = E.add(S, E.scalar_mul(c, t))
                if S.x == P.x and S.y == P.y or (S.is_infinity and P.is_infinity):
                    return (A,) + tuple(coeffs)
    raise BoundExceeded(f"no decomposition of {P} with |A| <= {bound}")


def translation_type(decomp1: Sequence[int], decomp2: Sequence[int]) -> bool:
    """True when two decompositions have the same componentwise parity."""
    if len(decomp1) != len(decomp2):
        raise BasisMismatch("decompositions use different generator bases")
    return all((a - b) % 2 == 0 for a, b in zip(decomp1, decomp2))
