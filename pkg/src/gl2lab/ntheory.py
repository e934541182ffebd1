"""Small number-theory utilities: factorization, divisors, group orders."""

from __future__ import annotations

import math
import random


def factorize(n: int) -> dict[int, int]:
    """Prime factorization as {p: exponent}. Trial division, then a
    Miller-Rabin/pollard-rho fallback for the occasional large cofactor
    (curve discriminants)."""
    if n < 0:
        n = -n
    out: dict[int, int] = {}
    if n <= 1:
        return out
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 17
    while f * f <= n and f < 1_000_000:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 2
    if n > 1:
        for p in _factor_large(n):
            out[p] = out.get(p, 0) + 1
    return out


def _factor_large(n: int) -> list[int]:
    if n == 1:
        return []
    if is_probable_prime(n):
        return [n]
    d = _pollard_rho(n)
    return sorted(_factor_large(d) + _factor_large(n // d))


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    while True:
        x = random.randrange(2, n)
        y, c, d = x, random.randrange(1, n), 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
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


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n).items():
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out


def gl2_order(n: int) -> int:
    """|GL(2, Z/NZ)| = N^4 prod_{p|N} (1 - 1/p)(1 - 1/p^2)."""
    out = n**4
    for p in factorize(n):
        out = out // (p * p * p) * ((p - 1) * (p * p - 1))
    return out


def sl2_order(n: int) -> int:
    """|SL(2, Z/NZ)| = N^3 prod_{p|N} (1 - 1/p^2)."""
    out = n**3
    for p in factorize(n):
        out = out // (p * p) * (p * p - 1)
    return out


def kronecker_minus_one(p: int) -> int:
    """(-1|p) for odd primes."""
    return 1 if p % 4 == 1 else -1


def kronecker_minus_three(p: int) -> int:
    """(-3|p) for primes p != 3."""
    if p == 2:
        return -1
    return 1 if p % 3 == 1 else -1
