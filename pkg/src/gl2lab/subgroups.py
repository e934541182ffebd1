"""Finitely generated subgroups of GL(2, Z/NZ).

The workhorse representation is a sorted int64 numpy array of packed matrix
codes (see matrices.encode); closures, reductions, CRT products and
conjugator scans are all vectorized over such arrays.  A Subgroup is
immutable once its element set is materialized and safe to share.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import matrices as mat
from .errors import (
    CapExceeded,
    ModulusMismatch,
    NonCoprimeModuli,
    NotADivisor,
    NotInvertible,
    PreconditionViolated,
)
from .matrices import Mat2
from .ntheory import divisors, euler_phi, factorize, gl2_order

DEFAULT_CAP = 20_000_000

# --- vectorized packed-code arithmetic ------------------------------------


def _cols(codes, n):
    a = codes % n
    r = codes // n
    b = r % n
    r = r // n
    c = r % n
    return a, b, c, r // n


def _pack(a, b, c, d, n):
    return ((d * n + c) * n + b) * n + a


def _mul_by_const(codes, g, n):
    """Right-multiply every packed matrix by the constant matrix g."""
    a, b, c, d = _cols(codes, n)
    ga, gb, gc, gd = g
    return _pack(
        (a * ga + b * gc) % n,
        (a * gb + b * gd) % n,
        (c * ga + d * gc) % n,
        (c * gb + d * gd) % n,
        n,
    )


def _lmul_by_const(codes, g, n):
    """Left-multiply every packed matrix by the constant matrix g."""
    a, b, c, d = _cols(codes, n)
    ga, gb, gc, gd = g
    return _pack(
        (ga * a + gb * c) % n,
        (ga * b + gb * d) % n,
        (gc * a + gd * c) % n,
        (gc * b + gd * d) % n,
        n,
    )


def _mul_pairwise(x, y, n):
    xa, xb, xc, xd = _cols(x, n)
    ya, yb, yc, yd = _cols(y, n)
    return _pack(
        (xa * ya + xb * yc) % n,
        (xa * yb + xb * yd) % n,
        (xc * ya + xd * yc) % n,
        (xc * yb + xd * yd) % n,
        n,
    )


def _det_codes(codes, n):
    a, b, c, d = _cols(codes, n)
    return (a * d - b * c) % n


def _trace_codes(codes, n):
    a, _, _, d = _cols(codes, n)
    return (a + d) % n


@lru_cache(maxsize=64)
def _unit_inv_table(n):
    t = np.full(n, -1, dtype=np.int64)
    for u in range(1, n):
        if math.gcd(u, n) == 1:
            t[u] = pow(u, -1, n)
    if n == 1:
        t = np.zeros(1, dtype=np.int64)
    return t


def _inv_codes(codes, n):
    """Vectorized inverse; caller guarantees invertibility."""
    a, b, c, d = _cols(codes, n)
    det = (a * d - b * c) % n
    u = _unit_inv_table(n)[det]
    return _pack(u * d % n, (-u * b) % n, (-u * c) % n, u * a % n, n)


def _reduce_codes(codes, n, m):
    if m == n:
        return codes
    a, b, c, d = _cols(codes, n)
    return _pack(a % m, b % m, c % m, d % m, m)


def _member(sorted_codes, probes):
    """Boolean mask: which probes lie in the sorted code array."""
    idx = np.searchsorted(sorted_codes, probes)
    idx[idx == len(sorted_codes)] = 0
    return sorted_codes[idx] == probes


def _member_one(sorted_codes, code):
    i = int(np.searchsorted(sorted_codes, code))
    return i < len(sorted_codes) and int(sorted_codes[i]) == code


def _closure_codes(seed, gens, n, cap):
    """BFS closure of the seed set under right-multiplication by gens.

    seed: int64 array (need not contain Id); gens: list of entry 4-tuples.
    Returns the sorted closure. Deterministic for fixed seed/generator order.
    """
    idc = np.int64(mat.encode(mat.identity(n)))
    known = np.unique(np.append(seed, idc))
    frontier = known
    while frontier.size:
        if not gens:
            break
        prods = np.concatenate([_mul_by_const(frontier, g, n) for g in gens])
        prods = np.unique(prods)
        fresh = prods[~_member(known, prods)]
        if fresh.size == 0:
            break
        known = np.union1d(known, fresh)
        if known.size > cap:
            raise CapExceeded("closure exceeded cap %d" % cap, count=int(known.size))
        frontier = fresh
    return known


def _grow_span(seed_sorted, n, cap, base_gens=()):
    """Find a short generating list for the group generated by all elements
    of seed_sorted (assumed to contain only invertible matrices).

    Returns (generator entry-tuples, closure array).  Each adopted generator
    at least doubles the closure, so the list stays logarithmic.
    """
    gens = [tuple(int(v) for v in g) for g in base_gens]
    known = _closure_codes(np.asarray([], dtype=np.int64), gens, n, cap)
    for s in seed_sorted:
        if _member_one(known, int(s)):
            continue
        gens.append(mat.decode(int(s), n).entries)
        known = _closure_codes(known, gens, n, cap)
    return gens, known


# --- the Subgroup type ----------------------------------------------------


class Subgroup:
    """A subgroup of GL(2, Z/NZ), materialized as a sorted code array."""

    __slots__ = ("modulus", "generators", "label", "provenance", "_codes", "_cap")

    def __init__(self, modulus, generators, label=None, provenance=None, _codes=None, cap=DEFAULT_CAP):
        self.modulus = int(modulus)
        gens = tuple(generators)
        for g in gens:
            if g.modulus != self.modulus:
                raise ModulusMismatch("generator modulus %d != %d" % (g.modulus, self.modulus))
            if not mat.is_invertible(g):
                raise NotInvertible("generator %r is not invertible" % (g,))
        self.generators = gens
        self.label = label
        self.provenance = provenance
        self._codes = _codes
        self._cap = cap

    # -- materialization --

    @property
    def codes(self):
        if self._codes is None:
            gen_tuples = [g.entries for g in self.generators]
            self._codes = _closure_codes(
                np.asarray([], dtype=np.int64), gen_tuples, self.modulus, self._cap
            )
        return self._codes

    @property
    def order(self):
        return int(self.codes.size)

    @property
    def index(self):
        return gl2_order(self.modulus) // self.order

    def __contains__(self, x):
        if not isinstance(x, Mat2) or x.modulus != self.modulus:
            return False
        return _member_one(self.codes, mat.encode(x))

    def elements(self):
        for code in self.codes:
            yield mat.decode(int(code), self.modulus)

    def same_elements(self, other):
        return self.modulus == other.modulus and np.array_equal(self.codes, other.codes)

    def is_subset_of(self, other):
        if self.modulus != other.modulus:
            raise ModulusMismatch("moduli %d vs %d" % (self.modulus, other.modulus))
        return bool(_member(other.codes, self.codes).all())

    def reduce(self, m):
        if m < 1 or self.modulus % m:
            raise NotADivisor("%d does not divide %d" % (m, self.modulus))
        red = np.unique(_reduce_codes(self.codes, self.modulus, m))
        gens = tuple(mat.reduce(g, m) for g in self.generators)
        return Subgroup(m, gens, _codes=red, cap=self._cap)

    def __repr__(self):
        tag = self.label or ("<%d gens>" % len(self.generators))
        size = "order %d" % self._codes.size if self._codes is not None else "unmaterialized"
        return "Subgroup(mod %d, %s, %s)" % (self.modulus, tag, size)


def closure(generators, cap=DEFAULT_CAP, label=None):
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator (or use trivial_group)")
    n = gens[0].modulus
    return Subgroup(n, gens, label=label, cap=cap)


def trivial_group(n):
    return Subgroup(n, (), _codes=np.asarray([mat.encode(mat.identity(n))], dtype=np.int64))


def from_codes(n, codes, generators=None, label=None, provenance=None, cap=DEFAULT_CAP):
    """Trusted constructor: codes must already be a closed subgroup, sorted."""
    codes = np.asarray(codes, dtype=np.int64)
    if generators is None:
        gen_tuples, closed = _grow_span(codes, n, cap)
        if closed.size != codes.size:
            raise ValueError("code set was not multiplicatively closed")
        generators = [Mat2(n, *g) for g in gen_tuples]
    return Subgroup(n, generators, label=label, provenance=provenance, _codes=codes, cap=cap)


# --- full groups, Borel, SL2 ---------------------------------------------


@lru_cache(maxsize=32)
def _prime_power_gl2_codes(q):
    """All of GL(2, Z/qZ) by direct enumeration (q a small prime power)."""
    if q**4 > 40_000_000:
        raise CapExceeded("GL2 enumeration at modulus %d is too large" % q)
    codes = np.arange(q**4, dtype=np.int64)
    dets = _det_codes(codes, q)
    unit = np.zeros(q, dtype=bool)
    for u in range(q):
        unit[u] = math.gcd(u, q) == 1
    return codes[unit[dets]]


def _crt_codes(x_codes, m, y_codes, n):
    """All pairwise CRT combinations: |x| * |y| packed codes mod m*n."""
    minv = pow(m, -1, n)
    xa = _cols(x_codes, m)
    ya = _cols(y_codes, n)
    packed = []
    for xe, ye in zip(xa, ya):
        e = xe[:, None] + m * ((ye[None, :] - xe[:, None]) * minv % n)
        packed.append(e.ravel())
    a, b, c, d = packed
    return _pack(a, b, c, d, m * n)


def gl2(n, cap=DEFAULT_CAP):
    """The full group GL(2, Z/NZ) with materialized elements."""
    if n == 1:
        return trivial_group(1)
    parts = sorted(p**e for p, e in factorize(n).items())
    codes = _prime_power_gl2_codes(parts[0])
    m = parts[0]
    for q in parts[1:]:
        if codes.size * _prime_power_gl2_codes(q).size > cap:
            raise CapExceeded("GL2(Z/%dZ) exceeds cap" % n)
        codes = np.sort(_crt_codes(codes, m, _prime_power_gl2_codes(q), q))
        m *= q
    codes = np.sort(codes)
    return from_codes(n, codes, generators=_gl2_generators(n), label=None)


def _gl2_generators(n):
    gens = [Mat2(n, 1, 1, 0, 1), Mat2(n, 1, 0, 1, 1)]
    for u in _unit_group_generators(n):
        gens.append(Mat2(n, u, 0, 0, 1))
    return gens


def _unit_group_generators(n):
    """Generators of (Z/NZ)^*, by CRT from prime-power parts."""
    if n <= 2:
        return []
    out = []
    for p, e in factorize(n).items():
        q = p**e
        if p == 2:
            locs = {2: [], 4: [3]}.get(q, [q - 1, 5])
        else:
            locs = [_primitive_root(q)]
        for r in locs:
            out.append(_scalar_crt(r, q, n))
    return sorted(set(o % n for o in out))


def _scalar_crt(r, q, n):
    """The unit mod n that is r mod q and 1 mod n/q (q a prime-power factor)."""
    rest = n // q
    if rest == 1:
        return r % n
    qinv = pow(q, -1, rest)
    return (r % q) + q * ((1 - (r % q)) * qinv % rest)


def _primitive_root(q):
    """A primitive root mod odd prime power q."""
    p = min(factorize(q))
    phi = euler_phi(q)
    fac = factorize(phi)
    for g in range(2, q):
        if math.gcd(g, q) != 1:
            continue
        if all(pow(g, phi // f, q) != 1 for f in fac):
            return g
    raise RuntimeError("no primitive root found mod %d" % q)


@lru_cache(maxsize=32)
def _sl2_prime_power_codes(q):
    codes = np.arange(q**4, dtype=np.int64)
    return codes[_det_codes(codes, q) == 1]


@lru_cache(maxsize=16)
def sl2_codes(n):
    """Sorted packed codes of SL(2, Z/NZ), via CRT over prime powers."""
    if n == 1:
        return np.asarray([0], dtype=np.int64)
    parts = sorted(p**e for p, e in factorize(n).items())
    codes = _sl2_prime_power_codes(parts[0])
    m = parts[0]
    for q in parts[1:]:
        codes = _crt_codes(codes, m, _sl2_prime_power_codes(q), q)
        m *= q
    return np.sort(codes)


def borel(n):
    """Upper-triangular matrices mod N: the standard X_0(N) group."""
    a = np.asarray([u for u in range(n) if math.gcd(u, n) == 1], dtype=np.int64)
    b = np.arange(n, dtype=np.int64)
    d = a
    A, B, D = np.meshgrid(a, b, d, indexing="ij")
    codes = _pack(A.ravel(), B.ravel(), np.zeros(A.size, dtype=np.int64), D.ravel(), n)
    gens = [Mat2(n, 1, 1, 0, 1)]
    for u in _unit_group_generators(n):
        gens.extend([Mat2(n, u, 0, 0, 1), Mat2(n, 1, 0, 0, u)])
    if n <= 2:
        gens = [Mat2(n, 1, 1, 0, 1)]
    return from_codes(n, np.sort(codes), generators=gens, label=None)


# --- structural predicates ------------------------------------------------


def contains_minus_id(H):
    return _member_one(H.codes, mat.encode(mat.minus_identity(H.modulus)))


def det_image_is_full(H):
    dets = np.unique(_det_codes(H.codes, H.modulus))
    return dets.size == euler_phi(H.modulus)


@lru_cache(maxsize=16)
def _conjugation_orbit(n, seed_entries):
    """Sorted codes of the GL(2,Z/nZ)-conjugacy class of the seed matrix."""
    seed = np.asarray([mat.encode(Mat2(n, *seed_entries))], dtype=np.int64)
    gens = [g.entries for g in _gl2_generators(n)]
    ginv = [mat.inv(g).entries for g in _gl2_generators(n)]
    orbit = seed
    frontier = seed
    while frontier.size:
        batches = []
        for g, gi in zip(gens, ginv):
            batches.append(_mul_by_const(_lmul_by_const(frontier, gi, n), g, n))
        probes = np.unique(np.concatenate(batches))
        fresh = probes[~_member(orbit, probes)]
        if fresh.size == 0:
            break
        orbit = np.union1d(orbit, fresh)
        frontier = fresh
    return orbit


def has_complex_conjugation(H):
    """Does H contain a conjugate of [[1,0],[0,-1]] or [[1,1],[0,-1]]?"""
    n = H.modulus
    codes = H.codes
    dets = _det_codes(codes, n)
    cand = codes[dets == (n - 1) % n]
    if cand.size == 0:
        return False
    sq = _mul_pairwise(cand, cand, n)
    cand = cand[sq == mat.encode(mat.identity(n))]
    if cand.size == 0:
        return False
    ok = np.ones(cand.size, dtype=bool)
    for p, e in factorize(n).items():
        q = p**e
        part = _reduce_codes(cand, n, q)
        if p == 2:
            orbA = _conjugation_orbit(q, (1, 0, 0, q - 1))
            orbB = _conjugation_orbit(q, (1, 1, 0, q - 1))
            ok &= _member(orbA, part) | _member(orbB, part)
        else:
            # odd prime power: z^2=Id, det=-1 forces conjugacy to diag(1,-1);
            # the trace-zero check is kept as a guard
            ok &= _trace_codes(part, q) == 0
    return bool(ok.any())


# --- level / preimage / products -----------------------------------------


def level(H):
    n = H.modulus
    full_n = gl2_order(n)
    for m in divisors(n):
        if m == n:
            return n
        red_size = int(np.unique(_reduce_codes(H.codes, n, m)).size)
        kernel = full_n // gl2_order(m)
        if red_size * kernel == H.order:
            return m
    return n


def preimage(H, target, cap=DEFAULT_CAP):
    """Full preimage of H under GL(2,Z/target) -> GL(2,Z/M)."""
    m = H.modulus
    if target % m:
        raise NotADivisor("%d does not divide %d" % (m, target))
    if target == m:
        return H
    if m == 1:
        return gl2(target, cap=cap)
    # split target = tm * tc: tm shares all primes with m, tc coprime to m
    tc = target
    g = math.gcd(tc, m)
    while g != 1:
        tc //= g
        g = math.gcd(tc, m)
    tm = target // tc

    codes = H.codes
    q = tm // m
    if q > 1:
        if codes.size * q**4 > cap:
            raise CapExceeded("preimage too large", count=int(codes.size * q**4))
        # every entrywise lift stays invertible (same prime support)
        aa, bb, cc, dd = _cols(codes, m)
        K = np.arange(q, dtype=np.int64) * m
        new = _pack(
            aa[:, None, None, None, None] + K[None, :, None, None, None],
            bb[:, None, None, None, None] + K[None, None, :, None, None],
            cc[:, None, None, None, None] + K[None, None, None, :, None],
            dd[:, None, None, None, None] + K[None, None, None, None, :],
            tm,
        ).ravel()
        codes_tm = np.sort(new)
    else:
        codes_tm = codes
    if tc > 1:
        other = _prime_power_gl2_parts(tc)
        if codes_tm.size * other.size > cap:
            raise CapExceeded("preimage too large", count=int(codes_tm.size * other.size))
        out = np.sort(_crt_codes(codes_tm, tm, other, tc))
    else:
        out = codes_tm

    gens = [mat.lift(g2, target) for g2 in H.generators]
    if q > 1:
        for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)):
            e = [[0, 0], [0, 0]]
            e[i][j] = m
            k = Mat2(tm, 1 + e[0][0], e[0][1], e[1][0], 1 + e[1][1])
            gens.append(mat.lift(k, target) if tm != target else k)
    if tc > 1:
        for g2 in _gl2_generators(tc):
            gens.append(mat.crt_combine(mat.identity(tm), g2))
    # The elementary unipotent kernel generators need not span the whole
    # congruence kernel once target/m is divisible by a square, so close the
    # span and adjoin coset representatives until it matches the element set.
    entries = [g2.entries for g2 in gens]
    span = _closure_codes(np.asarray([], dtype=np.int64), entries, target, cap)
    while span.size < out.size:
        missing = out[~_member(span, out)]
        extra = mat.decode(int(missing[0]), target)
        gens.append(extra)
        entries.append(extra.entries)
        span = _closure_codes(span, entries, target, cap)
    return Subgroup(target, gens, _codes=out, cap=cap)


def _prime_power_gl2_parts(n):
    """Codes of GL2(Z/n) for n with possibly several primes (n smallish)."""
    parts = sorted(p**e for p, e in factorize(n).items())
    codes = _prime_power_gl2_codes(parts[0])
    m = parts[0]
    for q in parts[1:]:
        codes = _crt_codes(codes, m, _prime_power_gl2_codes(q), q)
        m *= q
    return np.sort(codes)


def product_group(A, B, cap=DEFAULT_CAP):
    """The CRT direct product inside GL(2, Z/(MN)Z)."""
    m, n = A.modulus, B.modulus
    if math.gcd(m, n) != 1:
        raise NonCoprimeModuli("moduli %d, %d not coprime" % (m, n))
    if A.order * B.order > cap:
        raise CapExceeded("product order %d exceeds cap" % (A.order * B.order))
    codes = np.sort(_crt_codes(A.codes, m, B.codes, n))
    gens = [mat.crt_combine(g, mat.identity(n)) for g in A.generators]
    gens += [mat.crt_combine(mat.identity(m), g) for g in B.generators]
    prov = ("product", A.label or "?", B.label or "?")
    return Subgroup(m * n, gens, provenance=prov, _codes=codes, cap=cap)


# --- conjugacy ------------------------------------------------------------


def _det_image(H):
    return tuple(int(v) for v in np.unique(_det_codes(H.codes, H.modulus)))


def _element_orders(codes, n):
    idc = np.int64(mat.encode(mat.identity(n)))
    orders = np.zeros(codes.size, dtype=np.int64)
    acc = codes.copy()
    active = np.arange(codes.size)
    k = 1
    while active.size:
        done = acc[active] == idc
        orders[active[done]] = k
        active = active[~done]
        if not active.size:
            break
        acc[active] = _mul_pairwise(acc[active], codes[active], n)
        k += 1
        if k > 100_000:
            raise RuntimeError("element order runaway (non-invertible input?)")
    return orders


def _fingerprint(H):
    n = H.modulus
    tr = _trace_codes(H.codes, n)
    dt = _det_codes(H.codes, n)
    od = _element_orders(H.codes, n)
    trip = np.stack([tr, dt, od], axis=1)
    view = trip[np.lexsort((od, dt, tr))]
    return (H.order, _det_image(H), view.tobytes())


def _conjugator_codes_prime_power(H1, H2, cap):
    """All conjugators x with x H1 x^-1 = H2, as a code array (prime-power n)."""
    n = H1.modulus
    ambient = _prime_power_gl2_codes(n) if len(factorize(n)) == 1 else _prime_power_gl2_parts(n)
    cand = ambient
    h2 = H2.codes
    for g in _gens_or_span(H1):
        ge = g.entries
        conj = _mul_pairwise(_mul_by_const(cand, ge, n), _inv_codes(cand, n), n)
        # x*g*x^{-1}: left factor is x*g, right is x^{-1}
        cand = cand[_member(h2, conj)]
        if cand.size == 0:
            return cand
    return cand


def _gens_or_span(H):
    if H.generators:
        return H.generators
    gen_tuples, _ = _grow_span(H.codes, H.modulus, DEFAULT_CAP)
    return [Mat2(H.modulus, *g) for g in gen_tuples]


def are_conjugate(H1, H2, cap=DEFAULT_CAP):
    """A conjugator x with x H1 x^-1 = H2, or None."""
    if H1.modulus != H2.modulus:
        raise ModulusMismatch("moduli %d vs %d" % (H1.modulus, H2.modulus))
    n = H1.modulus
    if H1.order != H2.order:
        return None
    if _det_image(H1) != _det_image(H2):
        return None
    if H1.same_elements(H2):
        return mat.identity(n)
    parts = sorted(p**e for p, e in factorize(n).items())
    if len(parts) == 1:
        if _fingerprint(H1) != _fingerprint(H2):
            return None
        cand = _conjugator_codes_prime_power(H1, H2, cap)
        if cand.size == 0:
            return None
        return mat.decode(int(cand[0]), n)
    # multi-prime: any conjugator's components conjugate the projections
    part_sets = []
    for q in parts:
        R1, R2 = H1.reduce(q), H2.reduce(q)
        if R1.order != R2.order or _fingerprint(R1) != _fingerprint(R2):
            return None
        s = _conjugator_codes_prime_power(R1, R2, cap)
        if s.size == 0:
            return None
        part_sets.append(s)
    cand = part_sets[0]
    m = parts[0]
    for q, s in zip(parts[1:], part_sets[1:]):
        if cand.size * s.size > cap:
            raise CapExceeded("conjugator search space too large", count=int(cand.size * s.size))
        cand = _crt_codes(cand, m, s, q)
        m *= q
    h2 = H2.codes
    for g in _gens_or_span(H1):
        ge = g.entries
        conj = _mul_pairwise(_mul_by_const(cand, ge, n), _inv_codes(cand, n), n)
        cand = cand[_member(h2, conj)]
        if cand.size == 0:
            return None
    return mat.decode(int(cand[0]), n)


# --- low-index subgroups --------------------------------------------------


def _square_closure(H, cap):
    """K0 = <x^2 : x in H>: normal, with elementary abelian 2-group quotient."""
    n = H.modulus
    sq = np.unique(_mul_pairwise(H.codes, H.codes, n))
    gens, closed = _grow_span(sq, n, cap)
    return gens, closed


def _coset_reps(H, sub_sorted, n):
    """BFS coset representatives of a (normal) subgroup given by its codes."""
    reps = [np.int64(mat.encode(mat.identity(n)))]
    queue = [reps[0]]
    gens = [g.entries for g in _gens_or_span(H)]
    while queue:
        r = queue.pop(0)
        for g in gens:
            t = int(_mul_by_const(np.asarray([r]), g, n)[0])
            # which existing coset? t in rep*sub  <=> rep^-1 t in sub
            hit = False
            for rep in reps:
                ri = mat.inv(mat.decode(int(rep), n))
                probe = mat.encode(mat.mul(ri, mat.decode(t, n)))
                if _member_one(sub_sorted, probe):
                    hit = True
                    break
            if not hit:
                reps.append(np.int64(t))
                queue.append(np.int64(t))
    return reps


def subgroups_of_index(H, n_index, cap=DEFAULT_CAP):
    """The complete list of index-2 or index-3 subgroups of H."""
    if n_index == 2:
        return _index2_subgroups(H, cap)
    if n_index == 3:
        return _index3_subgroups(H, cap)
    raise ValueError("only indices 2 and 3 are supported")


def _index2_subgroups(H, cap):
    n = H.modulus
    k0_gens, k0 = _square_closure(H, cap)
    q = H.order // int(k0.size)
    if q == 1:
        return []
    # coset vectors over F2: assign basis coordinates greedily by generators
    id_code = np.int64(mat.encode(mat.identity(n)))
    reps = [id_code]
    vecs = [0]
    dim = 0
    gen_vecs = []

    def coset_vec(code):
        x = mat.decode(int(code), n)
        for rep, v in zip(reps, vecs):
            ri = mat.inv(mat.decode(int(rep), n))
            if _member_one(k0, mat.encode(mat.mul(ri, x))):
                return v
        return None

    for g in _gens_or_span(H):
        gv = coset_vec(mat.encode(g))
        if gv is None:
            bit = 1 << dim
            dim += 1
            cur = list(zip(list(reps), list(vecs)))
            for rep, v in cur:
                newrep = mat.encode(mat.mul(mat.decode(int(rep), n), g))
                reps.append(np.int64(newrep))
                vecs.append(v | bit)
            gv = bit
        gen_vecs.append(gv)
    assert len(reps) == q, "quotient enumeration mismatch: %d cosets vs order ratio %d" % (
        len(reps),
        q,
    )
    out = []
    k0_gen_mats = [Mat2(n, *g) for g in k0_gens]
    # basis reps: vec with exactly one bit set
    basis_rep = {}
    for rep, v in zip(reps, vecs):
        if v and (v & (v - 1)) == 0 and v not in basis_rep:
            basis_rep[v] = rep
    for lam in range(1, 1 << dim):
        sel = [rep for rep, v in zip(reps, vecs) if _parity(v & lam) == 0]
        elems = np.sort(np.concatenate([_lmul_by_const(k0, mat.decode(int(r), n).entries, n) for r in sel]))
        gens = list(k0_gen_mats)
        for v, rep in sorted(basis_rep.items()):
            if _parity(v & lam) == 0:
                gens.append(mat.decode(int(rep), n))
        # add products of pairs of odd-basis reps to generate the full kernel
        odd = [rep for v, rep in sorted(basis_rep.items()) if _parity(v & lam) == 1]
        for i in range(1, len(odd)):
            gens.append(mat.mul(mat.decode(int(odd[0]), n), mat.decode(int(odd[i]), n)))
        out.append(from_codes(n, elems, generators=gens, cap=cap))
    return out


def _parity(x):
    return bin(x).count("1") & 1


def _sixth_power_codes(codes, n):
    sq = _mul_pairwise(codes, codes, n)
    cube = _mul_pairwise(sq, codes, n)
    return np.unique(_mul_pairwise(cube, cube, n))


def _normal_closure(H, seed_sorted, cap):
    """Normal closure in H of the subgroup generated by seed elements."""
    n = H.modulus
    gens, closed = _grow_span(seed_sorted, n, cap)
    hgens = _gens_or_span(H)
    changed = True
    while changed:
        changed = False
        for g in hgens:
            gi = mat.inv(g)
            conj = _mul_by_const(_lmul_by_const(closed, gi.entries, n), g.entries, n)
            fresh = conj[~_member(closed, conj)]
            if fresh.size:
                gens, closed = _grow_span(np.sort(fresh), n, cap, base_gens=gens)
                changed = True
    return gens, closed


def _index3_subgroups(H, cap):
    n = H.modulus
    # verbal subgroup: sixth powers, then normal closure (conjugates of sixth
    # powers are sixth powers, but the grow step can leave stragglers; close anyway)
    seed = _sixth_power_codes(H.codes, n)
    v_gens, v = _normal_closure(H, seed, cap)
    q = H.order // int(v.size)
    if q % 3 != 0:
        return []
    if q > 20000:
        raise CapExceeded("exponent-6 quotient too large: %d" % q)
    reps = _coset_reps(H, v, n)
    assert len(reps) == q
    rep_mats = [mat.decode(int(r), n) for r in reps]
    rep_invs = [mat.inv(r) for r in rep_mats]

    def resolve(x):
        for i, ri in enumerate(rep_invs):
            if _member_one(v, mat.encode(mat.mul(ri, x))):
                return i
        raise RuntimeError("coset resolution failed")

    # a short generating set of Q, grown greedily over the coset reps
    span = {0}
    qgens = []
    for i in range(1, q):
        if i in span:
            continue
        qgens.append(i)
        while True:
            fresh = set()
            for s in span:
                for g in qgens:
                    t = resolve(mat.mul(rep_mats[s], rep_mats[g]))
                    if t not in span and t not in fresh:
                        fresh.add(t)
            if not fresh:
                break
            span |= fresh
        if len(span) == q:
            break
    if 6 ** len(qgens) > 2_000_000:
        raise CapExceeded("too many candidate quotient maps: 6^%d" % len(qgens))
    # Cayley action of each quotient generator on cosets
    gen_action = []
    for g in qgens:
        act = [resolve(mat.mul(rm, rep_mats[g])) for rm in rep_mats]
        gen_action.append(act)

    s3 = _symmetric3()
    out_codes = set()
    out = []
    for assignment in _cartesian(len(qgens), len(s3)):
        # propagate labels: label of coset 0 (Id) is identity perm
        labels = [None] * q
        labels[0] = 0
        stack = [0]
        ok = True
        while stack and ok:
            i = stack.pop()
            for gj, act in enumerate(gen_action):
                j = act[i]
                lab = _s3_mul(labels[i], assignment[gj], s3)
                if labels[j] is None:
                    labels[j] = lab
                    stack.append(j)
                elif labels[j] != lab:
                    ok = False
                    break
        if not ok or any(l is None for l in labels):
            continue
        img = sorted(set(labels))
        if not _s3_transitive(img, s3):
            continue
        for point in range(3):
            kept = [i for i in range(q) if s3[labels[i]][point] == point]
            if 3 * len(kept) != q:
                continue
            elems = np.sort(
                np.concatenate([_lmul_by_const(v, rep_mats[i].entries, n) for i in kept])
            )
            key = elems.tobytes()
            if key in out_codes:
                continue
            out_codes.add(key)
            out.append(from_codes(n, elems, cap=cap))
    return out


def _symmetric3():
    # permutations of (0,1,2) as tuples, identity first
    return [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


def _s3_mul(i, j, s3):
    a, b = s3[i], s3[j]
    comp = tuple(b[a[k]] for k in range(3))  # apply a, then b
    return s3.index(comp)


def _s3_transitive(img_indices, s3):
    reach = {0}
    frontier = [0]
    while frontier:
        p = frontier.pop()
        for i in img_indices:
            t = s3[i][p]
            if t not in reach:
                reach.add(t)
                frontier.append(t)
    return reach == {0, 1, 2}


def _cartesian(k, base):
    idx = [0] * k
    while True:
        yield tuple(idx)
        i = k - 1
        while i >= 0:
            idx[i] += 1
            if idx[i] < base:
                break
            idx[i] = 0
            i -= 1
        if i < 0:
            return


# --- quadratic twists -----------------------------------------------------


def quadratic_twists(H, cap=DEFAULT_CAP):
    """All K <= <H, -Id> with <K, -Id> = <H, -Id>."""
    n = H.modulus
    if n < 3:
        raise PreconditionViolated("quadratic twists need modulus >= 3")
    mid = mat.minus_identity(n)
    if contains_minus_id(H):
        G = H
    else:
        neg = _lmul_by_const(H.codes, mid.entries, n)
        G = from_codes(
            n,
            np.union1d(H.codes, neg),
            generators=list(H.generators) + [mid],
            cap=cap,
        )
    out = [G]
    for K in _index2_subgroups(G, cap):
        # the trivial group is a degenerate "twist" of <-Id> itself; skip it
        if mid not in K and K.order > 1:
            out.append(K)
    return out
