"""Modular-curve invariants of a subgroup H <= GL(2, Z/NZ).

The genus of X_H comes from the permutation action of SL2 standard
generators on the right cosets of +-(H n SL2) inside SL(2, Z/NZ); the index
is the GL2 index (equal to the SL2 coset count when det(H) is everything).
An independent closed-form oracle for the X_0(N) series guards the whole
pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import matrices as mat
from . import subgroups as sg
from .errors import IntegralityFailure, PreconditionViolated
from .ntheory import (
    divisors,
    euler_phi,
    factorize,
    gl2_order,
    kronecker_minus_one,
    kronecker_minus_three,
    sl2_order,
)

# the standard SL2(Z) images: S order 4, R = S*T order 3, T the cusp shear
_S = (0, -1, 1, 0)
_R = (0, -1, 1, -1)
_T = (1, 1, 0, 1)


@dataclass(frozen=True)
class CurveInvariants:
    level: int
    index: int
    genus: int
    admissible: bool
    nu2: int
    nu3: int
    cusps: int


def is_admissible(H) -> bool:
    return (
        sg.contains_minus_id(H)
        and sg.det_image_is_full(H)
        and sg.has_complex_conjugation(H)
    )


def _sl2_part_codes(H):
    det = sg._det_codes(H.codes, H.modulus)
    return H.codes[det == 1 % H.modulus]


def coset_action(H):
    """Permutations of S, R, T on the right cosets of (H n SL2) in SL2.

    Returns (perm_S, perm_R, perm_T) as integer arrays over d coset indices.
    Requires -Id in H and full determinant image (so that the SL2 coset
    count equals the GL2 index).
    """
    if not sg.contains_minus_id(H):
        raise PreconditionViolated("-Id not in H")
    if not sg.det_image_is_full(H):
        raise PreconditionViolated("det image of H is not all units")
    return _coset_action_cached(H.modulus, _sl2_part_codes(H).tobytes())


@lru_cache(maxsize=512)
def _coset_action_cached(n, j_bytes):
    J = np.frombuffer(j_bytes, dtype=np.int64)
    d = sl2_order(n) // J.size
    # BFS over cosets; canonical key of coset J*x is min(codes of J*x)
    gens = (_S, _R, _T)
    x0 = mat.identity(n)
    key0 = int(J.min())
    keys = {key0: 0}
    reps = [x0.entries]
    perms = [[], [], []]
    frontier = [0]
    while frontier:
        nxt = []
        for ci in frontier:
            rep = reps[ci]
            for gi, g in enumerate(gens):
                prod = _entry_mul(rep, g, n)
                coset = sg._mul_by_const(J, prod, n)
                key = int(coset.min())
                if key not in keys:
                    keys[key] = len(reps)
                    reps.append(prod)
                    nxt.append(keys[key])
                while len(perms[gi]) <= ci:
                    perms[gi].append(-1)
                perms[gi][ci] = keys[key]
        frontier = nxt
    assert len(reps) == d, "coset count %d != expected %d" % (len(reps), d)
    out = []
    for gi in range(3):
        arr = np.asarray(perms[gi], dtype=np.int64)
        assert arr.size == d and (arr >= 0).all()
        out.append(arr)
    return tuple(out)


def _entry_mul(x, y, n):
    xa, xb, xc, xd = x
    ya, yb, yc, yd = y
    return (
        (xa * ya + xb * yc) % n,
        (xa * yb + xb * yd) % n,
        (xc * ya + xd * yc) % n,
        (xc * yb + xd * yd) % n,
    )


def _cycle_count(perm):
    seen = np.zeros(perm.size, dtype=bool)
    cycles = 0
    for i in range(perm.size):
        if seen[i]:
            continue
        cycles += 1
        j = i
        while not seen[j]:
            seen[j] = True
            j = int(perm[j])
    return cycles


def genus_data(H):
    """(index d, nu2, nu3, cusp count, genus) for X_H."""
    pS, pR, pT = coset_action(H)
    d = int(pS.size)
    e2 = int((pS == np.arange(d)).sum())
    e3 = int((pR == np.arange(d)).sum())
    c = _cycle_count(pT)
    twelve_g = 12 + d - 3 * e2 - 4 * e3 - 6 * c
    if twelve_g % 12 != 0 or twelve_g < 0:
        raise IntegralityFailure(
            "12g = %d from d=%d e2=%d e3=%d c=%d" % (twelve_g, d, e2, e3, c)
        )
    return d, e2, e3, c, twelve_g // 12


def genus(H) -> int:
    return genus_data(H)[4]


def invariants(H) -> CurveInvariants:
    d, e2, e3, c, g = genus_data(H)
    return CurveInvariants(
        level=sg.level(H),
        index=d,
        genus=g,
        admissible=is_admissible(H),
        nu2=e2,
        nu3=e3,
        cusps=c,
    )


def x0_genus_oracle(n: int) -> int:
    """Genus of X_0(N) by the classical closed forms (independent of the
    coset machinery: index, elliptic point counts and cusp count are all
    multiplicative formulas over the factorization)."""
    if n < 1:
        raise ValueError("need N >= 1")
    if n == 1:
        return 0
    fac = factorize(n)
    mu = n
    for p in fac:
        mu = mu // p * (p + 1)
    if n % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p in fac:
            if p == 2:
                continue
            nu2 *= 1 + kronecker_minus_one(p)
    if n % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p in fac:
            if p == 3:
                continue
            nu3 *= 1 + kronecker_minus_three(p)
    cusps = 0
    for d in divisors(n):
        import math

        cusps += euler_phi(math.gcd(d, n // d))
    twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps
    assert twelve_g % 12 == 0
    return twelve_g // 12


@dataclass
class LabelReport:
    label: str
    expected: tuple
    computed: tuple
    passed: bool

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return "%s computed=%d.%d.%d status=%s" % (self.label, *self.computed, status)


def parse_label(label: str):
    """Split 'N.i.g.n' into (level, index, genus, ordinal)."""
    parts = label.split(".")
    if len(parts) != 4:
        raise ValueError("label %r is not of the form N.i.g.n" % label)
    return tuple(int(p) for p in parts)


def label_check(H, label=None) -> LabelReport:
    """Verify the N.i.g fields of a labeled subgroup against computation."""
    label = label or H.label
    lv, ix, gn, _ = parse_label(label)
    try:
        inv = invariants(H)
        computed = (inv.level, inv.index, inv.genus)
        ok = computed == (lv, ix, gn)
    except Exception:  # surfaced as failure, never a crash
        computed = (-1, -1, -1)
        ok = False
    return LabelReport(label=label, expected=(lv, ix, gn), computed=computed, passed=ok)
