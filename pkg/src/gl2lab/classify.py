"""The curiosity classifier: candidate enumeration and the decision ladder.

A candidate is a registry group (single-prime case) or a direct product of
two registry groups at coprime prime-power levels.  Its verdict is decided
by a fixed ladder:

    not admissible        -> NOT_APPLICABLE
    genus >= 2            -> NOT_CURIOUS_GENUS_GE_2   (finitely many points)
    genus 0               -> NOT_CURIOUS_GENUS_0      (every fiber hit)
    recorded finiteness / rank-0 curve
                          -> NOT_CURIOUS_RANK_0
    recorded witness curve-> NOT_CURIOUS_WITNESS_CURVE
    curious attestation   -> CURIOUS
    no admissible subgroup of genus <= 1 at index 2 or 3
                          -> NOT_CURIOUS_PIGEONHOLE
    otherwise             -> UNKNOWN_NEEDS_DATA

The attestation arms sit above the pigeonhole scan on purpose: the scan only
inspects index 2 and 3, which suffices for the groups it is asked to decide
but says nothing about deeper lattices, so a recorded deeper analysis must
win over a shallow "no subgroups found".  Everything the ladder consumes
beyond group theory (ranks, witnesses, the curious attestations themselves)
is registry data; the computable parts are re-verified elsewhere
(label_check at load, verify_isogeny_facts for the isogeny arithmetic).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import MissingCurveData, PreconditionViolated, UnknownPrime
from .invariants import CurveInvariants, invariants, is_admissible, parse_label
from .rational import RationalPoint, mw_decompose, torsion_subgroup, two_isogeny, minimal_scaling_match
from .registry import Registries
from .subgroups import (DEFAULT_CAP, _fingerprint, are_conjugate,
                        subgroups_of_index)

SUPPORTED_PRIMES = (2, 3, 5, 7, 11, 13)

NOT_APPLICABLE = "NOT_APPLICABLE"
NOT_CURIOUS_GENUS_GE_2 = "NOT_CURIOUS_GENUS_GE_2"
NOT_CURIOUS_GENUS_0 = "NOT_CURIOUS_GENUS_0"
NOT_CURIOUS_RANK_0 = "NOT_CURIOUS_RANK_0"
NOT_CURIOUS_PIGEONHOLE = "NOT_CURIOUS_PIGEONHOLE"
NOT_CURIOUS_WITNESS_CURVE = "NOT_CURIOUS_WITNESS_CURVE"
CURIOUS = "CURIOUS"
UNKNOWN_NEEDS_DATA = "UNKNOWN_NEEDS_DATA"


@dataclass
class CuriosityVerdict:
    label: str                          # display label (official or LxR key)
    generators: tuple
    invariants: Optional[CurveInvariants]
    status: str
    evidence: str
    curious_label: str = ""             # label the verdict counts for

    def line(self):
        return "%s %s %s" % (self.label, self.status, self.evidence)


def _display_keys(H, regs):
    """(display label, fact-lookup keys) for a candidate group.

    A labeled group is looked up by its label.  A product built by
    product_group carries its factor labels; the official product label is
    used when the registry records one, with the raw LxR key kept as a
    fallback so facts can be recorded against either spelling.
    """
    if H.label:
        return H.label, (H.label,)
    prov = getattr(H, "provenance", None)
    if prov and prov[0] == "product":
        key = "%sx%s" % (prov[1], prov[2])
        official = regs.facts.prodlabel.get((prov[1], prov[2]))
        if official:
            return official, (official, key)
        return key, (key,)
    return "<unlabeled mod %d>" % H.modulus, ()


def shallow_barren(H, cap=DEFAULT_CAP):
    """True when H has no admissible subgroup of genus <= 1 at index 2 or 3."""
    for k in (2, 3):
        for S in subgroups_of_index(H, k, cap=cap):
            if invariants(S).genus <= 1 and is_admissible(S):
                return False
    return True


def curiosity_status(H, regs: Registries, cap=DEFAULT_CAP, _via_link=False):
    """Run the decision ladder on one group."""
    display, keys = _display_keys(H, regs)
    gens = tuple(tuple(g.entries) for g in (H.generators or ()))

    def verdict(status, evidence, curious_as=""):
        return CuriosityVerdict(display, gens, inv, status, evidence,
                                curious_label=curious_as or (display if status == CURIOUS else ""))

    if not is_admissible(H):
        inv = None
        return verdict(NOT_APPLICABLE, "not arithmetically admissible")
    inv = invariants(H)

    if inv.genus >= 2:
        return verdict(NOT_CURIOUS_GENUS_GE_2,
                       "genus %d: finitely many rational points" % inv.genus)
    if inv.genus == 0:
        return verdict(NOT_CURIOUS_GENUS_0,
                       "genus 0: realized by infinitely many curves")

    facts = regs.facts
    missing_curve = None

    for key in keys:
        if key in facts.finite:
            return verdict(NOT_CURIOUS_RANK_0, "recorded: " + facts.finite[key])
        if key in facts.noq2:
            return verdict(NOT_CURIOUS_RANK_0,
                           "recorded: covering curve has no Q2-points")

    rank = None
    for key in keys:
        if key in facts.atlas:
            try:
                row = regs.curve_for(key)
            except MissingCurveData as e:
                missing_curve = e
                continue
            rank = row.rank
            if rank == 0:
                return verdict(NOT_CURIOUS_RANK_0,
                               "curve %s has rank 0" % facts.atlas[key])
            break

    for key in keys:
        w = facts.witness_for(key)
        if w is not None:
            return verdict(NOT_CURIOUS_WITNESS_CURVE,
                           "curve %s has mod-%d image %s"
                           % (w.curve_label, w.modulus, key))

    for key in keys:
        if key in facts.curious:
            if rank is not None and rank < 1:
                break  # attestation contradicts a recorded rank: fall through
            return verdict(CURIOUS, "attested: " + facts.curious[key])
        if key in facts.link and not _via_link:
            # the recorded correspondence transfers the linked group's verdict;
            # a CURIOUS outcome still counts for this group under its own name
            target = facts.link[key]
            sub = curiosity_status(regs.group(target, cap=cap), regs,
                                   cap=cap, _via_link=True)
            return verdict(sub.status,
                           "shares the verdict of %s: %s" % (target, sub.evidence))

    if shallow_barren(H, cap=cap):
        return verdict(NOT_CURIOUS_PIGEONHOLE,
                       "no admissible subgroup of genus <= 1 at index 2 or 3")

    if missing_curve is not None:
        raise missing_curve
    return verdict(UNKNOWN_NEEDS_DATA, "no applicable rule or recorded fact")


# --------------------------------------------------------------------------
# candidates


def _label_sort_key(display, inv):
    try:
        n, i, g, o = parse_label(display)
        return (n, i, g, o, display)
    except ValueError:
        if inv is not None:
            return (inv.level, inv.index, inv.genus, 0, display)
        return (0, 0, 0, 0, display)


def _dedup_conjugacy(groups):
    """Drop conjugate duplicates, keeping first occurrences (stable)."""
    kept = []
    fps = []
    for H in groups:
        fp = (H.modulus,) + _fingerprint(H)
        dup = False
        for K, kfp in zip(kept, fps):
            if kfp == fp and are_conjugate(K, H):
                dup = True
                break
        if not dup:
            kept.append(H)
            fps.append(fp)
    return kept


def enumerate_candidates(primes, regs: Registries, cap=DEFAULT_CAP):
    """All candidate groups for one or two primes, deduplicated.

    Single prime: the registry's recorded single-prime list.  Two primes:
    every pairwise product of the registry's prime-power-level lists.
    """
    primes = tuple(sorted(set(int(p) for p in primes)))
    for p in primes:
        if p not in SUPPORTED_PRIMES:
            raise UnknownPrime("prime %d is not in the classification range" % p)
    if not 1 <= len(primes) <= 2:
        raise PreconditionViolated("enumerate_candidates takes one or two primes")

    if len(primes) == 1:
        labels = regs.facts.m1.get(primes[0], [])
        groups = [regs.group(lab, cap=cap) for lab in labels]
    else:
        p, q = primes
        groups = [regs.product(l, r, cap=cap)
                  for l in regs.facts.szlist.get(p, [])
                  for r in regs.facts.szlist.get(q, [])]
    groups = _dedup_conjugacy(groups)
    return sorted(groups, key=lambda H: _label_sort_key(*_augment(H, regs)))


def _augment(H, regs):
    display, _ = _display_keys(H, regs)
    return display, invariants(H)


# --------------------------------------------------------------------------
# reports


@dataclass
class ClassifyReport:
    primes: tuple
    verdicts: list
    curious: list               # sorted unique labels with a CURIOUS verdict

    def lines(self):
        out = ["# classify primes=%s candidates=%d"
               % (",".join(str(p) for p in self.primes), len(self.verdicts))]
        out.extend(v.line() for v in self.verdicts)
        out.append("curious: %s" % (" ".join(self.curious) if self.curious else "(none)"))
        return out


def classify(primes, regs: Registries, cap=DEFAULT_CAP, jobs=1):
    """Verdicts for every candidate of the given primes, label-ordered."""
    primes = tuple(sorted(set(int(p) for p in primes)))
    for p in primes:
        if p not in SUPPORTED_PRIMES:
            raise UnknownPrime("prime %d is not in the classification range" % p)

    if len(primes) >= 3:
        return _classify_multi(primes, regs)

    cands = enumerate_candidates(primes, regs, cap=cap)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(
                lambda H: curiosity_status(H, regs, cap=cap), cands))
    else:
        verdicts = [curiosity_status(H, regs, cap=cap) for H in cands]
    order = {id(v): _label_sort_key(v.label, v.invariants) for v in verdicts}
    verdicts.sort(key=lambda v: order[id(v)])
    curious = sorted({v.curious_label for v in verdicts if v.status == CURIOUS})
    return ClassifyReport(primes, verdicts, curious)


def _classify_multi(primes, regs):
    """Three or more primes: eliminated wholesale on genus grounds.

    Every product of three or more of the listed groups has genus >= 2, so
    the report records the elimination per candidate key without
    materializing the (large) groups.
    """
    keys = [[]]
    for p in primes:
        keys = [k + [lab] for k in keys for lab in regs.facts.szlist.get(p, [])]
    verdicts = [CuriosityVerdict(
        label="x".join(k), generators=(), invariants=None,
        status=NOT_CURIOUS_GENUS_GE_2,
        evidence="every %d-fold product has genus >= 2" % len(primes))
        for k in keys]
    verdicts.sort(key=lambda v: v.label)
    return ClassifyReport(primes, verdicts, [])


# --------------------------------------------------------------------------
# recorded-isogeny verification


@dataclass
class IsogenyCheck:
    fact: object
    passed: bool
    detail: str

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return "%s -> %s %s %s" % (self.fact.src, self.fact.dst, status, self.detail)


def verify_isogeny_facts(regs: Registries):
    """Re-derive every recorded isogeny point-image exactly.

    For each fact: build the degree-2 isogeny from the recorded kernel,
    match its codomain onto the target registry model by exact scaling,
    push the recorded point through, and compare with the recorded multiple
    of the target generator — both directly and through mw_decompose.
    Failures are collected per fact; the batch always completes.
    """
    out = []
    for fact in regs.facts.isogenies:
        try:
            out.append(_check_one_isogeny(fact, regs))
        except Exception as e:  # noqa: BLE001 - a fact must never abort the batch
            out.append(IsogenyCheck(fact, False, "error: %s" % e))
    return out


def _check_one_isogeny(fact, regs):
    if fact.degree != 2:
        return IsogenyCheck(fact, False, "only degree-2 facts are checkable")
    src = regs.curves[fact.src]
    dst = regs.curves[fact.dst]
    sf = src.curve.short_model()
    K = RationalPoint.of(*fact.kernel)
    if not src.curve.on_curve(K):
        return IsogenyCheck(fact, False, "kernel not on %s" % fact.src)
    phi = two_isogeny(sf.curve, sf.to_short(K))

    tf = dst.curve.short_model()
    match = minimal_scaling_match(phi.codomain, tf.curve)
    if match is None:
        return IsogenyCheck(fact, False, "codomain is not a scaling of %s" % fact.dst)
    u, _ = match

    P = RationalPoint.of(*fact.point)
    if not src.curve.on_curve(P):
        return IsogenyCheck(fact, False, "point not on %s" % fact.src)
    img = phi(sf.to_short(P))
    img = RationalPoint(img.x / (u * u), img.y / (u ** 3))
    img = tf.from_short(img)

    Q = RationalPoint.of(*fact.image_gen)
    expected = dst.curve.scalar_mul(fact.multiple, Q)
    if (img.x, img.y) != (expected.x, expected.y):
        return IsogenyCheck(
            fact, False, "image %s != %d * %s" % (img, fact.multiple, Q))

    tors = torsion_subgroup(dst.curve)
    decomp = mw_decompose(dst.curve, img, Q, tors.generators, bound=4)
    if decomp[0] != fact.multiple or any(decomp[1:]):
        return IsogenyCheck(fact, False,
                            "decomposition %s disagrees with recorded multiple %d"
                            % (decomp, fact.multiple))
    return IsogenyCheck(fact, True,
                        "phi(%s) = %d*g1 exactly" % (fact.point, fact.multiple))
