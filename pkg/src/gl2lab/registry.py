"""Registry files: labeled subgroups, elliptic curves, and recorded facts.

Three UTF-8 text files ship with the package (``gl2lab/data/``):

* ``groups.txt`` — one subgroup per line, ``<label> <modulus> <gen>;<gen>;...``
  with each generator written ``[a,b,c,d]``.
* ``curves.txt`` — one curve per line,
  ``<label> [a1,a2,a3,a4,a6] rank=<r> torsion=<t1[,t2]> gens=(x,y);...``.
* ``witnesses.txt`` — recorded facts, one per line, keyed by a leading word
  (``witness``, ``curious``, ``finite``, ``prodlabel``, ``szlist``, ...).

Loading validates everything it can: labels against computed invariants,
generator points against curve equations, torsion structures against Mazur's
theorem, and witness references against the group registry.  Validation
failures are collected and raised together as a single ValidationError.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional, Sequence

from .errors import (MissingCurveData, ParseError, PointNotOnCurve,
                     ValidationError)
from .invariants import label_check, parse_label
from .matrices import Mat2
from .rational import EllipticCurve, RationalPoint, mazur_validate
from .subgroups import DEFAULT_CAP, closure, product_group

_GEN_RE = re.compile(r"\[(-?\d+),(-?\d+),(-?\d+),(-?\d+)\]")
_POINT_RE = re.compile(r"\((-?\d+(?:/\d+)?),(-?\d+(?:/\d+)?)\)")


def _default(name):
    return resources.files("gl2lab").joinpath("data", name)


# --------------------------------------------------------------------------
# records


@dataclass
class GroupRecord:
    """A labeled subgroup of GL(2, Z/modulus), stored by generators."""

    label: str
    modulus: int
    generators: tuple
    _group: object = field(default=None, repr=False, compare=False)

    def group(self, cap=DEFAULT_CAP):
        """The materialized subgroup (cached after the first call)."""
        if self._group is None:
            mats = [Mat2(self.modulus, *g) for g in self.generators]
            self._group = closure(mats, cap=cap, label=self.label)
        return self._group


@dataclass
class CurveRecord:
    """An elliptic curve over Q with its recorded Mordell-Weil data.

    ``rank`` and ``torsion`` are transcribed inputs, never recomputed; the
    generator points are checked to lie on the model at load time.
    """

    label: str
    curve: EllipticCurve
    rank: int
    torsion: tuple
    gens: tuple


@dataclass(frozen=True)
class KnownImageWitness:
    """An elliptic curve whose mod-N image is (conjugate to) a named group."""

    curve_label: str
    modulus: int
    group_label: str


@dataclass(frozen=True)
class IsogenyFact:
    """A recorded degree-2 isogeny with its effect on a named point."""

    src: str
    dst: str
    degree: int
    kernel: tuple            # (x, y) on the src registry model
    point: tuple             # (x, y) on src: the point pushed through
    multiple: int            # expected k with phi(point) = k * image_gen
    image_gen: tuple         # (x, y) on the dst registry model


@dataclass
class Facts:
    """Everything recorded in witnesses.txt, grouped by kind."""

    szlist: dict = field(default_factory=dict)     # p -> [labels]
    m1: dict = field(default_factory=dict)         # p -> [labels]
    prodlabel: dict = field(default_factory=dict)  # (left, right) -> label
    curious: dict = field(default_factory=dict)    # label -> evidence text
    witnesses: list = field(default_factory=list)  # [KnownImageWitness]
    atlas: dict = field(default_factory=dict)      # label -> curve label
    finite: dict = field(default_factory=dict)     # label/key -> evidence text
    link: dict = field(default_factory=dict)       # key -> label
    noq2: set = field(default_factory=set)         # labels
    isogenies: list = field(default_factory=list)  # [IsogenyFact]

    def witness_for(self, label):
        for w in self.witnesses:
            if w.group_label == label:
                return w
        return None


@dataclass
class Registries:
    groups: dict
    curves: dict
    facts: Facts

    def group(self, label, cap=DEFAULT_CAP):
        """Materialize a registry group by label."""
        try:
            rec = self.groups[label]
        except KeyError:
            raise KeyError("no group %r in the registry" % label) from None
        return rec.group(cap=cap)

    def product(self, left, right, cap=DEFAULT_CAP):
        """The direct product of two registry groups, CRT-combined."""
        return product_group(self.group(left, cap), self.group(right, cap), cap=cap)

    def display_label(self, left, right):
        """The official label of a product when one is recorded, else LxR."""
        return self.facts.prodlabel.get((left, right), "%sx%s" % (left, right))

    def curve_for(self, group_label):
        """The curve registry row behind a group's recorded covering curve.

        Raises MissingCurveData when the group has an atlas entry whose curve
        is not in the curve registry; returns None when there is no atlas
        entry at all.
        """
        curve_label = self.facts.atlas.get(group_label)
        if curve_label is None:
            return None
        try:
            return self.curves[curve_label]
        except KeyError:
            raise MissingCurveData(
                "group %s records curve %s which is not in the curve registry"
                % (group_label, curve_label)) from None


# --------------------------------------------------------------------------
# parsing


def _lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield no, line


def parse_groups(path):
    """Parse a group registry file into an ordered {label: GroupRecord}."""
    out = {}
    for no, line in _lines(path):
        parts = line.split()
        if len(parts) != 3:
            raise ParseError("expected '<label> <modulus> <gens>', got %r" % line, no)
        label, mod_s, gens_s = parts
        try:
            parse_label(label)
        except ValueError as e:
            raise ParseError(str(e), no)
        if label in out:
            raise ParseError("duplicate label %s" % label, no)
        try:
            modulus = int(mod_s)
        except ValueError:
            raise ParseError("bad modulus %r" % mod_s, no)
        if modulus < 2:
            raise ParseError("modulus must be at least 2", no)
        gens = []
        for chunk in gens_s.split(";"):
            m = _GEN_RE.fullmatch(chunk)
            if not m:
                raise ParseError("bad generator %r" % chunk, no)
            gens.append(tuple(int(x) % modulus for x in m.groups()))
        if not gens:
            raise ParseError("no generators for %s" % label, no)
        out[label] = GroupRecord(label, modulus, tuple(gens))
    return out


def _parse_point(tok, line_no):
    m = _POINT_RE.fullmatch(tok)
    if not m:
        raise ParseError("bad point %r" % tok, line_no)
    return (Fraction(m.group(1)), Fraction(m.group(2)))


def parse_curves(path):
    """Parse a curve registry file into {label: CurveRecord}."""
    out = {}
    for no, line in _lines(path):
        m = re.fullmatch(
            r"(\S+)\s+\[([-0-9,/]+)\]\s+rank=(\d+)\s+torsion=([0-9,]*)\s+gens=(\S*)",
            line)
        if not m:
            raise ParseError("malformed curve record %r" % line, no)
        label, coeffs_s, rank_s, tors_s, gens_s = m.groups()
        if label in out:
            raise ParseError("duplicate curve %s" % label, no)
        coeffs = [Fraction(c) for c in coeffs_s.split(",")]
        if len(coeffs) != 5:
            raise ParseError("need 5 coefficients, got %d" % len(coeffs), no)
        curve = EllipticCurve.from_coeffs(coeffs)
        torsion = tuple(int(t) for t in tors_s.split(",") if t)
        gens = tuple(RationalPoint.of(*_parse_point(tok, no))
                     for tok in gens_s.split(";") if tok)
        out[label] = CurveRecord(label, curve, int(rank_s), torsion, gens)
    return out


_ISOG_RE = re.compile(
    r"kernel=\((-?\d+(?:/\d+)?),(-?\d+(?:/\d+)?)\)\s+"
    r"maps=\((-?\d+(?:/\d+)?),(-?\d+(?:/\d+)?)\)->(-?\d+)\*"
    r"\((-?\d+(?:/\d+)?),(-?\d+(?:/\d+)?)\)")


def parse_witnesses(path):
    """Parse the recorded-facts file into a Facts bundle."""
    facts = Facts()
    for no, line in _lines(path):
        kind, _, rest = line.partition(" ")
        args = rest.split()
        if kind in ("szlist", "m1"):
            if len(args) < 2:
                raise ParseError("%s needs a prime and at least one label" % kind, no)
            table = facts.szlist if kind == "szlist" else facts.m1
            p = int(args[0])
            if p in table:
                raise ParseError("duplicate %s list for prime %d" % (kind, p), no)
            table[p] = list(args[1:])
        elif kind == "prodlabel":
            if len(args) != 3:
                raise ParseError("prodlabel needs <label> <left> <right>", no)
            key = (args[1], args[2])
            if key in facts.prodlabel:
                raise ParseError("duplicate prodlabel for %s x %s" % key, no)
            facts.prodlabel[key] = args[0]
        elif kind == "curious":
            if len(args) < 2:
                raise ParseError("curious needs <label> <evidence>", no)
            facts.curious[args[0]] = " ".join(args[1:])
        elif kind == "witness":
            if len(args) != 3:
                raise ParseError("witness needs <curve> <modulus> <label>", no)
            facts.witnesses.append(
                KnownImageWitness(args[0], int(args[1]), args[2]))
        elif kind == "atlas":
            if len(args) != 2:
                raise ParseError("atlas needs <label> <curve>", no)
            if args[0] in facts.atlas:
                raise ParseError("duplicate atlas row for %s" % args[0], no)
            facts.atlas[args[0]] = args[1]
        elif kind == "finite":
            if len(args) < 2:
                raise ParseError("finite needs <label> <evidence>", no)
            facts.finite[args[0]] = " ".join(args[1:])
        elif kind == "link":
            if len(args) != 2:
                raise ParseError("link needs <key> <label>", no)
            facts.link[args[0]] = args[1]
        elif kind == "noq2":
            if len(args) != 1:
                raise ParseError("noq2 needs exactly one label", no)
            facts.noq2.add(args[0])
        elif kind == "isogeny":
            m = _ISOG_RE.fullmatch(" ".join(args[3:])) if len(args) >= 4 else None
            if len(args) < 4 or args[2] != "2" or not m:
                raise ParseError("malformed isogeny fact %r" % line, no)
            g = [Fraction(x) for x in m.groups()[:2]]
            px, py, k, qx, qy = m.group(3), m.group(4), m.group(5), m.group(6), m.group(7)
            facts.isogenies.append(IsogenyFact(
                src=args[0], dst=args[1], degree=2,
                kernel=(g[0], g[1]),
                point=(Fraction(px), Fraction(py)),
                multiple=int(k),
                image_gen=(Fraction(qx), Fraction(qy))))
        else:
            raise ParseError("unknown fact kind %r" % kind, no)
    return facts


# --------------------------------------------------------------------------
# validation + loading


def _validate(regs, cap):
    failures = []
    for label, rec in regs.groups.items():
        try:
            report = label_check(rec.group(cap=cap))
        except Exception as e:  # noqa: BLE001 - collected, not swallowed
            failures.append("%s: %s" % (label, e))
            continue
        if not report.passed:
            failures.append("%s: computed %d.%d.%d" % ((label,) + report.computed))

    for label, rec in regs.curves.items():
        for P in rec.gens:
            if not rec.curve.on_curve(P):
                failures.append("%s: generator %s not on curve" % (label, P))
                continue
            # the recorded rank itself is not recomputable here, but a
            # Mordell-Weil generator must at least have infinite order
            if rec.curve.point_order(P) is not None:
                failures.append("%s: generator %s is torsion" % (label, P))
        if len(rec.gens) < rec.rank:
            failures.append("%s: rank %d but only %d generators"
                            % (label, rec.rank, len(rec.gens)))
        if not mazur_validate(rec.torsion):
            failures.append("%s: torsion %s fails Mazur" % (label, rec.torsion))

    facts = regs.facts
    for w in facts.witnesses:
        if w.group_label not in regs.groups:
            failures.append("witness %s: unknown group %s" % (w.curve_label, w.group_label))
    for table in (facts.szlist, facts.m1):
        for p, labels in table.items():
            for lab in labels:
                if lab not in regs.groups:
                    failures.append("list for %d: unknown group %s" % (p, lab))
    for key, label in facts.prodlabel.items():
        if not all(k in regs.groups for k in key):
            failures.append("prodlabel %s: unknown factor" % (label,))
    for f in facts.isogenies:
        for lab in (f.src, f.dst):
            if lab not in regs.curves:
                failures.append("isogeny %s->%s: unknown curve %s" % (f.src, f.dst, lab))

    if failures:
        raise ValidationError(
            "%d registry validation failure(s)" % len(failures), failures)


def load_registries(group_file=None, curve_file=None, witness_file=None,
                    cap=DEFAULT_CAP, validate=True):
    """Load and cross-validate the three registry files.

    With ``validate=True`` (the default) every group is materialized and
    checked against its label, every curve generator against its model, and
    every fact reference against the group registry; failures raise a single
    ValidationError listing them all.  ``validate=False`` parses only — used
    by CLI subcommands that compute directly from a named group and validate
    implicitly by construction.

    Curve labels cited by ``witness`` facts are deliberately not required to
    resolve: the curve registry carries models only for the curves whose
    arithmetic this package re-verifies, while witnesses enter as database
    references.
    """
    regs = Registries(
        groups=parse_groups(group_file or _default("groups.txt")),
        curves=parse_curves(curve_file or _default("curves.txt")),
        facts=parse_witnesses(witness_file or _default("witnesses.txt")),
    )
    if validate:
        _validate(regs, cap)
    return regs
