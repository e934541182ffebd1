"""The `gl2` command-line surface.

Exit codes: 0 success, 1 verification failure (including registry
validation), 2 usage or registry-parse error.  All output is plain text
with deterministic ordering.

Quick inspection commands (genus, index, level, admissible, product,
subgroups, twists, conjugate) load the registries without the full
validation pass; the verification commands (classify, check-labels,
verify-isogenies) are the validation pass, or require it.
"""
from __future__ import annotations

import argparse
import sys

from .classify import classify, verify_isogeny_facts
from .errors import Gl2Error, ParseError, ValidationError
from .invariants import invariants, is_admissible, label_check
from .registry import load_registries
from .subgroups import (DEFAULT_CAP, are_conjugate, preimage,
                        quadratic_twists, subgroups_of_index)


def _add_common(sub):
    sub.add_argument("--groups", metavar="FILE", default=None,
                     help="group registry file (default: packaged)")
    sub.add_argument("--curves", metavar="FILE", default=None,
                     help="curve registry file (default: packaged)")
    sub.add_argument("--witnesses", metavar="FILE", default=None,
                     help="witness/fact registry file (default: packaged)")
    sub.add_argument("--cap", metavar="N", type=int, default=DEFAULT_CAP,
                     help="element cap for group closures")
    sub.add_argument("--jobs", metavar="K", type=int, default=1,
                     help="parallel workers for classify")


def _load(args, validate):
    return load_registries(group_file=args.groups, curve_file=args.curves,
                           witness_file=args.witnesses, cap=args.cap,
                           validate=validate)


def _gens_str(H):
    return ";".join("[%d,%d,%d,%d]" % tuple(g.entries) for g in H.generators)


def _invariant_line(H):
    inv = invariants(H)
    return "genus=%d index=%d level=%d" % (inv.genus, inv.index, inv.level)


def cmd_genus(args):
    H = _load(args, validate=False).group(args.label, cap=args.cap)
    print(_invariant_line(H))
    return 0


def cmd_index(args):
    H = _load(args, validate=False).group(args.label, cap=args.cap)
    print("index=%d" % invariants(H).index)
    return 0


def cmd_level(args):
    H = _load(args, validate=False).group(args.label, cap=args.cap)
    print("level=%d" % invariants(H).level)
    return 0


def cmd_admissible(args):
    H = _load(args, validate=False).group(args.label, cap=args.cap)
    print("admissible=%s" % ("true" if is_admissible(H) else "false"))
    return 0


def cmd_product(args):
    regs = _load(args, validate=False)
    P = regs.product(args.left, args.right, cap=args.cap)
    print("label=%s modulus=%d order=%d"
          % (regs.display_label(args.left, args.right), P.modulus, P.order))
    print(_invariant_line(P))
    print("gens=%s" % _gens_str(P))
    return 0


def cmd_subgroups(args):
    regs = _load(args, validate=False)
    H = regs.group(args.label, cap=args.cap)
    rows = []
    for S in subgroups_of_index(H, args.index, cap=args.cap):
        inv = invariants(S)
        adm = is_admissible(S)
        if args.admissible and not adm:
            continue
        if args.max_genus is not None and inv.genus > args.max_genus:
            continue
        rows.append((inv, adm, S))
    rows.sort(key=lambda r: (r[0].level, r[0].genus, _gens_str(r[2])))
    print("subgroups of %s at index %d: %d" % (args.label, args.index, len(rows)))
    for i, (inv, adm, S) in enumerate(rows):
        print("subgroup[%d] genus=%d index=%d level=%d admissible=%s"
              % (i, inv.genus, inv.index, inv.level, "true" if adm else "false"))
        print("  gens=%s" % _gens_str(S))
    return 0


def cmd_twists(args):
    regs = _load(args, validate=False)
    H = regs.group(args.label, cap=args.cap)
    rows = []
    for K in quadratic_twists(H, cap=args.cap):
        inv = invariants(K)
        rows.append((inv, K))
    rows.sort(key=lambda r: (r[0].index, r[0].level, r[0].genus, _gens_str(r[1])))
    print("twist family of %s: %d groups" % (args.label, len(rows)))
    for i, (inv, K) in enumerate(rows):
        print("twist[%d] genus=%d index=%d level=%d order=%d"
              % (i, inv.genus, inv.index, inv.level, K.order))
        print("  gens=%s" % _gens_str(K))
    return 0


def cmd_conjugate(args):
    regs = _load(args, validate=False)
    A = regs.group(args.a, cap=args.cap)
    B = regs.group(args.b, cap=args.cap)
    if A.modulus != B.modulus:
        # compare the open subgroups they define: lift both to the lcm
        from math import lcm
        m = lcm(A.modulus, B.modulus)
        A = preimage(A, m, cap=args.cap)
        B = preimage(B, m, cap=args.cap)
    same = A.order == B.order and are_conjugate(A, B)
    print("conjugate=%s" % ("true" if same else "false"))
    return 0


def cmd_classify(args):
    regs = _load(args, validate=True)
    primes = tuple(int(p) for p in args.primes.split(","))
    report = classify(primes, regs, cap=args.cap, jobs=args.jobs)
    for line in report.lines():
        print(line)
    return 0


def cmd_check_labels(args):
    regs = _load(args, validate=False)
    failed = False
    for label, rec in regs.groups.items():
        try:
            rep = label_check(rec.group(cap=args.cap), label)
        except Gl2Error as e:
            print("%s ERROR %s" % (label, e))
            failed = True
            continue
        print(rep.line())
        failed = failed or not rep.passed
    return 1 if failed else 0


def cmd_verify_isogenies(args):
    regs = _load(args, validate=True)
    checks = verify_isogeny_facts(regs)
    for c in checks:
        print(c.line())
    return 1 if any(not c.passed for c in checks) else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gl2",
        description="open subgroups of GL(2,Zhat), their modular-curve "
                    "invariants, and the curiosity classification")
    subs = parser.add_subparsers(dest="command", required=True)

    def sub(name, func, help_):
        s = subs.add_parser(name, help=help_)
        s.set_defaults(func=func)
        _add_common(s)
        return s

    for name, func, help_ in (
            ("genus", cmd_genus, "genus/index/level of a registry group"),
            ("index", cmd_index, "index of a registry group"),
            ("level", cmd_level, "level of a registry group"),
            ("admissible", cmd_admissible, "arithmetic admissibility test")):
        sub(name, func, help_).add_argument("--label", required=True)

    s = sub("product", cmd_product, "direct product of two registry groups")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)

    s = sub("subgroups", cmd_subgroups, "index-2/3 subgroups of a registry group")
    s.add_argument("--label", required=True)
    s.add_argument("--index", type=int, choices=(2, 3), required=True)
    s.add_argument("--admissible", action="store_true",
                   help="keep only arithmetically admissible subgroups")
    s.add_argument("--max-genus", type=int, default=None, metavar="G")

    s = sub("twists", cmd_twists, "quadratic twist family of a registry group")
    s.add_argument("--label", required=True)

    s = sub("conjugate", cmd_conjugate, "conjugacy test for two registry groups")
    s.add_argument("--a", required=True, metavar="L1")
    s.add_argument("--b", required=True, metavar="L2")

    s = sub("classify", cmd_classify, "curiosity verdicts for prime type(s)")
    s.add_argument("--primes", required=True, metavar="p[,q]")

    sub("check-labels", cmd_check_labels, "recompute every registry label")
    sub("verify-isogenies", cmd_verify_isogenies, "re-derive recorded isogeny facts")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print("parse error: %s" % e, file=sys.stderr)
        return 2
    except ValidationError as e:
        print(str(e), file=sys.stderr)
        for f in e.failures:
            print("  " + f, file=sys.stderr)
        return 1
    except KeyError as e:
        print("error: %s" % (e.args[0] if e.args else e), file=sys.stderr)
        return 2
    except Gl2Error as e:
        print("error: %s" % e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
