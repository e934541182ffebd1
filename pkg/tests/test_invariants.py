import pytest

from gl2lab import invariants as inv
from gl2lab import matrices as mat
from gl2lab import subgroups as sg
from gl2lab.errors import PreconditionViolated
from gl2lab.matrices import Mat2


def test_genus_full_group_is_zero():
    for n in range(2, 17):
        assert inv.genus(sg.gl2(n)) == 0, n


def test_x0_oracle_small_values():
    known = {1: 0, 2: 0, 3: 0, 6: 0, 10: 0, 11: 1, 14: 1, 15: 1, 17: 1, 21: 1,
             22: 2, 23: 2, 37: 2, 49: 1, 50: 2}
    for n, g in known.items():
        assert inv.x0_genus_oracle(n) == g, n


def test_borel_genus_matches_oracle_sample():
    for n in (2, 3, 5, 7, 8, 11, 12, 15, 21, 24, 25, 26, 49, 50):
        assert inv.genus(sg.borel(n)) == inv.x0_genus_oracle(n), n


def test_genus_precondition():
    up = sg.closure([Mat2(5, 1, 1, 0, 1)])  # no -Id, det not full
    with pytest.raises(PreconditionViolated):
        inv.genus(up)


def test_genus_conjugation_invariant():
    B = sg.borel(8)
    g0 = inv.genus(B)
    for x in (Mat2(8, 1, 2, 1, 3), Mat2(8, 3, 1, 5, 2), Mat2(8, 0, 1, 7, 0)):
        xi = mat.inv(x)
        conj = sg.closure([mat.mul(mat.mul(x, g), xi) for g in B.generators])
        assert inv.genus(conj) == g0


def test_exact_integer_identity():
    for H in (sg.gl2(4), sg.borel(6), sg.borel(11)):
        d, e2, e3, c, g = inv.genus_data(H)
        assert 12 * (g - 1) + 3 * e2 + 4 * e3 + 6 * c == d
        assert inv.invariants(H).index == d


def test_is_admissible():
    assert inv.is_admissible(sg.gl2(16))
    shears = sg.closure([Mat2(5, 1, 1, 0, 1), Mat2(5, 1, 0, 1, 1)])
    assert not inv.is_admissible(shears)  # SL2: det fails
    assert inv.is_admissible(sg.borel(8))


def test_invariants_borel11():
    r = inv.invariants(sg.borel(11))
    assert (r.level, r.index, r.genus) == (11, 12, 1)
    assert r.admissible
    assert (r.nu2, r.nu3, r.cusps) == (0, 0, 2)


def test_label_parse():
    assert inv.parse_label("15.15.1.1") == (15, 15, 1, 1)
    with pytest.raises(ValueError):
        inv.parse_label("15.15.1")


def test_label_check_negative_control():
    B = sg.borel(11)
    good = inv.label_check(B, "11.12.1.1")
    assert good.passed
    assert good.line().endswith("status=PASS")
    bad = inv.label_check(B, "11.12.0.1")
    assert not bad.passed
    assert bad.computed == (11, 12, 1)
