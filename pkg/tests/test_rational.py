"""Elliptic-curve arithmetic over Q: group law, torsion, 2-isogenies."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl2lab.errors import (
    BasisMismatch,
    BoundExceeded,
    KernelNotOrder2,
    PointNotOnCurve,
    SingularCurve,
    ZeroTwist,
)
from gl2lab.rational import (
    EllipticCurve,
    O,
    RationalPoint,
    mazur_validate,
    minimal_scaling_match,
    mw_decompose,
    quadratic_twist,
    rational_sqrt,
    torsion_subgroup,
    translation_type,
    two_isogeny,
)

E8 = EllipticCurve.short(0, 8)  # y^2 = x^3 + 8
E576E2 = EllipticCurve.short(-60, 176)  # y^2 = x^3 - 60x + 176
P = RationalPoint.of


class TestGroupLaw:
    def test_point_on_curve(self):
        assert E8.on_curve(P(2, -4))
        assert E8.on_curve(P(-2, 0))
        assert not E8.on_curve(P(1, 1))

    def test_identity(self):
        assert E8.add(O, P(2, -4)) == P(2, -4)
        assert E8.add(P(2, -4), O) == P(2, -4)

    def test_neg_and_cancel(self):
        Q = P(2, -4)
        assert E8.add(Q, E8.neg(Q)).is_infinity

    def test_two_torsion_doubles_to_identity(self):
        assert E8.add(P(-2, 0), P(-2, 0)).is_infinity

    def test_known_doubling(self):
        # on 576.e2, 2 * (10, -24) = (5, -1)
        assert E576E2.scalar_mul(2, P(10, -24)) == P(5, -1)

    def test_scalar_mul_negative(self):
        Q = P(10, -24)
        assert E576E2.scalar_mul(-1, Q) == E576E2.neg(Q)
        assert E576E2.scalar_mul(-2, Q) == E576E2.neg(P(5, -1))

    def test_associativity_spot(self):
        Q1, Q2 = P(2, -4), P(-2, 0)
        lhs = E8.add(E8.add(Q1, Q2), Q1)
        rhs = E8.add(Q1, E8.add(Q2, Q1))
        assert lhs == rhs

    def test_singular_rejected(self):
        with pytest.raises(SingularCurve):
            EllipticCurve.short(0, 0)

    @given(st.integers(-6, 6))
    @settings(max_examples=13, deadline=None)
    def test_scalar_mul_matches_repeated_add(self, n):
        Q = P(10, -24)
        acc = O
        for _ in range(abs(n)):
            acc = E576E2.add(acc, Q if n >= 0 else E576E2.neg(Q))
        assert E576E2.scalar_mul(n, Q) == acc


class TestLongModels:
    def test_long_model_group_law(self):
        # a model with a1 = a3 = 0 but a2 != 0
        E = EllipticCurve.from_coeffs([0, 18, 0, -288, 864])
        assert E.on_curve(P(10, 28))
        assert E.on_curve(P(6, 0))
        assert E.add(P(6, 0), P(6, 0)).is_infinity

    def test_short_model_round_trip(self):
        E = EllipticCurve.from_coeffs([1, -1, 1, -14, 29])
        sf = E.short_model()
        Q = P(-3, 7) if E.on_curve(P(-3, 7)) else None
        # find some rational point by brute scan instead of guessing
        pts = [
            P(x, y)
            for x in range(-10, 11)
            for y in range(-30, 31)
            if E.on_curve(P(x, y))
        ]
        assert pts, "test model should have small integral points"
        for Q in pts:
            S = sf.to_short(Q)
            assert sf.curve.on_curve(S)
            assert sf.from_short(S) == Q

    def test_j_invariant_preserved_by_depression(self):
        E = EllipticCurve.from_coeffs([0, 18, 0, -288, 864])
        assert E.j_invariant() == E.short_model().curve.j_invariant()


class TestTwist:
    def test_twist_by_two(self):
        assert quadratic_twist(E8, 2).coefficients()[3:] == (0, 64)

    def test_twist_preserves_j(self):
        E = EllipticCurve.short(-60, 176)
        for d in (-1, 2, 3, 5):
            assert quadratic_twist(E, d).j_invariant() == E.j_invariant()

    def test_twist_scales_discriminant(self):
        E = EllipticCurve.short(-60, 176)
        assert quadratic_twist(E, 3).discriminant() == 3 ** 6 * E.discriminant()

    def test_zero_twist_rejected(self):
        with pytest.raises(ZeroTwist):
            quadratic_twist(E8, 0)


class TestMazur:
    def test_allowed_cyclic(self):
        for n in list(range(1, 11)) + [12]:
            assert mazur_validate((n,))

    def test_allowed_split(self):
        for m in (2, 4, 6, 8):
            assert mazur_validate((2, m))

    def test_rejects_eleven(self):
        assert not mazur_validate((11,))

    def test_accepts_two_cross_eight(self):
        assert mazur_validate((2, 8))

    def test_rejects_bad_split(self):
        assert not mazur_validate((2, 10))
        assert not mazur_validate((3, 3))

    def test_trivial(self):
        assert mazur_validate(())
        assert mazur_validate((1,))


class TestTorsion:
    def test_z2_on_576e2(self):
        t = torsion_subgroup(E576E2)
        assert t.structure == (2,)
        assert t.generators[0] == P(4, 0)

    def test_z2_on_x3_plus_8(self):
        t = torsion_subgroup(E8)
        assert t.structure == (2,)
        assert t.generators[0] == P(-2, 0)

    def test_full_two_torsion(self):
        # y^2 = x^3 - 28x - 48 has roots -4, -2, 6
        E = EllipticCurve.short(-28, -48)
        t = torsion_subgroup(E)
        assert t.structure == (2, 2)
        assert {Q.x for Q in t.points if not Q.is_infinity} == {-4, -2, 6}

    def test_trivial_torsion(self):
        t = torsion_subgroup(EllipticCurve.short(0, 3))
        assert t.structure == ()

    def test_z4_example(self):
        # X1(4)-style curve: y^2 = x^3 + 4x has a point of order 4 at (2, 4)
        t = torsion_subgroup(EllipticCurve.short(4, 0))
        assert t.structure == (4,)

    def test_rational_model_rescaled(self):
        # non-integral short model: scale of 576.e4 by u = 1/2
        E = EllipticCurve.short(Fraction(0), Fraction(8, 64))
        t = torsion_subgroup(E)
        assert t.structure == (2,)


class TestTwoIsogeny:
    def test_codomain_of_x3_plus_8(self):
        phi = two_isogeny(E8, P(-2, 0))
        assert phi.codomain.coefficients()[3:] == (-60, 176)

    def test_image_point(self):
        phi = two_isogeny(E8, P(-2, 0))
        assert phi(P(2, -4)) == P(5, -1)

    def test_image_is_double_of_generator(self):
        phi = two_isogeny(E8, P(-2, 0))
        img = phi(P(2, -4))
        assert phi.codomain.scalar_mul(2, P(10, -24)) == img

    def test_dual_direction(self):
        phi = two_isogeny(E576E2, P(4, 0))
        assert phi.codomain.coefficients()[3:] == (0, 512)
        assert phi(P(10, -24)) == P(8, -32)

    def test_scaling_match_to_e4(self):
        phi = two_isogeny(E576E2, P(4, 0))
        u, r = minimal_scaling_match(phi.codomain, E8)
        assert (u, r) == (2, 0)
        # (8, -32) on y^2 = x^3 + 512 descends to (2, -4) on y^2 = x^3 + 8
        assert P(Fraction(8, u * u), Fraction(-32, u ** 3)) == P(2, -4)

    def test_kernel_maps_to_identity(self):
        phi = two_isogeny(E8, P(-2, 0))
        assert phi(P(-2, 0)).is_infinity
        assert phi(O).is_infinity

    def test_homomorphism_spot(self):
        phi = two_isogeny(E576E2, P(4, 0))
        Q1 = P(10, -24)
        Q2 = E576E2.scalar_mul(2, Q1)
        assert phi(E576E2.add(Q1, Q2)) == phi.codomain.add(phi(Q1), phi(Q2))

    def test_bad_kernel_rejected(self):
        with pytest.raises(KernelNotOrder2):
            two_isogeny(E8, P(2, -4))
        with pytest.raises(KernelNotOrder2):
            two_isogeny(E8, P(7, 0))


class TestScalingMatch:
    def test_trivial_match(self):
        assert minimal_scaling_match(E8, E8) == (1, 0)

    def test_u_two(self):
        C = EllipticCurve.short(0, 512)
        assert minimal_scaling_match(C, E8) == (2, 0)

    def test_generic_match(self):
        T = EllipticCurve.short(-60, 176)
        C = EllipticCurve.short(-60 * 3 ** 4, 176 * 3 ** 6)
        assert minimal_scaling_match(C, T) == (3, 0)

    def test_j_1728(self):
        T = EllipticCurve.short(4, 0)
        C = EllipticCurve.short(4 * 16, 0)
        assert minimal_scaling_match(C, T) == (2, 0)

    def test_non_isomorphic(self):
        assert minimal_scaling_match(E8, EllipticCurve.short(0, 9)) is None
        assert minimal_scaling_match(E8, E576E2) is None

    def test_quadratic_twist_not_matched(self):
        # same j but only a quadratic (not scaling) twist
        assert minimal_scaling_match(quadratic_twist(E576E2, 3), E576E2) is None


class TestMwDecompose:
    def test_direct_hit(self):
        g1 = P(10, -24)
        assert mw_decompose(E576E2, P(5, -1), g1, [P(4, 0)], 4) == (2, 0)

    def test_with_torsion_part(self):
        g1 = P(10, -24)
        target = E576E2.add(E576E2.scalar_mul(-1, g1), P(4, 0))
        assert mw_decompose(E576E2, target, g1, [P(4, 0)], 4) == (-1, 1)

    def test_bound_exceeded(self):
        g1 = P(10, -24)
        target = E576E2.scalar_mul(5, g1)
        with pytest.raises(BoundExceeded):
            mw_decompose(E576E2, target, g1, [P(4, 0)], 3)

    def test_point_must_lie_on_curve(self):
        with pytest.raises(PointNotOnCurve):
            mw_decompose(E576E2, P(1, 1), P(10, -24), [], 2)


class TestTranslationType:
    def test_same_parity(self):
        assert translation_type((2, 0), (0, 0))
        assert translation_type((3, 1), (1, 1))

    def test_different_parity(self):
        assert not translation_type((2, 0), (1, 0))

    def test_mismatched_bases(self):
        with pytest.raises(BasisMismatch):
            translation_type((1, 0), (1,))


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(Fraction(2)) is None
    assert rational_sqrt(Fraction(-4)) is None
