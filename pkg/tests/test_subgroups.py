import numpy as np
import pytest

from gl2lab import matrices as mat
from gl2lab import subgroups as sg
from gl2lab.errors import ModulusMismatch, NonCoprimeModuli, PreconditionViolated
from gl2lab.matrices import Mat2, identity, minus_identity
from gl2lab.ntheory import gl2_order, sl2_order


def test_closure_cyclic_unipotent():
    H = sg.closure([Mat2(5, 1, 1, 0, 1)])
    assert H.order == 5


def test_closure_full_gl2_mod3():
    H = sg.closure([Mat2(3, 1, 1, 0, 1), Mat2(3, 1, 0, 1, 1), Mat2(3, 2, 0, 0, 1)])
    assert H.order == 48  # (3^2-1)(3^2-3)


def test_gl2_construction_matches_closure():
    G = sg.gl2(6)
    assert G.order == gl2_order(6) == 288
    H = sg.closure(sg._gl2_generators(6))
    assert H.same_elements(G)


def test_sl2_codes_sizes():
    for n in (2, 3, 4, 5, 8, 12):
        assert sg.sl2_codes(n).size == sl2_order(n)


def test_contains_minus_id():
    assert not sg.contains_minus_id(sg.trivial_group(5))
    assert sg.contains_minus_id(sg.closure([minus_identity(8)]))


def test_det_image():
    assert sg.det_image_is_full(sg.gl2(5))
    shears = sg.closure([Mat2(5, 1, 1, 0, 1), Mat2(5, 1, 0, 1, 1)])
    assert shears.order == sl2_order(5)  # shears generate SL2
    assert not sg.det_image_is_full(shears)


def test_complex_conjugation_basics():
    assert sg.has_complex_conjugation(sg.closure([Mat2(4, 1, 0, 0, -1)]))
    assert not sg.has_complex_conjugation(sg.closure([minus_identity(8)]))
    assert sg.has_complex_conjugation(sg.gl2(16))


def test_complex_conjugation_shear_reference():
    assert sg.has_complex_conjugation(sg.closure([Mat2(8, 1, 1, 0, -1)]))
    # a conjugated copy: x * ref * x^-1
    x = Mat2(8, 1, 2, 1, 3)
    z = mat.mul(mat.mul(x, Mat2(8, 1, 0, 0, -1)), mat.inv(x))
    assert sg.has_complex_conjugation(sg.closure([z]))


def test_level_full_group_is_one():
    assert sg.level(sg.gl2(8)) == 1
    assert sg.level(sg.preimage(sg.gl2(2), 4)) == 1


def test_level_borel():
    assert sg.level(sg.borel(11)) == 11
    # Borel mod 8 viewed mod 24 still has level 8
    B = sg.product_group(sg.borel(8), sg.gl2(3))
    assert sg.level(B) == 8


def test_preimage_kernel_order():
    K = sg.preimage(sg.trivial_group(2), 4)
    assert K.order == 16  # Id + 2*M2(Z/2)
    assert sg.preimage(sg.gl2(2), 4).same_elements(sg.gl2(4))


def test_preimage_order_formula():
    H = sg.borel(3)
    for target in (9, 6, 12):
        P = sg.preimage(H, target)
        assert P.order == H.order * (gl2_order(target) // gl2_order(3))
        assert sg.level(P) == 3
        # generators really generate the element set
        assert sg.closure(P.generators).same_elements(P)


def test_preimage_generators_span_deep_kernel():
    # Lifting to a target divisible by m**2 needs more than the four
    # elementary unipotents: the congruence kernel mod 16 is not generated
    # by I + 2*E_ij alone, which once produced an index-2 generating set.
    S = sg.preimage(sg.closure([Mat2(2, 1, 1, 0, 1)]), 16)
    assert S.order == 8192
    assert sg.closure(S.generators).order == S.order


def test_product_group_gl2():
    P = sg.product_group(sg.gl2(2), sg.gl2(3))
    assert P.same_elements(sg.gl2(6))
    with pytest.raises(NonCoprimeModuli):
        sg.product_group(sg.gl2(2), sg.gl2(4))


def test_product_group_order_and_reductions():
    A = sg.borel(4)
    B = sg.closure([Mat2(3, 1, 1, 0, 1), Mat2(3, 2, 0, 0, 1)])
    P = sg.product_group(A, B)
    assert P.order == A.order * B.order
    assert P.reduce(4).same_elements(A)
    assert P.reduce(3).same_elements(B)
    assert sg.closure(P.generators).same_elements(P)


def test_are_conjugate_self():
    H = sg.borel(5)
    x = sg.are_conjugate(H, H)
    assert x is not None


def test_are_conjugate_shears_mod5():
    up = sg.closure([Mat2(5, 1, 1, 0, 1)])
    lo = sg.closure([Mat2(5, 1, 0, 1, 1)])
    x = sg.are_conjugate(up, lo)
    assert x is not None
    conj = sg.closure([mat.mul(mat.mul(x, g, ), mat.inv(x)) for g in up.generators])
    assert conj.same_elements(lo)


def test_are_conjugate_rejects_quickly():
    assert sg.are_conjugate(sg.borel(5), sg.gl2(5)) is None
    with pytest.raises(ModulusMismatch):
        sg.are_conjugate(sg.gl2(5), sg.gl2(7))


def test_are_conjugate_composite_modulus():
    up = sg.closure([Mat2(15, 1, 1, 0, 1), Mat2(15, 2, 0, 0, 1), Mat2(15, 1, 0, 0, 2)])
    x0 = Mat2(15, 0, 1, 14, 0)  # conjugating by the Weyl element transposes
    lo = sg.closure([mat.mul(mat.mul(x0, g), mat.inv(x0)) for g in up.generators])
    x = sg.are_conjugate(up, lo)
    assert x is not None
    conj = sg.closure([mat.mul(mat.mul(x, g), mat.inv(x)) for g in up.generators])
    assert conj.same_elements(lo)


def test_index2_cyclic4():
    H = sg.closure([Mat2(4, 1, 1, 0, 1)])
    subs = sg.subgroups_of_index(H, 2)
    assert len(subs) == 1
    assert subs[0].order == 2


def test_index2_gl2_mod3():
    # GL2(F3) has derived subgroup SL2(F3), so exactly one index-2 subgroup
    subs = sg.subgroups_of_index(sg.gl2(3), 2)
    assert len(subs) == 1
    assert subs[0].order == 24
    assert not sg.det_image_is_full(subs[0])


def test_index2_properties():
    H = sg.borel(8)
    subs = sg.subgroups_of_index(H, 2)
    sq = np.unique(sg._mul_pairwise(H.codes, H.codes, 8))
    for K in subs:
        assert H.order == 2 * K.order
        # normality
        for g in H.generators:
            gi = mat.inv(g)
            conj = sg._mul_by_const(sg._lmul_by_const(K.codes, gi.entries, 8), g.entries, 8)
            assert bool(sg._member(K.codes, conj).all())
        # squares land inside
        assert bool(sg._member(K.codes, sq).all())
        # generator extraction is faithful
        assert sg.closure(K.generators).same_elements(K)
    # distinct subgroups
    keys = {K.codes.tobytes() for K in subs}
    assert len(keys) == len(subs)


def test_index3_cyclic9():
    H = sg.closure([Mat2(9, 1, 1, 0, 1)])
    subs = sg.subgroups_of_index(H, 3)
    assert len(subs) == 1
    assert subs[0].order == 3


def test_index3_gl2_mod3_sylows():
    # the three Sylow-2 subgroups of GL2(F3) are its index-3 subgroups
    subs = sg.subgroups_of_index(sg.gl2(3), 3)
    assert len(subs) == 3
    for K in subs:
        assert K.order == 16
        assert sg.closure(K.generators).same_elements(K)


def test_index3_none_in_2group():
    H = sg.borel(4)
    assert sg.subgroups_of_index(H, 3) == []


def test_quadratic_twists_minus_id():
    H = sg.closure([minus_identity(8)])
    tw = sg.quadratic_twists(H)
    assert len(tw) == 1
    assert tw[0].same_elements(H)


def test_quadratic_twists_contains_self():
    H = sg.borel(5)  # contains -Id
    tw = sg.quadratic_twists(H)
    assert any(K.same_elements(H) for K in tw)
    G = H
    for K in tw:
        joined = sg.from_codes(
            5,
            np.union1d(K.codes, sg._lmul_by_const(K.codes, minus_identity(5).entries, 5)),
            generators=list(K.generators) + [minus_identity(5)],
        )
        assert joined.same_elements(G)
        assert K.order in (G.order, G.order // 2)


def test_quadratic_twists_adds_minus_id():
    H = sg.closure([Mat2(5, 1, 0, 0, -1)])  # order 2, no -Id
    tw = sg.quadratic_twists(H)
    G = sg.closure([Mat2(5, 1, 0, 0, -1), minus_identity(5)])
    assert any(K.same_elements(G) for K in tw)
    assert any(K.same_elements(H) for K in tw)


def test_quadratic_twists_modulus_guard():
    with pytest.raises(PreconditionViolated):
        sg.quadratic_twists(sg.gl2(2))


def test_closure_paper_generators_mod104():
    gens = [
        Mat2(104, 33, 0, 0, 1),
        Mat2(104, 83, 78, 0, 1),
        Mat2(104, 61, 65, 0, 1),
        Mat2(104, 30, 65, 13, 17),
        Mat2(104, 79, 39, 57, 40),
    ]
    H = sg.closure(gens)
    assert gl2_order(104) % H.order == 0
    assert H.index == 56
