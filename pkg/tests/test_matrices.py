import itertools

import pytest
from hypothesis import given, strategies as st

from gl2lab import matrices as mat
from gl2lab.errors import ModulusMismatch, NonCoprimeModuli, NotADivisor, NotInvertible
from gl2lab.matrices import Mat2, identity, minus_identity


def all_gl2(n):
    for a, b, c, d in itertools.product(range(n), repeat=4):
        x = Mat2(n, a, b, c, d)
        if mat.is_invertible(x):
            yield x


def test_mul_shear_composition():
    s = Mat2(5, 1, 1, 0, 1)
    assert mat.mul(s, s) == Mat2(5, 1, 2, 0, 1)


def test_mul_identity():
    x = Mat2(12, 7, 3, 10, 1)
    assert mat.mul(identity(12), x) == x
    assert mat.mul(x, identity(12)) == x


def test_mul_swap_involution():
    w = Mat2(7, 0, 1, 1, 0)
    assert mat.mul(w, w) == identity(7)


def test_mul_modulus_mismatch():
    with pytest.raises(ModulusMismatch):
        mat.mul(identity(5), identity(7))


def test_det_values():
    assert mat.det(Mat2(8, 1, 1, 0, 1)) == 1
    assert mat.det(Mat2(9, 1, 0, 0, -1)) == 8
    assert mat.det(Mat2(5, 2, 1, 1, 1)) == 1  # 2*1 - 1*1


def test_inv_shear():
    for n in (5, 8, 13):
        s = Mat2(n, 1, 1, 0, 1)
        assert mat.inv(s) == Mat2(n, 1, n - 1, 0, 1)


def test_inv_identity():
    assert mat.inv(identity(15)) == identity(15)


def test_inv_diagonal():
    assert mat.inv(Mat2(5, 2, 0, 0, 3)) == Mat2(5, 3, 0, 0, 2)


def test_inv_not_invertible():
    with pytest.raises(NotInvertible):
        mat.inv(Mat2(6, 2, 0, 0, 1))


def test_crt_combine_identity():
    assert mat.crt_combine(identity(8), identity(13)) == identity(104)


def test_crt_combine_swap_oracle():
    # independent brute-force oracle: search all residue matrices mod 15
    want_mod3 = Mat2(3, 0, 1, 1, 0)
    want_mod5 = identity(5)
    hits = [
        z
        for z in (Mat2(15, a, b, c, d) for a, b, c, d in itertools.product(range(15), repeat=4))
        if mat.reduce(z, 3) == want_mod3 and mat.reduce(z, 5) == want_mod5
    ]
    assert len(hits) == 1
    assert mat.crt_combine(want_mod3, want_mod5) == hits[0]
    assert hits[0] == Mat2(15, 6, 10, 10, 6)


def test_crt_combine_noncoprime():
    with pytest.raises(NonCoprimeModuli):
        mat.crt_combine(identity(4), identity(6))


@given(st.integers(0, 14), st.integers(0, 14), st.integers(0, 14), st.integers(0, 14))
def test_crt_round_trip(a, b, c, d):
    z = Mat2(15, a, b, c, d)
    back = mat.crt_combine(mat.reduce(z, 3), mat.reduce(z, 5))
    assert back == z


def test_crt_round_trip_exhaustive_mod6():
    for a, b, c, d in itertools.product(range(6), repeat=4):
        z = Mat2(6, a, b, c, d)
        assert mat.crt_combine(mat.reduce(z, 2), mat.reduce(z, 3)) == z


def test_reduce_rejects_non_divisor():
    with pytest.raises(NotADivisor):
        mat.reduce(identity(15), 4)


def test_reduce_full_modulus_is_identity_map():
    x = Mat2(10, 3, 4, 5, 6)
    assert mat.reduce(x, 10) == x


def test_lift_diag_to_104():
    z = mat.lift(Mat2(8, 1, 0, 0, -1), 104)
    assert z.modulus == 104
    assert mat.reduce(z, 8) == Mat2(8, 1, 0, 0, -1)
    assert mat.reduce(z, 13) == identity(13)


def test_lift_prime_power_refinement():
    assert mat.lift(identity(2), 8) == identity(8)
    x = Mat2(2, 1, 1, 0, 1)
    y = mat.lift(x, 8)
    assert y == Mat2(8, 1, 1, 0, 1)
    assert mat.is_invertible(y)


def test_lift_round_trip_exhaustive_gl2_mod3():
    count = 0
    for x in all_gl2(3):
        y = mat.lift(x, 15)
        assert mat.is_invertible(y)
        assert mat.reduce(y, 3) == x
        count += 1
    assert count == 48


def test_lift_rejects_non_invertible():
    with pytest.raises(NotInvertible):
        mat.lift(Mat2(4, 2, 0, 0, 1), 8)


def test_element_order_shear():
    assert mat.element_order(Mat2(5, 1, 1, 0, 1)) == 5


def test_element_order_minus_id():
    assert mat.element_order(minus_identity(7)) == 2


def test_element_order_rotation():
    # [[0,-1],[1,-1]] cubes to the identity:
    # square = [[-1,1],[-1,0]], then times the matrix gives Id
    r = Mat2(7, 0, -1, 1, -1)
    assert mat.element_order(r) == 3


@given(
    st.integers(2, 20),
    st.tuples(st.integers(0, 19), st.integers(0, 19), st.integers(0, 19), st.integers(0, 19)),
    st.tuples(st.integers(0, 19), st.integers(0, 19), st.integers(0, 19), st.integers(0, 19)),
)
def test_det_multiplicative(n, xe, ye):
    x = Mat2(n, *xe)
    y = Mat2(n, *ye)
    assert mat.det(mat.mul(x, y)) == mat.det(x) * mat.det(y) % n


def test_inv_two_sided_over_gl2_mod4():
    for x in all_gl2(4):
        y = mat.inv(x)
        assert mat.mul(x, y) == identity(4)
        assert mat.mul(y, x) == identity(4)


def test_encode_decode_round_trip():
    for n in (2, 3, 8, 104):
        for entries in [(0, 0, 0, 0), (1, 0, 0, 1), (n - 1,) * 4, (1, 2 % n, 3 % n, 4 % n)]:
            x = Mat2(n, *entries)
            assert mat.decode(mat.encode(x), n) == x


def test_from_list_negative_entries():
    x = mat.from_list([1, 0, 0, -1], 9)
    assert x == Mat2(9, 1, 0, 0, 8)
    with pytest.raises(ValueError):
        mat.from_list([1, 0, 0], 9)
