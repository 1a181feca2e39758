import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypdecomp.scalar import PoleError, pochhammer
from hypdecomp.tps import (
    ArityError,
    apply_diagonal_split,
    apply_diagonal_xy,
    compare_series,
    compositions,
    constant,
    derivative,
    from_coefficients,
    graded_indices,
    monomial,
    multiply,
    negate_y,
    operator_pochhammer_brute,
    outer,
    retruncate,
    shift,
)

from conftest import non_integer_rationals

F = Fraction


def rand_series(seed, arity, degree):
    rng = random.Random(seed)
    return from_coefficients(arity, degree, lambda idx: F(rng.randint(-9, 9), rng.randint(1, 5)))


def test_index_enumeration_counts():
    # C(D + v, v) monomials of degree <= D in v variables
    assert len(graded_indices(2, 4)) == 15
    assert len(graded_indices(3, 3)) == 20
    assert sorted(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]


def test_constant_series():
    one = constant((1, 0), 2)
    assert [one[(i,)] for i in range(3)] == [1, 0, 0]


def test_construction_names_pole_index():
    def coeff(idx):
        if idx == (1, 1):
            raise PoleError("boom")
        return F(1)

    with pytest.raises(PoleError) as info:
        from_coefficients((1, 1), 3, coeff)
    assert info.value.where == (1, 1)


def test_multiply_by_one_is_identity():
    s = rand_series(1, (2, 1), 5)
    assert multiply(s, constant((2, 1), 5)) == s


def test_one_plus_x_times_one_plus_y():
    D = 2
    x = monomial((1, 1), D, (1, 0))
    y = monomial((1, 1), D, (0, 1))
    one = constant((1, 1), D)
    prod = multiply(one + x, one + y)
    assert prod == one + x + y + monomial((1, 1), D, (1, 1))


def test_outer_matches_multiply_of_embedded():
    a = rand_series(2, (1, 0), 6)
    b = rand_series(3, (0, 1), 6)
    lifted_a = from_coefficients((1, 1), 6, lambda idx: a[(idx[0],)] if idx[1] == 0 else F(0))
    lifted_b = from_coefficients((1, 1), 6, lambda idx: b[(idx[1],)] if idx[0] == 0 else F(0))
    assert outer(a, b) == multiply(lifted_a, lifted_b)


def test_outer_block_layout():
    # x-block of the second factor sits after the first factor's x-block
    a = monomial((1, 1), 4, (1, 0))
    b = monomial((1, 1), 4, (0, 2))
    out = outer(a, b)
    assert out.arity == (2, 2)
    assert out[(1, 0, 0, 2)] == 1


@given(st.integers(0, 10_000), st.integers(0, 10_000), st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_multiply_commutative_associative(s1, s2, s3):
    a, b, c = (rand_series(s, (1, 1), 4) for s in (s1, s2, s3))
    assert multiply(a, b) == multiply(b, a)
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    assert multiply(a, b + c) == multiply(a, b) + multiply(a, c)


def test_arity_mismatch_rejected():
    with pytest.raises(ArityError):
        rand_series(0, (1, 0), 3) + rand_series(0, (0, 1), 3)


def test_shift_and_derivative():
    s = monomial((2, 0), 5, (1, 2), F(3))
    assert shift(s, (1, 1))[(2, 3)] == 3
    assert shift(s, (2, 2)) == s * 0  # pushed past the bound
    d = derivative(s, (1, 2))
    assert d.degree == 2 and d[(0, 0)] == 3 * 1 * 2


def test_negate_y_and_retruncate():
    s = rand_series(5, (1, 1), 4)
    t = negate_y(s)
    assert t[(2, 1)] == -s[(2, 1)] and t[(1, 2)] == s[(1, 2)]
    r = retruncate(s, 2)
    assert r.degree == 2 and r[(1, 1)] == s[(1, 1)]


def test_evaluate_polynomial():
    s = constant((1, 1), 2) + monomial((1, 1), 2, (1, 1), F(2))
    assert s.evaluate([F(1, 2)], [F(3)]) == 1 + 2 * F(3, 2)


def test_xy_operator_on_x_only_support_is_identity():
    s = from_coefficients((2, 1), 6, lambda idx: F(idx[0] + 1, idx[1] + 2) if idx[2] == 0 else F(0))
    assert apply_diagonal_xy(s, F(5, 7)) == s


def test_xy_operator_scales_monomial():
    s = monomial((1, 1), 4, (2, 1))
    assert apply_diagonal_xy(s, F(1, 2))[(2, 1)] == F(-1, 3)


@given(non_integer_rationals, st.integers(0, 500))
@settings(max_examples=30, deadline=None)
def test_xy_operator_round_trip(h, seed):
    s = rand_series(seed, (1, 2), 5)
    assert apply_diagonal_xy(apply_diagonal_xy(s, h), h, inverted=True) == s


def test_xy_operator_pole_is_surfaced():
    s = monomial((1, 1), 3, (0, 1))
    with pytest.raises(PoleError):
        apply_diagonal_xy(s, F(1))


def test_split_operator():
    one_var = rand_series(7, (1, 0), 5)
    assert apply_diagonal_split(one_var, F(2, 3)) == one_var
    s = monomial((2, 0), 3, (1, 1))
    assert apply_diagonal_split(s, F(1))[(1, 1)] == 2
    assert apply_diagonal_split(s, F(1), inverted=True)[(1, 1)] == F(1, 2)
    with pytest.raises(ArityError):
        apply_diagonal_split(rand_series(0, (1, 1), 2), F(1, 2))


def test_brute_force_small_cases():
    f = rand_series(11, (1, 2), 5)
    assert operator_pochhammer_brute(f, 0, "y") == f
    x2 = monomial((1, 0), 4, (2,))
    assert operator_pochhammer_brute(x2, 1, "x") == x2 * -2
    y3 = monomial((0, 1), 5, (3,))
    assert operator_pochhammer_brute(y3, 2, "y") == y3 * 12


@given(st.integers(0, 10_000), st.integers(0, 6), st.sampled_from([(1, 1), (2, 1), (1, 2), (3, 2)]))
@settings(max_examples=20, deadline=None)
def test_brute_force_matches_eigenvalues(seed, k, arity):
    f = rand_series(seed, arity, 6)
    m = arity[0]
    bx = operator_pochhammer_brute(f, k, "x")
    by = operator_pochhammer_brute(f, k, "y")
    for idx, c in f.items():
        p, q = sum(idx[:m]), sum(idx[m:])
        assert bx[idx] == pochhammer(F(-p), k) * c
        assert by[idx] == pochhammer(F(q), k) * c


def test_compare_reports_every_mismatch():
    s = rand_series(3, (1, 0), 4)
    assert compare_series(s, s).equal
    bumped = s + monomial((1, 0), 4, (4,))
    rep = compare_series(s, bumped)
    assert not rep.equal
    assert [m[0] for m in rep.mismatches] == [(4,)]
    assert rep.max_discrepancy == 1


def test_float_series_arithmetic():
    s = from_coefficients((1, 0), 3, lambda idx: 0.5 ** idx[0])
    sq = multiply(s, s)
    assert sq[(2,)] == pytest.approx(3 * 0.25)
