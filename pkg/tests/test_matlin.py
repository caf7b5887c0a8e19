import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, reject, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from smoothed_lab.matlin import (DegeneratePivot, Matrix, SingularMatrix,
                                 condition_number, growth_factors, lu_nopivot,
                                 lu_partial, matrix_norm, smallest_singular,
                                 solve_lu)

A12 = np.array([[1.0, 2.0], [3.0, 4.0]])
SYM = np.array([[2.0, 1.0], [1.0, 2.0]])


def random_matrix(n, seed):
    return Matrix(np.random.default_rng(seed).standard_normal((n, n)))


def test_matrix_construction_guards():
    with pytest.raises(ValueError):
        Matrix([1.0, 2.0])
    with pytest.raises(ValueError):
        Matrix(np.empty((0, 3)))
    with pytest.raises(ValueError):
        Matrix([[np.nan]])
    with pytest.raises(ValueError):
        Matrix([[np.inf, 1.0]])
    m = Matrix([[1, 2], [3, 4]])
    assert m.data.dtype == np.float64
    with pytest.raises(ValueError):
        m.data[0, 0] = 9.0
    assert m == Matrix(A12)
    assert m != Matrix(SYM)


def test_norms_small_matrix():
    m = Matrix(A12)
    assert matrix_norm(m, "one") == 6.0
    assert matrix_norm(m, "inf") == 7.0
    assert matrix_norm(m, "max") == 4.0
    npt.assert_allclose(matrix_norm(m, "two"), 5.464985704219043, rtol=1e-10)
    with pytest.raises(ValueError):
        matrix_norm(m, "frobenius")


def test_two_norm_matches_svd():
    for seed, n in ((0, 3), (1, 7), (2, 20), (3, 45)):
        m = random_matrix(n, seed)
        npt.assert_allclose(matrix_norm(m, "two"),
                            np.linalg.norm(m.data, 2), rtol=1e-8)


def test_smallest_singular_matches_svd():
    for seed, n in ((4, 3), (5, 8), (6, 25)):
        m = random_matrix(n, seed)
        smin, invn = smallest_singular(m)
        assert smin == 1.0 / invn
        npt.assert_allclose(smin, np.linalg.svd(m.data)[1][-1], rtol=1e-8)


def test_condition_number_matches_svd():
    m = Matrix(A12)
    npt.assert_allclose(condition_number(m), 14.93303437365925, rtol=1e-10)
    for seed, n in ((7, 4), (8, 12), (9, 30)):
        m = random_matrix(n, seed)
        npt.assert_allclose(condition_number(m), np.linalg.cond(m.data, 2),
                            rtol=1e-8)


def test_condition_number_clamped_at_one():
    assert condition_number(Matrix(np.eye(6))) == 1.0


def test_singular_input_raises():
    with pytest.raises(SingularMatrix):
        smallest_singular(Matrix([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(SingularMatrix):
        condition_number(Matrix([[0.0, 0.0], [0.0, 0.0]]))


def test_lu_nopivot_small_exact():
    f = lu_nopivot(Matrix(A12))
    npt.assert_array_equal(f.l.data, [[1.0, 0.0], [3.0, 1.0]])
    npt.assert_array_equal(f.u.data, [[1.0, 2.0], [0.0, -2.0]])
    npt.assert_array_equal(f.perm, [0, 1])
    assert f.intermediates is None
    f = lu_nopivot(Matrix(SYM))
    npt.assert_array_equal(f.l.data, [[1.0, 0.0], [0.5, 1.0]])
    npt.assert_array_equal(f.u.data, [[2.0, 1.0], [0.0, 1.5]])


def test_lu_nopivot_degenerate_pivot():
    with pytest.raises(DegeneratePivot):
        lu_nopivot(Matrix([[0.0, 1.0], [1.0, 0.0]]))


def test_lu_partial_small_exact():
    f = lu_partial(Matrix(A12))
    npt.assert_array_equal(f.perm, [1, 0])
    npt.assert_allclose(f.l.data, [[1.0, 0.0], [1.0 / 3.0, 1.0]], rtol=1e-15)
    npt.assert_allclose(f.u.data, [[3.0, 4.0], [0.0, 2.0 / 3.0]], rtol=1e-15)
    f = lu_partial(Matrix([[0.0, 1.0], [1.0, 0.0]]))
    npt.assert_array_equal(f.perm, [1, 0])
    npt.assert_array_equal(f.l.data, np.eye(2))


def test_growth_factors_small_exact():
    rep = growth_factors(Matrix(A12), lu_nopivot(Matrix(A12)))
    assert rep.rho_l == 4.0
    assert rep.rho_u == 3.0 / 7.0
    assert rep.rho_max == 1.5
    assert rep.norm_a_inf == 7.0
    rep = growth_factors(Matrix(SYM), lu_nopivot(Matrix(SYM)))
    assert rep.rho_l == 1.5
    assert rep.rho_u == 1.0


def test_solve_lu_small_exact():
    f = lu_nopivot(Matrix(SYM))
    npt.assert_allclose(solve_lu(f, [1.0, 1.0]), [1.0 / 3.0, 1.0 / 3.0],
                        rtol=1e-15)
    npt.assert_allclose(solve_lu(f, [-1.0, 1.0]), [-1.0, 1.0], rtol=1e-15)


def test_solve_lu_with_pivoting_matches_numpy():
    for seed, n in ((10, 5), (11, 17)):
        m = random_matrix(n, seed)
        b = np.random.default_rng(seed + 100).standard_normal(n)
        npt.assert_allclose(solve_lu(lu_partial(m), b),
                            np.linalg.solve(m.data, b), rtol=1e-8, atol=1e-12)


def test_intermediates_start_with_input_and_shrink():
    m = random_matrix(6, 12)
    f = lu_nopivot(m, record_intermediates=True)
    assert len(f.intermediates) == 6
    npt.assert_array_equal(f.intermediates[0], m.data)
    npt.assert_array_equal(f.intermediates[-1], f.u.data)
    for k in range(1, 6):
        npt.assert_array_equal(f.intermediates[k][k:, k - 1], 0.0)


finite_squares = arrays(
    np.float64, (4, 4),
    elements=st.floats(min_value=-10.0, max_value=10.0, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(a=finite_squares, b=finite_squares)
def test_norms_submultiplicative(a, b):
    prod = Matrix(a @ b)
    for kind in ("one", "two", "inf"):
        lhs = matrix_norm(prod, kind)
        rhs = matrix_norm(Matrix(a), kind) * matrix_norm(Matrix(b), kind)
        assert lhs <= rhs * (1.0 + 1e-9) + 1e-12


@settings(max_examples=60, deadline=None)
@given(a=finite_squares)
def test_one_norm_is_transposed_inf_norm(a):
    assert matrix_norm(Matrix(a), "one") == matrix_norm(Matrix(a.T), "inf")


@settings(max_examples=40, deadline=None)
@given(a=finite_squares)
def test_condition_number_at_least_one(a):
    try:
        assert condition_number(Matrix(a)) >= 1.0
    except SingularMatrix:
        reject()


@settings(max_examples=40, deadline=None)
@given(a=finite_squares)
def test_partial_pivot_multipliers_bounded(a):
    try:
        f = lu_partial(Matrix(a))
    except DegeneratePivot:
        reject()
    assert np.abs(f.l.data).max() <= 1.0 + 1e-12
    npt.assert_allclose(f.l.data @ f.u.data, a[f.perm], atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(a=finite_squares)
def test_nopivot_reconstruction_diag_dominant(a):
    a = a + 50.0 * np.eye(4)
    f = lu_nopivot(Matrix(a))
    npt.assert_allclose(f.l.data @ f.u.data, a, atol=1e-10)
    assert np.all(np.tril(f.u.data, -1) == 0.0)
    assert np.all(np.triu(f.l.data, 1) == 0.0)
    npt.assert_array_equal(np.diagonal(f.l.data), 1.0)
