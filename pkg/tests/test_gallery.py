import math

import numpy as np
import numpy.testing as npt
import pytest

from smoothed_lab.gallery import (DimensionInvalid, bidiagonal_example,
                                  growth_example, symmetric_embedding_example)
from smoothed_lab.matlin import (growth_factors, lu_nopivot, matrix_norm,
                                 solve_lu)


def test_bidiagonal_exact_form():
    npt.assert_array_equal(bidiagonal_example(2).data,
                           [[1.0, -2.0], [0.0, 1.0]])
    want = np.eye(5)
    want[np.arange(4), np.arange(4) + 1] = -2.0
    npt.assert_array_equal(bidiagonal_example(5).data, want)


def test_bidiagonal_inverse_doubles_along_rows():
    m = bidiagonal_example(5)
    inv = np.linalg.inv(m.data)
    i, j = np.indices((5, 5))
    want = np.where(j >= i, 2.0 ** (j - i), 0.0)
    npt.assert_allclose(inv, want, atol=1e-12)
    e5 = np.zeros(5)
    e5[4] = 1.0
    col = solve_lu(lu_nopivot(m), e5)
    npt.assert_allclose(np.linalg.norm(col), math.sqrt(341.0), rtol=1e-12)


def test_symmetric_embedding_exact_form():
    m = symmetric_embedding_example(10)
    b = bidiagonal_example(5).data
    npt.assert_array_equal(m.data[:5, 5:], b)
    npt.assert_array_equal(m.data[5:, :5], b.T)
    npt.assert_array_equal(m.data[:5, :5], np.zeros((5, 5)))
    npt.assert_array_equal(m.data[5:, 5:], np.zeros((5, 5)))
    npt.assert_array_equal(m.data, m.data.T)


def test_embedding_keeps_the_conditioning():
    npt.assert_allclose(np.linalg.cond(symmetric_embedding_example(10).data),
                        np.linalg.cond(bidiagonal_example(5).data),
                        rtol=1e-10)


def test_growth_exact_form():
    npt.assert_array_equal(growth_example(2).data, [[1.1, 1.0], [-1.0, 1.0]])
    m = growth_example(6).data
    want = np.tril(np.full((6, 6), -1.0), -1)
    np.fill_diagonal(want, 1.1)
    want[:, 5] = 1.0
    npt.assert_array_equal(m, want)


def test_growth_example_grows_without_pivoting():
    m = growth_example(6)
    rep = growth_factors(m, lu_nopivot(m))
    assert rep.rho_u > 3.0
    assert rep.rho_max > 20.0
    bigger = growth_example(12)
    rep12 = growth_factors(bigger, lu_nopivot(bigger))
    assert rep12.rho_u > 10.0 * rep.rho_u


def test_normalized_variants_have_unit_norm():
    for build, n in ((bidiagonal_example, 7), (symmetric_embedding_example, 8),
                     (growth_example, 7)):
        m = build(n, normalize=True)
        npt.assert_allclose(matrix_norm(m, "two"), 1.0, rtol=1e-9)


def test_dimension_guards():
    with pytest.raises(DimensionInvalid):
        bidiagonal_example(1)
    with pytest.raises(DimensionInvalid):
        growth_example(1)
    with pytest.raises(DimensionInvalid):
        symmetric_embedding_example(5)
    with pytest.raises(DimensionInvalid):
        symmetric_embedding_example(2)
