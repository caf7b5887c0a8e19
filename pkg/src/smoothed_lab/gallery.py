"""Structured base matrices with known bad conditioning or growth.

Each builder returns an exact integer-valued matrix (before optional
normalization) so tests can pin entries without tolerance.  ``normalize=True``
divides by the spectral norm, which keeps condition numbers and growth-factor
ratios unchanged while putting the matrix on the unit sphere.
"""

from __future__ import annotations

import numpy as np

from .matlin import Matrix, matrix_norm

__all__ = [
    "DimensionInvalid",
    "bidiagonal_example",
    "symmetric_embedding_example",
    "growth_example",
]


class DimensionInvalid(ValueError):
    """The requested size does not fit the construction."""


def _normalized(a: np.ndarray, normalize: bool) -> Matrix:
    if normalize:
        a = a / matrix_norm(Matrix(a), "two")
    return Matrix(a)


def bidiagonal_example(n: int, normalize: bool = False) -> Matrix:
    """Unit diagonal with -2 on the superdiagonal.

    The inverse's entries grow like 2^(j-i), so the condition number is
    exponential in n even though every entry is O(1).
    """
    if n < 2:
        raise DimensionInvalid("bidiagonal example needs n >= 2")
    a = np.eye(n)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = -2.0
    return _normalized(a, normalize)


def symmetric_embedding_example(n: int, normalize: bool = False) -> Matrix:
    """Symmetric block matrix [[0, B], [B^T, 0]] built from the bidiagonal B.

    n must be even and at least 4; B is the bidiagonal example of size n/2.
    The eigenvalues come in +/- singular-value pairs of B, so this inherits
    exponentially bad conditioning while being exactly symmetric.
    """
    if n < 4 or n % 2 != 0:
        raise DimensionInvalid("symmetric embedding needs even n >= 4")
    half = n // 2
    b = bidiagonal_example(half).data
    a = np.zeros((n, n))
    a[:half, half:] = b
    a[half:, :half] = b.T
    return _normalized(a, normalize)


def growth_example(n: int, normalize: bool = False) -> Matrix:
    """Matrix whose no-pivot elimination doubles the last column each step.

    Columns 1..n-1 carry 1.1 on the diagonal and -1 strictly below; the last
    column is all ones.  Elimination adds each pivot row into the rows below,
    so the trailing column grows geometrically and the growth factor is
    exponential in n.
    """
    if n < 2:
        raise DimensionInvalid("growth example needs n >= 2")
    a = np.tril(np.full((n, n), -1.0), k=-1)
    np.fill_diagonal(a, 1.1)
    a[:, n - 1] = 1.0
    return _normalized(a, normalize)
