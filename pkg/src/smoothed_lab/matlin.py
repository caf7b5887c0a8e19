"""Dense real linear algebra with elimination-growth instrumentation.

The centerpiece is LU factorization *without* pivoting, kept honest by a
reconstruction contract and exposed alongside the growth statistics that
make elimination stability measurable: the infinity-norm ratio of U to A,
the infinity norm of L, and the max-norm product ratio.  Partial pivoting
is provided for comparison runs, and spectral quantities (2-norm, smallest
singular value, condition number) are computed iteratively so the module
has no dependency beyond numpy array arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import streams

__all__ = [
    "Matrix",
    "LUFactors",
    "GrowthReport",
    "DegeneratePivot",
    "SingularMatrix",
    "PIVOT_FLOOR",
    "matrix_norm",
    "lu_nopivot",
    "lu_partial",
    "growth_factors",
    "smallest_singular",
    "condition_number",
    "solve_lu",
]

#: Pivot magnitudes below this are treated as exact breakdown.
PIVOT_FLOOR = 1e-300

_NORM_KINDS = ("one", "two", "inf", "max")
_POWER_TOL = 1e-10      # relative Rayleigh-quotient change at convergence
_POWER_MAXIT = 10000    # total iteration budget across restarts
_POWER_RESTARTS = 3
_POWER_SEED = 0x5EEDF00D
_BIG = 1e150            # rescale Gram products above this to dodge overflow


class DegeneratePivot(ArithmeticError):
    """A pivot fell below PIVOT_FLOOR during elimination."""


class SingularMatrix(ArithmeticError):
    """Smallest singular value underflowed; the matrix has no usable inverse."""


class Matrix:
    """Immutable dense real matrix (float64, row-major).

    Construction rejects NaN and infinity, and the backing array is frozen,
    so instances are safe to share between threads and across trials.
    """

    __slots__ = ("_data",)

    def __init__(self, entries):
        if isinstance(entries, Matrix):
            entries = entries._data
        a = np.array(entries, dtype=np.float64, order="C")
        if a.ndim != 2:
            raise ValueError("matrix entries must form a 2-D array")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("matrix must have at least one row and column")
        if not np.isfinite(a).all():
            raise ValueError("matrix entries must be finite")
        a.setflags(write=False)
        self._data = a

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def data(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._data

    @property
    def square(self) -> bool:
        return self._data.shape[0] == self._data.shape[1]

    def to_array(self) -> np.ndarray:
        """Writable copy of the entries."""
        return self._data.copy()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(
            np.array_equal(self._data, other._data))

    __hash__ = None

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols})"


@dataclass(frozen=True, eq=False)
class LUFactors:
    """Result of an LU factorization: ``l @ u == a[perm]`` up to roundoff.

    ``l`` is unit lower triangular (diagonal exactly 1), ``u`` is upper
    triangular, and ``perm`` maps output row i to source row perm[i]; it is
    the identity when pivoting was disabled.  ``intermediates``, when
    recording was requested, holds the working matrix after each eliminated
    column, starting with the input itself.
    """

    l: Matrix
    u: Matrix
    perm: np.ndarray
    intermediates: tuple | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return self.l.rows


@dataclass(frozen=True)
class GrowthReport:
    """Elimination growth statistics for one factorization.

    rho_u is the infinity-norm ratio ||U||_inf / ||A||_inf, rho_l is
    ||L||_inf (always >= 1 for a unit lower triangle), and rho_max is
    ||L||_max * ||U||_max / ||A||_max.
    """

    rho_l: float
    rho_u: float
    rho_max: float
    norm_a_inf: float


# ---------------------------------------------------------------------------
# norms


def matrix_norm(m: Matrix, kind: str) -> float:
    """Matrix norm of the requested kind: "one", "two", "inf", or "max".

    The 2-norm is computed by power iteration on the Gram matrix to relative
    tolerance 1e-10; the others are exact column/row/entry reductions.
    """
    if kind not in _NORM_KINDS:
        raise ValueError(f"unknown norm kind {kind!r}; expected one of {_NORM_KINDS}")
    a = m.data
    if kind == "one":
        return float(np.abs(a).sum(axis=0).max())
    if kind == "inf":
        return float(np.abs(a).sum(axis=1).max())
    if kind == "max":
        return float(np.abs(a).max())
    return _two_norm(a)


def _two_norm(a: np.ndarray) -> float:
    peak = float(np.abs(a).max())
    if peak == 0.0:
        return 0.0
    scale = 1.0
    if peak > _BIG:  # keep the Gram product representable
        a = a / peak
        scale = peak
    gram = a.T @ a if a.shape[1] <= a.shape[0] else a @ a.T
    return scale * math.sqrt(_power_top_eig(gram))


def _power_top_eig(gram: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    Stops once the Rayleigh quotient is stable to _POWER_TOL on consecutive
    iterations; restarts from a fresh random vector if a round of the budget
    passes without convergence.  Start vectors come from a fixed internal
    stream so results are reproducible.
    """
    n = gram.shape[0]
    starts = streams.RandomStream(_POWER_SEED, 0)
    per_attempt = _POWER_MAXIT // _POWER_RESTARTS
    best = 0.0
    for _ in range(_POWER_RESTARTS):
        v = starts.gaussians(n)
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            continue
        v = v / nv
        lam_prev = None
        streak = 0
        for _ in range(per_attempt):
            w = gram @ v
            lam = float(v @ w)
            if lam_prev is not None and abs(lam - lam_prev) <= _POWER_TOL * max(abs(lam), PIVOT_FLOOR):
                streak += 1
                if streak >= 2:
                    return max(lam, 0.0)
            else:
                streak = 0
            lam_prev = lam
            nw = float(np.linalg.norm(w))
            if nw == 0.0:
                break  # v landed in the null space; try a fresh start
            v = w / nw
        if lam_prev is not None:
            best = max(best, lam_prev)
    return max(best, 0.0)


# ---------------------------------------------------------------------------
# factorizations


def _require_square(m: Matrix, op: str) -> int:
    if not m.square:
        raise ValueError(f"{op} requires a square matrix, got {m.rows}x{m.cols}")
    return m.rows


def lu_nopivot(a: Matrix, record_intermediates: bool = False) -> LUFactors:
    """Factor ``a = l @ u`` by elimination in natural row order, no pivoting.

    Raises DegeneratePivot if any pivot magnitude falls below PIVOT_FLOOR.
    With ``record_intermediates`` the working matrix is snapshotted after
    each eliminated column (O(n^3) memory), which the column identities of
    the factors can be checked against.
    """
    n = _require_square(a, "lu_nopivot")
    u = a.to_array()
    l = np.eye(n)
    snaps = [u.copy()] if record_intermediates else None
    for k in range(n - 1):
        pivot = u[k, k]
        if abs(pivot) < PIVOT_FLOOR:
            raise DegeneratePivot(f"pivot {k} has magnitude {abs(pivot):.3e}")
        col = u[k + 1:, k] / pivot
        l[k + 1:, k] = col
        u[k + 1:, k:] -= np.outer(col, u[k, k:])
        u[k + 1:, k] = 0.0
        if snaps is not None:
            snaps.append(u.copy())
    return LUFactors(
        l=Matrix(l),
        u=Matrix(u),
        perm=np.arange(n),
        intermediates=tuple(snaps) if snaps is not None else None,
    )


def lu_partial(a: Matrix) -> LUFactors:
    """Factor ``a[perm] = l @ u`` with partial (row) pivoting.

    Every multiplier has magnitude at most 1.  Raises DegeneratePivot when a
    whole pivot column is below PIVOT_FLOOR, i.e. the matrix is singular to
    working precision.
    """
    n = _require_square(a, "lu_partial")
    u = a.to_array()
    l = np.eye(n)
    perm = np.arange(n)
    for k in range(n - 1):
        j = k + int(np.argmax(np.abs(u[k:, k])))
        if abs(u[j, k]) < PIVOT_FLOOR:
            raise DegeneratePivot(f"column {k} has no pivot above {PIVOT_FLOOR:.0e}")
        if j != k:
            u[[k, j], :] = u[[j, k], :]
            l[[k, j], :k] = l[[j, k], :k]
            perm[[k, j]] = perm[[j, k]]
        col = u[k + 1:, k] / u[k, k]
        l[k + 1:, k] = col
        u[k + 1:, k:] -= np.outer(col, u[k, k:])
        u[k + 1:, k] = 0.0
    return LUFactors(l=Matrix(l), u=Matrix(u), perm=perm)


def growth_factors(a: Matrix, factors: LUFactors) -> GrowthReport:
    """Growth statistics of ``factors`` relative to the source matrix ``a``.

    All norms are taken from the stored factors and the original matrix;
    nothing is recomputed from the product l @ u.
    """
    norm_a_inf = matrix_norm(a, "inf")
    norm_a_max = matrix_norm(a, "max")
    if norm_a_inf == 0.0 or norm_a_max == 0.0:
        raise ValueError("growth factors are undefined for the zero matrix")
    rho_u = matrix_norm(factors.u, "inf") / norm_a_inf
    rho_l = matrix_norm(factors.l, "inf")
    rho_max = matrix_norm(factors.l, "max") * matrix_norm(factors.u, "max") / norm_a_max
    return GrowthReport(rho_l=rho_l, rho_u=rho_u, rho_max=rho_max,
                        norm_a_inf=norm_a_inf)


# ---------------------------------------------------------------------------
# triangular solves and spectral quantities


def _forward_unit(l: np.ndarray, b: np.ndarray) -> np.ndarray:
    # solve L y = b for unit lower triangular L; b may be a matrix of columns
    y = np.array(b, dtype=np.float64)
    for i in range(1, y.shape[0]):
        y[i] -= l[i, :i] @ y[:i]
    return y


def _backward(u: np.ndarray, b: np.ndarray) -> np.ndarray:
    # solve U x = b for upper triangular U with nonzero diagonal
    x = np.array(b, dtype=np.float64)
    n = x.shape[0]
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            x[i] -= u[i, i + 1:] @ x[i + 1:]
        x[i] /= u[i, i]
    return x


def solve_lu(factors: LUFactors, b) -> np.ndarray:
    """Solve ``a @ x = b`` given an LU factorization of ``a``.

    Raises DegeneratePivot if any diagonal entry of u is below PIVOT_FLOOR.
    """
    n = factors.order
    rhs = np.asarray(b, dtype=np.float64)
    if rhs.shape[0] != n:
        raise ValueError(f"right-hand side has length {rhs.shape[0]}, expected {n}")
    udata = factors.u.data
    if np.abs(np.diagonal(udata)).min() < PIVOT_FLOOR:
        raise DegeneratePivot("upper factor has a diagonal entry below PIVOT_FLOOR")
    y = _forward_unit(factors.l.data, rhs[factors.perm])
    return _backward(udata, y)


def _explicit_inverse(factors: LUFactors) -> np.ndarray:
    n = factors.order
    udata = factors.u.data
    if np.abs(np.diagonal(udata)).min() < PIVOT_FLOOR:
        raise SingularMatrix("upper factor has a diagonal entry below PIVOT_FLOOR")
    rhs = np.eye(n)[factors.perm]
    return _backward(udata, _forward_unit(factors.l.data, rhs))


def smallest_singular(a: Matrix) -> tuple[float, float]:
    """Smallest singular value of ``a`` and the 2-norm of its inverse.

    Returns ``(sigma_min, inv_norm)`` with ``sigma_min = 1.0 / inv_norm`` by
    construction.  inv_norm comes from power iteration on the Gram matrix of
    the explicit inverse, which is itself assembled from pivoted LU solves.
    Raises SingularMatrix when the inverse is not representable (sigma_min
    would underflow PIVOT_FLOOR).
    """
    _require_square(a, "smallest_singular")
    try:
        factors = lu_partial(a)
        z = _explicit_inverse(factors)
    except DegeneratePivot as exc:
        raise SingularMatrix(str(exc)) from exc
    if not np.isfinite(z).all():
        raise SingularMatrix("inverse overflowed working precision")
    inv_norm = _two_norm(z)
    if not math.isfinite(inv_norm) or inv_norm <= 0.0:
        raise SingularMatrix("inverse norm is not a positive finite number")
    sigma_min = 1.0 / inv_norm
    if sigma_min < PIVOT_FLOOR:
        raise SingularMatrix(f"smallest singular value {sigma_min:.3e} underflows")
    return sigma_min, inv_norm


def condition_number(a: Matrix) -> float:
    """2-norm condition number ``||a||_2 * ||a^-1||_2``, clamped to >= 1."""
    _, inv_norm = smallest_singular(a)
    return max(1.0, matrix_norm(a, "two") * inv_norm)
