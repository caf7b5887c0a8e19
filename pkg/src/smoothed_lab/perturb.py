"""Random perturbation models around a fixed center matrix.

Four models: dense Gaussian noise on every entry, Gaussian noise confined to
the structurally nonzero entries, a symmetry-preserving variant of that, and
uniform box noise.  All draw from counter-based streams (see streams.py), so
a perturbed matrix is a pure function of (center, model, seed, trial) and
re-running any trial reproduces it bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matlin import Matrix
from .streams import RandomStream

__all__ = [
    "MODEL_KINDS",
    "PerturbationModel",
    "NotSymmetric",
    "derive_stream",
    "sample_gaussian_matrix",
    "perturb_dense",
    "perturb_zero_preserving",
    "perturb_sym_zero_preserving",
    "perturb_uniform",
    "apply_model",
]

MODEL_KINDS = (
    "dense_gaussian",
    "zero_preserving",
    "zero_preserving_symmetric",
    "uniform_box",
)


class NotSymmetric(ValueError):
    """The symmetric perturbation model was given an asymmetric center."""


@dataclass(frozen=True)
class PerturbationModel:
    """A noise model: which entries get perturbed, and at what scale."""

    kind: str
    sigma: float

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown perturbation kind {self.kind!r}; "
                             f"expected one of {MODEL_KINDS}")
        if not (np.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ValueError("sigma must be finite and nonnegative")


def derive_stream(seed: int, trial: int) -> RandomStream:
    """Stream for one trial.  Distinct trials of a seed are unrelated."""
    return RandomStream(seed, trial)


def sample_gaussian_matrix(rows: int, cols: int, sigma: float,
                           stream: RandomStream) -> Matrix:
    """rows x cols matrix of independent N(0, sigma^2) entries.

    Entries are drawn in row-major order; sigma = 0 yields the zero matrix
    while still consuming the same counters.
    """
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    g = stream.gaussians(rows * cols) * sigma
    return Matrix(g.reshape(rows, cols))


def perturb_dense(abar: Matrix, sigma: float, stream: RandomStream) -> Matrix:
    """Add independent N(0, sigma^2) noise to every entry of ``abar``."""
    g = stream.gaussians(abar.rows * abar.cols) * sigma
    return Matrix(abar.data + g.reshape(abar.rows, abar.cols))


def perturb_zero_preserving(abar: Matrix, sigma: float,
                            stream: RandomStream) -> Matrix:
    """Gaussian noise only on entries of ``abar`` that are exactly nonzero.

    Zero entries (compared exactly against 0.0) stay zero.  Draws are taken
    in row-major order over the nonzero positions.
    """
    out = abar.to_array()
    mask = out != 0.0
    count = int(mask.sum())
    if count:
        out[mask] += stream.gaussians(count) * sigma
    return Matrix(out)


def perturb_sym_zero_preserving(abar: Matrix, sigma: float,
                                stream: RandomStream) -> Matrix:
    """Symmetry-preserving sparse Gaussian noise.

    Requires an exactly symmetric center.  Each strictly-lower nonzero entry
    receives one Gaussian deviation, mirrored to its transpose position, and
    every diagonal entry receives its own deviation whether or not it was
    zero.  Draw order: strict-lower nonzeros row-major, then the diagonal.
    """
    a = abar.data
    if not abar.square or not np.array_equal(a, a.T):
        raise NotSymmetric("symmetric perturbation requires an exactly "
                           "symmetric square center")
    n = abar.rows
    out = abar.to_array()
    low_i, low_j = np.nonzero(np.tril(a != 0.0, k=-1))
    if low_i.size:
        dev = stream.gaussians(low_i.size) * sigma
        out[low_i, low_j] += dev
        out[low_j, low_i] = out[low_i, low_j]
    out[np.arange(n), np.arange(n)] += stream.gaussians(n) * sigma
    return Matrix(out)


def perturb_uniform(abar: Matrix, sigma: float, stream: RandomStream) -> Matrix:
    """Add independent uniform noise on [-sigma, sigma) to every entry."""
    u = stream.uniform_half_open(abar.rows * abar.cols)
    dev = sigma * (2.0 * u - 1.0)
    return Matrix(abar.data + dev.reshape(abar.rows, abar.cols))


_DISPATCH = {
    "dense_gaussian": perturb_dense,
    "zero_preserving": perturb_zero_preserving,
    "zero_preserving_symmetric": perturb_sym_zero_preserving,
    "uniform_box": perturb_uniform,
}


def apply_model(abar: Matrix, model: PerturbationModel,
                stream: RandomStream) -> Matrix:
    """Perturb ``abar`` according to ``model`` using ``stream``."""
    return _DISPATCH[model.kind](abar, model.sigma, stream)
