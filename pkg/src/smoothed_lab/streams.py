"""Counter-based pseudo-random streams with reproducible, splittable state.

Every 64-bit word is a pure function of (seed, trial, counter): a stream key
is derived by hashing seed and trial together, and word ``c`` of the stream is
the SplitMix64 finalizer applied to ``key + GOLDEN * c``.  Nothing here keeps
hidden state beyond the counter, so any draw can be recomputed in isolation
and trials can run in parallel without coordination.

Gaussian variates use the Box-Muller transform on consecutive counter pairs:
draw ``j`` consumes counters ``2j`` and ``2j + 1`` and only the cosine branch
is kept, so each Gaussian is itself a pure function of its counter pair.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["RandomStream"]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15  # odd; increment of the SplitMix64 sequence
_KEYMIX = 0xC2B2AE3D27D4EB4F  # odd; separates trial indices inside a seed
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U_GOLDEN = np.uint64(_GOLDEN)
_U_MIX1 = np.uint64(_MIX1)
_U_MIX2 = np.uint64(_MIX2)
_SHIFT_30 = np.uint64(30)
_SHIFT_27 = np.uint64(27)
_SHIFT_31 = np.uint64(31)
_SHIFT_11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO_POW_NEG53 = 2.0 ** -53
_TWO_PI = 2.0 * math.pi


def _mix64_int(z: int) -> int:
    """SplitMix64 finalizer on a Python integer (mod 2**64)."""
    z &= _MASK
    z ^= z >> 30
    z = (z * _MIX1) & _MASK
    z ^= z >> 27
    z = (z * _MIX2) & _MASK
    z ^= z >> 31
    return z


def _mix64(z: np.ndarray) -> np.ndarray:
    # vectorised twin of _mix64_int; uint64 arithmetic wraps mod 2**64
    z = z.copy()
    z ^= z >> _SHIFT_30
    z *= _U_MIX1
    z ^= z >> _SHIFT_27
    z *= _U_MIX2
    z ^= z >> _SHIFT_31
    return z


def _stream_key(seed: int, trial: int) -> int:
    if trial < 0:
        raise ValueError("trial index must be nonnegative")
    k = _mix64_int((seed + _GOLDEN) & _MASK)
    return _mix64_int((k + trial * _KEYMIX) & _MASK)


def _words_from_key(key: int, start: int, count: int) -> np.ndarray:
    counters = np.arange(start, start + count, dtype=np.uint64)
    return _mix64(np.uint64(key) + _U_GOLDEN * counters)


def _uniform_open_closed(words: np.ndarray) -> np.ndarray:
    """Map words to (0, 1]; never returns 0.0, safe under log()."""
    return ((words >> _SHIFT_11) + _ONE).astype(np.float64) * _TWO_POW_NEG53


def _uniform_half_open(words: np.ndarray) -> np.ndarray:
    """Map words to [0, 1)."""
    return (words >> _SHIFT_11).astype(np.float64) * _TWO_POW_NEG53


def _gaussians_from_words(words: np.ndarray) -> np.ndarray:
    u1 = _uniform_open_closed(words[0::2])
    u2 = _uniform_half_open(words[1::2])
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)


class RandomStream:
    """One addressable draw sequence, identified by (seed, trial).

    The counter advances as draws are taken; a single instance must not be
    shared across threads.  Distinct trials of the same seed give unrelated
    sequences, which is the contract parallel experiments rely on.
    """

    __slots__ = ("seed", "trial", "counter", "_key")

    def __init__(self, seed: int, trial: int):
        self.seed = seed & _MASK
        self.trial = trial
        self.counter = 0
        self._key = _stream_key(seed, trial)

    def words(self, count: int) -> np.ndarray:
        """Next ``count`` raw 64-bit words, advancing the counter by count."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        out = _words_from_key(self._key, self.counter, count)
        self.counter += count
        return out

    def uniform_open_closed(self, count: int) -> np.ndarray:
        """Uniform draws on (0, 1]; one counter each."""
        return _uniform_open_closed(self.words(count))

    def uniform_half_open(self, count: int) -> np.ndarray:
        """Uniform draws on [0, 1); one counter each."""
        return _uniform_half_open(self.words(count))

    def gaussians(self, count: int) -> np.ndarray:
        """Standard normal draws; two counters each (Box-Muller pair)."""
        return _gaussians_from_words(self.words(2 * count))


# ---------------------------------------------------------------------------
# Batched grids: draw slot d of trial t, vectorised over a trial range.
# These produce bitwise the same values a per-trial RandomStream would,
# which run_experiment-style loops and the batched lemma checks both rely on.


def _keys_for_trials(seed: int, trial0: int, n_trials: int) -> np.ndarray:
    if trial0 < 0:
        raise ValueError("trial index must be nonnegative")
    k = _mix64_int((seed + _GOLDEN) & _MASK)
    trials = np.arange(trial0, trial0 + n_trials, dtype=np.uint64)
    return _mix64(np.uint64(k) + np.uint64(_KEYMIX) * trials)


def grid_words(seed: int, trial0: int, n_trials: int, counter0: int,
               n_counters: int) -> np.ndarray:
    """Words for trials [trial0, trial0+n_trials) x counters [counter0, ...).

    Returns shape (n_trials, n_counters).
    """
    keys = _keys_for_trials(seed, trial0, n_trials)
    counters = np.arange(counter0, counter0 + n_counters, dtype=np.uint64)
    return _mix64(keys[:, None] + _U_GOLDEN * counters[None, :])


def grid_uniform_open_closed(seed: int, trial0: int, n_trials: int,
                             counter0: int, n_draws: int) -> np.ndarray:
    return _uniform_open_closed(grid_words(seed, trial0, n_trials,
                                           counter0, n_draws))


def grid_gaussians(seed: int, trial0: int, n_trials: int, counter0: int,
                   n_draws: int) -> np.ndarray:
    """Gaussian draw slots; slot d of a row uses counters (c0+2d, c0+2d+1)."""
    w = grid_words(seed, trial0, n_trials, counter0, 2 * n_draws)
    u1 = _uniform_open_closed(w[:, 0::2])
    u2 = _uniform_half_open(w[:, 1::2])
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)
