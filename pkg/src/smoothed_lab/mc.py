"""Monte Carlo experiments over perturbed matrices, with bound verdicts.

An experiment fixes a base matrix, a perturbation model, and a statistic;
trial i perturbs the base using the stream derived from (seed, i), so runs
are bitwise reproducible and trials are order-independent.  Survival
probabilities carry Wilson score intervals, and a bound check passes exactly
when the interval's lower limit does not exceed the (clamped) bound value,
so a true bound fails with probability at most 1 - confidence per threshold.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from statistics import NormalDist

import numpy as np

from . import bounds
from .matlin import (DegeneratePivot, Matrix, SingularMatrix,
                     condition_number, growth_factors, lu_nopivot, lu_partial,
                     smallest_singular)
from .perturb import PerturbationModel, apply_model, derive_stream

__all__ = [
    "STATISTICS",
    "GALLERY_BASES",
    "THREADS_ENV_VAR",
    "ConfigInvalid",
    "BaseMatrixUnavailable",
    "EmptySamples",
    "BaseSpec",
    "ExperimentConfig",
    "ExperimentRun",
    "SurvivalEstimate",
    "BoundVerdict",
    "run_experiment",
    "survival_with_ci",
    "check_against_bound",
    "mean_with_ci",
]

STATISTICS = ("kappa", "inv_norm", "rho_l", "rho_u", "rho_max",
              "rho_l_pp", "rho_u_pp")

GALLERY_BASES = ("bidiagonal", "symmetric_embedding", "growth")

THREADS_ENV_VAR = "SMOOTHED_LAB_THREADS"


class ConfigInvalid(ValueError):
    """The experiment configuration is internally inconsistent."""


class BaseMatrixUnavailable(RuntimeError):
    """The configured base matrix could not be loaded."""


class EmptySamples(ValueError):
    """A reduction was asked for on an empty sample list."""


@dataclass(frozen=True)
class BaseSpec:
    """Where the unperturbed matrix comes from: zeros, a file, or the gallery."""

    kind: str
    path: str | None = None
    name: str | None = None

    def __post_init__(self):
        if self.kind not in ("zero", "file", "gallery"):
            raise ConfigInvalid(f"unknown base kind {self.kind!r}")
        if self.kind == "file" and not self.path:
            raise ConfigInvalid("file base requires a path")
        if self.kind == "gallery" and self.name not in GALLERY_BASES:
            raise ConfigInvalid(f"gallery base requires a name from {GALLERY_BASES}")

    @classmethod
    def parse(cls, text: str) -> "BaseSpec":
        """Parse the command-line syntax zero | file:PATH | gallery:NAME."""
        if text == "zero":
            return cls("zero")
        if text.startswith("file:"):
            return cls("file", path=text[5:])
        if text.startswith("gallery:"):
            return cls("gallery", name=text[8:].replace("-", "_"))
        raise ConfigInvalid(f"cannot parse base spec {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """One reproducible tail experiment."""

    statistic: str
    model: PerturbationModel
    base: BaseSpec
    n: int | None
    trials: int
    seed: int
    thresholds: tuple[float, ...] = ()

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ConfigInvalid(f"unknown statistic {self.statistic!r}")
        if not isinstance(self.model, PerturbationModel):
            raise ConfigInvalid("model must be a PerturbationModel")
        if not isinstance(self.base, BaseSpec):
            raise ConfigInvalid("base must be a BaseSpec")
        if self.n is None:
            if self.base.kind != "file":
                raise ConfigInvalid("n may be omitted only for file bases")
        elif not isinstance(self.n, int) or self.n < 1:
            raise ConfigInvalid("n must be a positive integer")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigInvalid("trials must be a positive integer")
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        ts = self.thresholds
        if not ts:
            raise ConfigInvalid("at least one threshold is required")
        if any(not math.isfinite(t) or t <= 0.0 for t in ts):
            raise ConfigInvalid("thresholds must be positive finite reals")
        if any(a >= b for a, b in zip(ts, ts[1:])):
            raise ConfigInvalid("thresholds must be strictly ascending")


@dataclass(frozen=True)
class ExperimentRun:
    """Statistic samples in trial order plus the count of degenerate trials.

    Trials where elimination broke down (DegeneratePivot, or SingularMatrix
    for spectral statistics) are excluded from ``samples`` and counted in
    ``failures``; survival denominators use the surviving trials only.
    """

    samples: tuple[float, ...]
    failures: int


@dataclass(frozen=True)
class SurvivalEstimate:
    """Empirical P[statistic >= x] with a Wilson score interval."""

    x: float
    count: int
    trials: int
    p_hat: float
    ci_low: float
    ci_high: float
    confidence: float


@dataclass(frozen=True)
class BoundVerdict:
    """One threshold row of a bound check.

    ``x`` is the statistic-space threshold; for rho_u bound kinds the bound
    itself was evaluated at x - 1 per the stated tail convention.
    ``bound_value`` is clamped to at most 1.  ``margin`` is bound_value minus
    the interval's lower limit, nonnegative exactly when the row passes.
    """

    x: float
    estimate: SurvivalEstimate
    bound_value: float
    passed: bool
    margin: float


def resolve_base(cfg: ExperimentConfig) -> Matrix:
    """Load the configured base matrix and check dimensional consistency."""
    if cfg.base.kind == "zero":
        return Matrix(np.zeros((cfg.n, cfg.n)))
    if cfg.base.kind == "gallery":
        from . import gallery
        builders = {
            "bidiagonal": gallery.bidiagonal_example,
            "symmetric_embedding": gallery.symmetric_embedding_example,
            "growth": gallery.growth_example,
        }
        try:
            return builders[cfg.base.name](cfg.n)
        except gallery.DimensionInvalid as exc:
            raise ConfigInvalid(str(exc)) from exc
    from . import cli
    try:
        m = cli.parse_matrix_file(cfg.base.path)
    except OSError as exc:
        raise BaseMatrixUnavailable(f"cannot read {cfg.base.path}: {exc}") from exc
    except cli.ParseError as exc:
        raise BaseMatrixUnavailable(f"cannot parse {cfg.base.path}: {exc}") from exc
    if not m.square:
        raise ConfigInvalid(f"base matrix must be square, got {m.rows}x{m.cols}")
    if cfg.n is not None and m.rows != cfg.n:
        raise ConfigInvalid(f"base matrix is {m.rows}x{m.rows} but n={cfg.n}")
    return m


def _statistic_value(name: str, m: Matrix) -> float:
    if name == "kappa":
        return condition_number(m)
    if name == "inv_norm":
        return smallest_singular(m)[1]
    if name in ("rho_l", "rho_u", "rho_max"):
        rep = growth_factors(m, lu_nopivot(m))
        return getattr(rep, name)
    # partial-pivoting variants
    rep = growth_factors(m, lu_partial(m))
    return getattr(rep, name[:-3])


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigInvalid(f"{THREADS_ENV_VAR} must be an integer, "
                            f"got {raw!r}") from exc
    return max(1, value)


def run_experiment(cfg: ExperimentConfig) -> ExperimentRun:
    """Run all trials of ``cfg`` and collect the statistic samples.

    Results are identical whatever the worker count: trial i depends only on
    (seed, i) and samples are gathered in trial order before any reduction.
    """
    abar = resolve_base(cfg)
    if cfg.model.kind == "zero_preserving_symmetric" and not np.array_equal(
            abar.data, abar.data.T):
        raise ConfigInvalid("zero_preserving_symmetric model requires a "
                            "symmetric base matrix")

    def one(i: int) -> float | None:
        stream = derive_stream(cfg.seed, i)
        m = apply_model(abar, cfg.model, stream)
        try:
            return _statistic_value(cfg.statistic, m)
        except (DegeneratePivot, SingularMatrix):
            return None

    workers = _worker_count()
    if workers == 1:
        values = [one(i) for i in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, range(cfg.trials)))
    samples = tuple(v for v in values if v is not None)
    return ExperimentRun(samples=samples, failures=cfg.trials - len(samples))


def _z_score(confidence: float) -> float:
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie strictly between 0 and 1")
    return NormalDist().inv_cdf(0.5 + confidence / 2.0)


def wilson_interval(count: int, trials: int, confidence: float) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise EmptySamples("interval needs at least one trial")
    if not 0 <= count <= trials:
        raise ValueError("count must lie in [0, trials]")
    z = _z_score(confidence)
    p = count / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials
                                   + z * z / (4.0 * trials * trials))
    # at the edges center and half agree mathematically; cancellation noise
    # must not leak in, so pin the exact limits
    low = 0.0 if count == 0 else max(0.0, center - half)
    high = 1.0 if count == trials else min(1.0, center + half)
    return low, high


def survival_with_ci(samples, x: float, confidence: float = 0.999) -> SurvivalEstimate:
    """Empirical survival P[sample >= x] with its Wilson interval."""
    seq = list(samples)
    if not seq:
        raise EmptySamples("survival estimate needs at least one sample")
    count = sum(1 for s in seq if s >= x)
    low, high = wilson_interval(count, len(seq), confidence)
    return SurvivalEstimate(x=float(x), count=count, trials=len(seq),
                            p_hat=count / len(seq), ci_low=low, ci_high=high,
                            confidence=confidence)


def check_against_bound(samples, bound_kind: str, params: bounds.BoundParams,
                        thresholds, confidence: float = 0.999) -> list[BoundVerdict]:
    """Compare empirical survival at each threshold against a tail bound.

    For rho_u bound kinds a threshold t is translated to bound argument
    t - 1; other kinds use t directly.  The ``x`` stored in ``params`` is
    ignored in favor of the per-threshold argument.  A row passes when the
    Wilson lower limit stays at or below min(1, bound).
    """
    shift = bounds.threshold_shift(bound_kind)
    verdicts = []
    for t in thresholds:
        arg = float(t) - shift
        value = bounds.evaluate_tail_bound(bound_kind, replace(params, x=arg))
        capped = min(1.0, value)
        est = survival_with_ci(samples, float(t), confidence)
        passed = est.ci_low <= capped
        verdicts.append(BoundVerdict(x=float(t), estimate=est,
                                     bound_value=capped, passed=passed,
                                     margin=capped - est.ci_low))
    return verdicts


def mean_with_ci(samples, confidence: float = 0.999) -> tuple[float, float]:
    """Sample mean and normal-approximation half-width.

    Sums are compensated (math.fsum) in the given order, so the result does
    not depend on how trials were scheduled.
    """
    seq = [float(s) for s in samples]
    if not seq:
        raise EmptySamples("mean estimate needs at least one sample")
    n = len(seq)
    mean = math.fsum(seq) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((s - mean) ** 2 for s in seq) / (n - 1)
    half = _z_score(confidence) * math.sqrt(var / n)
    return mean, half
