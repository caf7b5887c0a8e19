"""Monte Carlo stress tests of the scalar probability facts behind the bounds.

Each check draws from a distribution that satisfies the fact's hypotheses,
preferring laws that satisfy them with equality (exact Pareto tails, exact
inverse-CDF sampling) so the conclusion is tested as hard as possible.  All
checks are one-sided at the given confidence:

  survival facts     pass iff the Wilson lower limit <= bound
  expectation facts  pass iff sample mean - half width <= bound
  rand_sphere        pass iff the difference CI admits >= 0

Every check is deterministic given (lemma_id, params, trials, seed).  Fixed
per-check data (directions, centers) is drawn from the stream of a reserved
trial index, so it never collides with per-trial streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from . import bounds, mc, streams
from .bounds import BoundParams, COEFFICIENTS, DomainViolated, bound_condition, bound_growth
from .matlin import DegeneratePivot, Matrix, SingularMatrix, lu_nopivot, lu_partial, matrix_norm, solve_lu
from .perturb import perturb_dense, perturb_sym_zero_preserving

__all__ = [
    "LEMMA_IDS",
    "DEFAULTS",
    "UnknownLemma",
    "LemmaCheckResult",
    "sample_pareto_tail",
    "check_lemma",
]

LEMMA_IDS = (
    "gauss_tail",
    "dist_to_plane",
    "max_gauss",
    "recip_one_norm",
    "rand_sphere",
    "comb_lin_lin",
    "comb_lin_chi",
    "comb_lin_log",
    "comb_log_lin",
    "projection",
    "schur_vector",
    "vector_ratio",
    "bigLk",
)

DEFAULTS = {
    "gauss_tail": {"k": 2.0},
    "dist_to_plane": {"d": 10, "eps": 0.05, "sigma": 0.5, "lam": 0.0},
    "max_gauss": {"n": 10},
    "recip_one_norm": {"n": 10, "sigma": 1.0, "centered": False},
    "rand_sphere": {"d": 5, "c": 0.57},
    "comb_lin_lin": {"alpha": 1.0, "beta": 1.0, "x": math.e},
    "comb_lin_chi": {"alpha": 1.0, "d": 2, "sigma": 0.7, "t": 1.0, "x": 20.0},
    "comb_lin_log": {"alpha": 2.0},
    "comb_log_lin": {"alpha": 1.0, "beta": 1.0, "gamma": 1.0, "sigma": 1.0,
                     "x": math.e ** 2},
    "projection": {"n": 10, "sigma": 0.5, "x": 10.0},
    "schur_vector": {"d": 10, "sigma": 0.5, "x": 20.0},
    "vector_ratio": {"n": 10, "d": 5, "sigma": 0.5, "x": 30.0},
    "bigLk": {"n": 10, "sigma": 1.0, "k": 5, "x": 30000.0},
}

# trial index reserved for a check's fixed setup draws
_SETUP_TRIAL = (1 << 64) - 1

# target scratch size for vectorized blocks, in double-width draws
_BLOCK_BUDGET = 1 << 22


class UnknownLemma(KeyError):
    """No lemma check is registered under the requested id."""


@dataclass(frozen=True)
class LemmaCheckResult:
    """Outcome of one lemma check.

    observed is the empirical quantity on the bound's side (survival
    fraction, sample mean, or probability difference); excluded counts
    trials dropped because elimination broke down.
    """

    lemma_id: str
    trials: int
    observed: float
    bound: float
    passed: bool
    confidence: float
    params: dict
    excluded: int = 0


def sample_pareto_tail(alpha: float, stream: streams.RandomStream) -> float:
    """One draw with survival exactly P[X >= x] = min(1, alpha/x).

    Inverse CDF of the unit Pareto law scaled by alpha: support [alpha, inf).
    """
    if alpha <= 0.0:
        raise DomainViolated("pareto tail scale must be positive")
    u = stream.uniform_open_closed(1)[0]
    return alpha / u


def _z_score(confidence: float) -> float:
    if not 0.0 < confidence < 1.0:
        raise DomainViolated("confidence must lie strictly between 0 and 1")
    return NormalDist().inv_cdf(0.5 + confidence / 2.0)


def _as_int(merged: dict, name: str, minimum: int = 1) -> int:
    value = merged[name]
    if not float(value).is_integer():
        raise DomainViolated(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise DomainViolated(f"{name} must be at least {minimum}")
    return value


def _as_real(merged: dict, name: str, positive: bool = False) -> float:
    value = float(merged[name])
    if not math.isfinite(value):
        raise DomainViolated(f"{name} must be finite")
    if positive and value <= 0.0:
        raise DomainViolated(f"{name} must be positive")
    return value


def _blocks(trials: int, draws_per_trial: int):
    """Trial ranges sized so one block's scratch stays near _BLOCK_BUDGET."""
    size = max(1024, _BLOCK_BUDGET // max(1, draws_per_trial))
    t0 = 0
    while t0 < trials:
        step = min(size, trials - t0)
        yield t0, step
        t0 += step


def _setup_stream(seed: int) -> streams.RandomStream:
    return streams.RandomStream(seed, _SETUP_TRIAL)


def _unit_vector(stream: streams.RandomStream, n: int) -> np.ndarray:
    v = stream.gaussians(n)
    norm = math.sqrt(float(v @ v))
    if norm == 0.0:
        raise ArithmeticError("degenerate setup draw")
    return v / norm


def _survival_result(lemma_id, params, trials, excluded, count, bound,
                     confidence) -> LemmaCheckResult:
    kept = trials - excluded
    if kept < 1:
        raise mc.EmptySamples("every trial was excluded")
    low, _ = mc.wilson_interval(count, kept, confidence)
    return LemmaCheckResult(lemma_id=lemma_id, trials=trials,
                            observed=count / kept, bound=bound,
                            passed=low <= bound, confidence=confidence,
                            params=params, excluded=excluded)


def _mean_result(lemma_id, params, trials, samples, bound,
                 confidence) -> LemmaCheckResult:
    mean, half = mc.mean_with_ci(samples, confidence)
    return LemmaCheckResult(lemma_id=lemma_id, trials=trials, observed=mean,
                            bound=bound, passed=mean - half <= bound,
                            confidence=confidence, params=params)


def _run_gauss_tail(params, trials, seed, confidence):
    k = _as_real(params, "k")
    bound = bounds.appendix_bound("gauss_tail", k=k)
    count = 0
    for t0, size in _blocks(trials, 1):
        g = streams.grid_gaussians(seed, t0, size, 0, 1)[:, 0]
        count += int(np.count_nonzero(g >= k))
    return _survival_result("gauss_tail", params, trials, 0, count, bound,
                            confidence)


def _run_dist_to_plane(params, trials, seed, confidence):
    d = _as_int(params, "d")
    eps = _as_real(params, "eps")
    sigma = _as_real(params, "sigma", positive=True)
    lam = _as_real(params, "lam")
    bound = bounds.appendix_bound("dist_to_plane", eps=eps, sigma=sigma)
    setup = _setup_stream(seed)
    normal = _unit_vector(setup, d)
    center = setup.gaussians(d)
    count = 0
    for t0, size in _blocks(trials, d):
        g = streams.grid_gaussians(seed, t0, size, 0, d)
        dots = (center + sigma * g) @ normal
        count += int(np.count_nonzero(np.abs(dots - lam) <= eps))
    return _survival_result("dist_to_plane", params, trials, 0, count, bound,
                            confidence)


def _run_max_gauss(params, trials, seed, confidence):
    n = _as_int(params, "n")
    bound = bounds.appendix_bound("max_gauss", n=n)
    chunks = []
    for t0, size in _blocks(trials, n):
        g = streams.grid_gaussians(seed, t0, size, 0, n)
        chunks.append(np.abs(g).max(axis=1))
    samples = np.concatenate(chunks)
    return _mean_result("max_gauss", params, trials, samples, bound,
                        confidence)


def _run_recip_one_norm(params, trials, seed, confidence):
    n = _as_int(params, "n")
    sigma = _as_real(params, "sigma", positive=True)
    centered = bool(params["centered"])
    bound = bounds.appendix_bound("recip_one_norm", n=n, sigma=sigma)
    center = np.zeros(n) if centered else _setup_stream(seed).gaussians(n)
    chunks = []
    for t0, size in _blocks(trials, n):
        g = streams.grid_gaussians(seed, t0, size, 0, n)
        norms = np.abs(center + sigma * g).sum(axis=1)
        chunks.append(1.0 / norms)
    samples = np.concatenate(chunks)
    return _mean_result("recip_one_norm", params, trials, samples, bound,
                        confidence)


def _run_rand_sphere(params, trials, seed, confidence):
    d = _as_int(params, "d")
    c = _as_real(params, "c", positive=True)
    sphere_cut = math.sqrt(c / d)
    gauss_cut = math.sqrt(c)
    count_sphere = 0
    count_gauss = 0
    for t0, size in _blocks(trials, d + 1):
        g = streams.grid_gaussians(seed, t0, size, 0, d + 1)
        point = g[:, :d]
        norms = np.sqrt((point * point).sum(axis=1))
        first = np.abs(point[:, 0]) / norms
        count_sphere += int(np.count_nonzero(first >= sphere_cut))
        count_gauss += int(np.count_nonzero(np.abs(g[:, d]) >= gauss_cut))
    p1 = count_sphere / trials
    p2 = count_gauss / trials
    diff = p1 - p2
    half = _z_score(confidence) * math.sqrt(
        p1 * (1.0 - p1) / trials + p2 * (1.0 - p2) / trials)
    return LemmaCheckResult(lemma_id="rand_sphere", trials=trials,
                            observed=diff, bound=0.0,
                            passed=diff + half >= 0.0, confidence=confidence,
                            params=params)


def _run_comb_lin_lin(params, trials, seed, confidence):
    alpha = _as_real(params, "alpha", positive=True)
    beta = _as_real(params, "beta", positive=True)
    x = _as_real(params, "x", positive=True)
    bound = bounds.appendix_bound("lin_lin", alpha=alpha, beta=beta, x=x)
    count = 0
    for t0, size in _blocks(trials, 2):
        u = streams.grid_uniform_open_closed(seed, t0, size, 0, 2)
        prod = (alpha / u[:, 0]) * (beta / u[:, 1])
        count += int(np.count_nonzero(prod >= x))
    return _survival_result("comb_lin_lin", params, trials, 0, count, bound,
                            confidence)


def _run_comb_lin_chi(params, trials, seed, confidence):
    alpha = _as_real(params, "alpha", positive=True)
    d = _as_int(params, "d")
    sigma = _as_real(params, "sigma", positive=True)
    t_norm = _as_real(params, "t")
    x = _as_real(params, "x", positive=True)
    bound = bounds.appendix_bound("lin_chi", alpha=alpha, d=d, sigma=sigma,
                                  t=t_norm, x=x)
    center = t_norm * _unit_vector(_setup_stream(seed), d)
    count = 0
    for t0, size in _blocks(trials, d + 1):
        u = streams.grid_uniform_open_closed(seed, t0, size, 0, 1)[:, 0]
        g = streams.grid_gaussians(seed, t0, size, 1, d)
        b = center + sigma * g
        norms = np.sqrt((b * b).sum(axis=1))
        count += int(np.count_nonzero((alpha / u) * norms >= x))
    return _survival_result("comb_lin_chi", params, trials, 0, count, bound,
                            confidence)


def _run_comb_lin_log(params, trials, seed, confidence):
    alpha = _as_real(params, "alpha", positive=True)
    bound = bounds.appendix_bound("lin_log", a0=alpha, alpha=alpha)
    chunks = []
    for t0, size in _blocks(trials, 1):
        u = streams.grid_uniform_open_closed(seed, t0, size, 0, 1)[:, 0]
        chunks.append(np.maximum(0.0, np.log(alpha / u)))
    samples = np.concatenate(chunks)
    return _mean_result("comb_lin_log", params, trials, samples, bound,
                        confidence)


def _invert_log_linear_survival(u: np.ndarray, alpha: float, beta: float,
                                sigma: float) -> np.ndarray:
    """Solve S(y) = u for y >= 1/sigma, S(y) = (alpha + beta sqrt(ln y sigma))/(sigma y).

    S decreases from alpha at y = 1/sigma, so a root exists for u <= alpha.
    Bisection to absolute tolerance 1e-12 or float exhaustion.
    """

    def survival(y):
        return (alpha + beta * np.sqrt(np.maximum(0.0, np.log(y * sigma)))) / (sigma * y)

    lo = np.full(u.shape, 1.0 / sigma)
    hi = np.full(u.shape, 2.0 / sigma)
    above = survival(hi) >= u
    while np.any(above):
        hi = np.where(above, 2.0 * hi, hi)
        above = survival(hi) >= u
    for _ in range(128):
        mid = 0.5 * (lo + hi)
        root_above = survival(mid) >= u
        lo = np.where(root_above, mid, lo)
        hi = np.where(root_above, hi, mid)
        if np.all(hi - lo <= 1e-12):
            break
    return 0.5 * (lo + hi)


def _run_comb_log_lin(params, trials, seed, confidence):
    alpha = _as_real(params, "alpha", positive=True)
    beta = _as_real(params, "beta")
    gamma = _as_real(params, "gamma", positive=True)
    sigma = _as_real(params, "sigma", positive=True)
    x = _as_real(params, "x", positive=True)
    bound = bounds.appendix_bound("log_lin", alpha=alpha, beta=beta,
                                  gamma=gamma, sigma=sigma, x=x)
    count = 0
    for t0, size in _blocks(trials, 2):
        u = streams.grid_uniform_open_closed(seed, t0, size, 0, 2)
        a = np.where(u[:, 0] <= alpha,
                     _invert_log_linear_survival(u[:, 0], alpha, beta, sigma),
                     0.0)
        b = (gamma / sigma) / u[:, 1]
        count += int(np.count_nonzero(a * b >= x))
    return _survival_result("comb_log_lin", params, trials, 0, count, bound,
                            confidence)


def _run_projection(params, trials, seed, confidence):
    n = _as_int(params, "n")
    sigma = _as_real(params, "sigma", positive=True)
    x = _as_real(params, "x", positive=True)
    bound = bound_condition("projection", BoundParams(n=n, x=x, sigma=sigma))
    setup = _setup_stream(seed)
    raw = Matrix(setup.gaussians(n * n).reshape(n, n))
    abar = Matrix(raw.data / matrix_norm(raw, "two"))
    rhs = np.zeros(n)
    rhs[0] = 1.0
    count = 0
    excluded = 0
    for i in range(trials):
        stream = streams.RandomStream(seed, i)
        a = perturb_dense(abar, sigma, stream)
        try:
            col = solve_lu(lu_partial(a), rhs)
        except (DegeneratePivot, SingularMatrix):
            excluded += 1
            continue
        if math.sqrt(float(col @ col)) > x:
            count += 1
    return _survival_result("projection", params, trials, excluded, count,
                            bound, confidence)


def _run_schur_vector(params, trials, seed, confidence):
    d = _as_int(params, "d")
    sigma = _as_real(params, "sigma", positive=True)
    x = _as_real(params, "x", positive=True)
    bound = bound_growth("schur_vector", BoundParams(n=d, x=x, sigma=sigma))
    setup = _setup_stream(seed)
    raw = Matrix(setup.gaussians(d * d).reshape(d, d))
    cbar = Matrix(raw.data / matrix_norm(raw, "two"))
    bbar = _unit_vector(setup, d)
    count = 0
    excluded = 0
    for i in range(trials):
        stream = streams.RandomStream(seed, i)
        c = perturb_dense(cbar, sigma, stream)
        b = bbar + sigma * stream.gaussians(d)
        try:
            sol = solve_lu(lu_partial(c), b)
        except (DegeneratePivot, SingularMatrix):
            excluded += 1
            continue
        if math.sqrt(float(sol @ sol)) >= x:
            count += 1
    return _survival_result("schur_vector", params, trials, excluded, count,
                            bound, confidence)


def _run_vector_ratio(params, trials, seed, confidence):
    n = _as_int(params, "n")
    d = _as_int(params, "d")
    sigma = _as_real(params, "sigma", positive=True)
    x = _as_real(params, "x", positive=True)
    bound = bound_growth("vector_ratio", BoundParams(n=n, x=x, sigma=sigma))
    setup = _setup_stream(seed)
    a_bar = 2.0 * setup.uniform_half_open(1)[0] - 1.0
    b_bar = _unit_vector(setup, d)
    x_bar = _unit_vector(setup, n)
    raw = Matrix(setup.gaussians(n * d).reshape(n, d))
    y_bar = raw.data / matrix_norm(raw, "two")
    v = setup.gaussians(d)
    per_trial = 1 + d + n + n * d
    count = 0
    for t0, size in _blocks(trials, per_trial):
        g = streams.grid_gaussians(seed, t0, size, 0, per_trial)
        a = a_bar + sigma * g[:, 0]
        b = b_bar + sigma * g[:, 1:1 + d]
        xv = x_bar + sigma * g[:, 1 + d:1 + d + n]
        y = y_bar + sigma * g[:, 1 + d + n:].reshape(size, n, d)
        num = np.abs(xv + y @ v).max(axis=1)
        den = np.abs(a + b @ v)
        with np.errstate(divide="ignore"):
            ratio = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0),
                             np.inf)
        count += int(np.count_nonzero(ratio > x))
    return _survival_result("vector_ratio", params, trials, 0, count, bound,
                            confidence)


def _run_bigLk(params, trials, seed, confidence):
    n = _as_int(params, "n", minimum=2)
    sigma = _as_real(params, "sigma", positive=True)
    k = _as_int(params, "k")
    x = _as_real(params, "x", positive=True)
    if k > n - 1:
        raise DomainViolated("column index k must be at most n - 1")
    floor = math.sqrt(2.0 / math.pi) / (sigma * sigma)
    if x < floor:
        raise DomainViolated(f"bigLk is defined for x >= {floor:.6g}")
    body = math.log(math.e * math.sqrt(math.pi / 2.0) * x * sigma * sigma)
    bound = (COEFFICIENTS["big_l_column"] * n * n / (x * sigma * sigma)
             * body ** 1.5)
    base = np.zeros((n, n))
    idx = np.arange(n - 1)
    base[idx, idx] = 2.0
    base[idx + 1, idx + 1] = 2.0
    base[idx, idx + 1] = -1.0
    base[idx + 1, idx] = -1.0
    abar = Matrix(base / 4.0)
    count = 0
    excluded = 0
    for i in range(trials):
        stream = streams.RandomStream(seed, i)
        a = perturb_sym_zero_preserving(abar, sigma, stream)
        try:
            factors = lu_nopivot(a)
        except DegeneratePivot:
            excluded += 1
            continue
        col = factors.l.data[k:, k - 1]
        if math.sqrt(float(col @ col)) > x:
            count += 1
    return _survival_result("bigLk", params, trials, excluded, count, bound,
                            confidence)


_RUNNERS = {
    "gauss_tail": _run_gauss_tail,
    "dist_to_plane": _run_dist_to_plane,
    "max_gauss": _run_max_gauss,
    "recip_one_norm": _run_recip_one_norm,
    "rand_sphere": _run_rand_sphere,
    "comb_lin_lin": _run_comb_lin_lin,
    "comb_lin_chi": _run_comb_lin_chi,
    "comb_lin_log": _run_comb_lin_log,
    "comb_log_lin": _run_comb_log_lin,
    "projection": _run_projection,
    "schur_vector": _run_schur_vector,
    "vector_ratio": _run_vector_ratio,
    "bigLk": _run_bigLk,
}


def check_lemma(lemma_id: str, params: dict | None = None,
                trials: int = 100000, seed: int = 0,
                confidence: float = 0.999) -> LemmaCheckResult:
    """Run one lemma check and report the one-sided verdict."""
    if lemma_id not in _RUNNERS:
        raise UnknownLemma(lemma_id)
    merged = dict(DEFAULTS[lemma_id])
    for key, value in (params or {}).items():
        if key not in merged:
            raise DomainViolated(f"{lemma_id} takes no parameter {key!r}")
        merged[key] = value
    if not isinstance(trials, int) or trials < 1:
        raise DomainViolated("trials must be a positive integer")
    if not 0.0 < confidence < 1.0:
        raise DomainViolated("confidence must lie strictly between 0 and 1")
    return _RUNNERS[lemma_id](merged, trials, seed, confidence)
