"""Closed-form tail bounds and precision estimates for perturbed elimination.

Each function evaluates one proved inequality as stated, without clamping:
callers comparing against probabilities are expected to cap values at 1.
Three families:

* ``bound_condition`` - tails of the condition number, the inverse norm,
  and the operator-norm deviation of a Gaussian-perturbed matrix;
* ``bound_growth`` - tails of the elimination growth factors, plus two
  vector-level bounds they are assembled from;
* ``precision_bits`` / ``appendix_bound`` - bit-precision estimates and the
  scalar tail/expectation facts the larger arguments are built on.

Tail-bound conventions: growth tails for the upper factor are stated for the
event ``rho_u > 1 + x`` while every other kind is stated for ``value > x``;
``threshold_shift`` exposes that convention so callers can translate a
statistic-space threshold into the bound argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PreconditionViolated",
    "DomainViolated",
    "BoundParams",
    "PrecisionParams",
    "COEFFICIENTS",
    "SYM_RHO_U_EXPONENT",
    "CONDITION_KINDS",
    "GROWTH_KINDS",
    "PRECISION_KINDS",
    "APPENDIX_KINDS",
    "bound_condition",
    "bound_growth",
    "precision_bits",
    "appendix_bound",
    "threshold_shift",
    "evaluate_tail_bound",
]


class PreconditionViolated(ValueError):
    """A bound was evaluated outside the hypotheses it was proved under."""


class DomainViolated(ValueError):
    """An argument lies outside the region where the formula is defined."""


#: Leading numeric constants of the closed-form bounds, keyed by the bound
#: they belong to.  Values are the proved constants; reference evaluations
#: are frozen in the test suite.
COEFFICIENTS = {
    "dense_kappa": 14.1,          # condition-number tail, dense model
    "dense_invnorm": 2.35,        # inverse-norm tail with arbitrary center
    "sym_kappa": 6.0,             # condition-number tail, symmetric model
    "sym_rho_u": 2.0 / 7.0,       # upper-growth tail, symmetric model
    "sym_rho_l": 3.2,             # lower-growth tail, symmetric model
    "big_l_column": 3.2,          # single-column lower-factor tail
    "wschebor_edge": 7.0,         # edge coefficient of the alternative kappa tail
    "wilkinson_rho": 2.33,        # additive bit offset of the growth form
    "smoothed_bits": 6.83,        # additive bit offset of the expected-precision form
}

#: Exponent of n in the symmetric upper-growth tail.  The proof supports
#: n^(7/2); kept as a named constant because it is easy to mistake for 3.
SYM_RHO_U_EXPONENT = 3.5

CONDITION_KINDS = (
    "dense_kappa",
    "dense_invnorm",
    "edelman",
    "projection",
    "sym_invnorm",
    "sym_kappa",
    "wschebor",
    "norm_concentration",
)

GROWTH_KINDS = (
    "rho_u_first",
    "rho_u_second",
    "rho_l",
    "sym_rho_u",
    "sym_rho_l",
    "vector_ratio",
    "schur_vector",
)

PRECISION_KINDS = ("wilkinson_lu", "wilkinson_rho", "smoothed_expectation")

APPENDIX_KINDS = (
    "gauss_tail",
    "dist_to_plane",
    "max_gauss",
    "recip_one_norm",
    "expected_norm",
    "lin_lin",
    "log_lin",
    "lin_chi",
    "lin_log",
)

#: rho_u tails are stated for the event value > 1 + x.
_SHIFTED_KINDS = frozenset({"rho_u_first", "rho_u_second", "sym_rho_u"})

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_E_FOURTH = math.exp(4.0)


@dataclass(frozen=True)
class BoundParams:
    """Arguments of a tail bound: dimension, tail location, noise scale.

    ``norm_abar`` (2-norm of the unperturbed center) is consumed only by the
    ``wschebor`` kind; ``k_dev`` (deviation multiplier) only by
    ``norm_concentration``.
    """

    n: int
    x: float
    sigma: float
    norm_abar: float | None = None
    k_dev: float | None = None

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise PreconditionViolated("n must be a positive integer")
        if not (math.isfinite(self.x) and self.x > 0.0):
            raise PreconditionViolated("x must be a positive finite real")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise PreconditionViolated("sigma must be a positive finite real")
        if self.norm_abar is not None and not (
                math.isfinite(self.norm_abar) and self.norm_abar >= 0.0):
            raise PreconditionViolated("norm_abar must be finite and nonnegative")
        if self.k_dev is not None and not (
                math.isfinite(self.k_dev) and self.k_dev >= 0.0):
            raise PreconditionViolated("k_dev must be finite and nonnegative")


@dataclass(frozen=True)
class PrecisionParams:
    """Arguments of the precision estimates.

    ``wilkinson_lu`` uses b, n, kappa and norm_ratio; ``wilkinson_rho`` uses
    b, n, kappa and the growth factors; ``smoothed_expectation`` uses b, n
    and sigma only.  Unused fields may be left at their defaults.
    """

    b: int
    n: int
    kappa: float = 1.0
    rho_l: float = 1.0
    rho_u: float = 1.0
    norm_ratio: float | None = None
    sigma: float | None = None

    def __post_init__(self):
        if not isinstance(self.b, int) or isinstance(self.b, bool) or self.b < 0:
            raise PreconditionViolated("b must be a nonnegative integer")
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise PreconditionViolated("n must be a positive integer")
        if not (math.isfinite(self.kappa) and self.kappa >= 1.0):
            raise PreconditionViolated("kappa must be finite and >= 1")
        if not (math.isfinite(self.rho_l) and self.rho_l >= 1.0):
            raise PreconditionViolated("rho_l must be finite and >= 1")
        if not (math.isfinite(self.rho_u) and self.rho_u > 0.0):
            raise PreconditionViolated("rho_u must be finite and positive")
        if self.norm_ratio is not None and not (
                math.isfinite(self.norm_ratio) and self.norm_ratio > 0.0):
            raise PreconditionViolated("norm_ratio must be finite and positive")
        if self.sigma is not None and not (
                math.isfinite(self.sigma) and self.sigma > 0.0):
            raise PreconditionViolated("sigma must be finite and positive")


def _require_sigma_le_one(kind: str, p: BoundParams) -> None:
    if p.sigma > 1.0:
        raise PreconditionViolated(f"{kind} is proved for sigma <= 1")


def _kappa_shape(n: int, x: float) -> float:
    # shared shape factor of both condition-number tails; needs x >= 1
    return 1.0 + math.sqrt(2.0 * math.log(x) / (9.0 * n))


def _log_mix(n: int) -> float:
    # sqrt(2 ln m) + 1/(sqrt(2 pi) ln m) with m = max(n, 2): the tail scale
    # of the largest of m standard Gaussians
    m = max(n, 2)
    ln = math.log(m)
    return math.sqrt(2.0 * ln) + 1.0 / (_SQRT_2PI * ln)


def bound_condition(kind: str, p: BoundParams) -> float:
    """Tail bounds on condition number / inverse norm, by kind.

    dense_kappa        P[kappa > x] under dense noise; sigma <= 1, x >= 1,
                       documented for center 2-norm at most sqrt(n)
    dense_invnorm      P[inv_norm > x], any center; 2.35 * edelman
    edelman            P[inv_norm > x] for a centered Gaussian matrix
    projection         P[norm of A^-1 v > x] for any fixed unit v
    sym_invnorm        symmetric sparse model; sigma <= 1
    sym_kappa          symmetric sparse model; sigma <= 1, x >= 1
    wschebor           alternative kappa tail; needs norm_abar, sigma <= 1
    norm_concentration P[2-norm deviation >= sigma (2 sqrt(n) + k)]; needs k_dev
    """
    n, x, sigma = p.n, p.x, p.sigma
    if kind == "dense_kappa":
        _require_sigma_le_one(kind, p)
        if x < 1.0:
            raise PreconditionViolated("dense_kappa is proved for x >= 1")
        if p.norm_abar is not None and p.norm_abar > math.sqrt(n):
            raise PreconditionViolated("dense_kappa assumes center 2-norm <= sqrt(n)")
        return COEFFICIENTS["dense_kappa"] * n * _kappa_shape(n, x) / (x * sigma)
    if kind == "dense_invnorm":
        return COEFFICIENTS["dense_invnorm"] * (math.sqrt(n) / (x * sigma))
    if kind == "edelman":
        return math.sqrt(n) / (x * sigma)
    if kind == "projection":
        return _SQRT_2_OVER_PI / (x * sigma)
    if kind == "sym_invnorm":
        _require_sigma_le_one(kind, p)
        return _SQRT_2_OVER_PI * n ** 1.5 / (x * sigma)
    if kind == "sym_kappa":
        _require_sigma_le_one(kind, p)
        if x < 1.0:
            raise PreconditionViolated("sym_kappa is proved for x >= 1")
        return (COEFFICIENTS["sym_kappa"] * _SQRT_2_OVER_PI * n ** SYM_RHO_U_EXPONENT
                * _kappa_shape(n, x) / (x * sigma))
    if kind == "wschebor":
        _require_sigma_le_one(kind, p)
        if p.norm_abar is None:
            raise PreconditionViolated("wschebor requires norm_abar")
        edge = math.sqrt(5.0 + 4.0 * p.norm_abar ** 2 * (1.0 + math.log(n))
                         / (sigma * sigma * n))
        return (n / x) * (1.0 / (4.0 * math.sqrt(2.0 * math.pi * n))
                          + COEFFICIENTS["wschebor_edge"] * edge)
    if kind == "norm_concentration":
        if p.k_dev is None:
            raise PreconditionViolated("norm_concentration requires k_dev")
        return math.exp(-p.k_dev ** 2 / 2.0)
    raise PreconditionViolated(f"unknown condition bound kind {kind!r}")


def bound_growth(kind: str, p: BoundParams) -> float:
    """Tail bounds on elimination growth, by kind.

    rho_u_first   P[rho_u > 1 + x], first (row-sum) argument
    rho_u_second  P[rho_u > 1 + x], second argument; n >= 2
    rho_l         P[rho_l > x]; n >= 2
    sym_rho_u     P[rho_u > 1 + x], symmetric sparse model
    sym_rho_l     P[rho_l > x], symmetric sparse model; n >= 2 and
                  x >= sqrt(2/pi) / sigma^2
    vector_ratio  P[ratio of a perturbed vector pair > x] (building block)
    schur_vector  P[norm of C^-1 b > x] for independently perturbed C, b
    """
    if kind not in GROWTH_KINDS:
        raise PreconditionViolated(f"unknown growth bound kind {kind!r}")
    n, x, sigma = p.n, p.x, p.sigma
    _require_sigma_le_one(kind, p)
    if kind == "rho_u_first":
        return n * (n + 1) / (_SQRT_2PI * x * sigma)
    if kind == "rho_u_second":
        if n < 2:
            raise PreconditionViolated("rho_u_second requires n >= 2")
        return (_SQRT_2_OVER_PI / x) * ((2.0 / 3.0) * n ** 1.5 + n / sigma
                                        + (4.0 / 3.0) * math.sqrt(n) / (sigma * sigma))
    if kind == "rho_l":
        if n < 2:
            raise PreconditionViolated("rho_l requires n >= 2")
        ln = math.log(n)
        return (_SQRT_2_OVER_PI * n * n / x) * (math.sqrt(2.0) / sigma
                                                + math.sqrt(2.0 * ln)
                                                + 1.0 / (_SQRT_2PI * ln))
    if kind == "sym_rho_u":
        return (COEFFICIENTS["sym_rho_u"] * _SQRT_2_OVER_PI
                * n ** SYM_RHO_U_EXPONENT / (x * sigma))
    if kind == "sym_rho_l":
        if n < 2:
            raise PreconditionViolated("sym_rho_l requires n >= 2")
        floor = _SQRT_2_OVER_PI / (sigma * sigma)
        if x < floor:
            raise DomainViolated(f"sym_rho_l is defined for x >= {floor:.6g}")
        body = math.log(math.e * math.sqrt(math.pi / 2.0) * x * sigma * sigma)
        return (COEFFICIENTS["sym_rho_l"] * n ** 4 / (x * sigma * sigma)
                * body ** 1.5)
    if kind == "vector_ratio":
        return (_SQRT_2_OVER_PI / x) * (math.sqrt(2.0) / sigma + _log_mix(n))
    # membership was checked above, so this is schur_vector
    return _SQRT_2_OVER_PI * math.sqrt(sigma * sigma * n + 1.0) / (x * sigma)


def precision_bits(kind: str, p: PrecisionParams) -> float:
    """Bits of precision sufficient for a b-bit-accurate solve, by kind.

    wilkinson_lu          b + log2(5 n kappa norm_ratio + 3)
    wilkinson_rho         growth-factor form of the same estimate
    smoothed_expectation  bound on the expected bits under dense noise;
                          requires sigma, n > e^4 and sigma <= 1/2
    """
    if kind == "wilkinson_lu":
        if p.norm_ratio is None:
            raise PreconditionViolated("wilkinson_lu requires norm_ratio")
        return p.b + math.log2(5.0 * p.n * p.kappa * p.norm_ratio + 3.0)
    if kind == "wilkinson_rho":
        return (COEFFICIENTS["wilkinson_rho"] + p.b + math.log2(p.n)
                + math.log2(p.rho_l) + max(0.0, math.log2(p.rho_u))
                + math.log2(p.kappa))
    if kind == "smoothed_expectation":
        if p.sigma is None:
            raise PreconditionViolated("smoothed_expectation requires sigma")
        if p.n <= _E_FOURTH:
            raise PreconditionViolated("smoothed_expectation requires n > e^4")
        if p.sigma > 0.5:
            raise PreconditionViolated("smoothed_expectation requires sigma <= 1/2")
        return (p.b + 5.5 * math.log2(p.n) + 3.0 * math.log2(1.0 / p.sigma)
                + math.log2(1.0 + 2.0 * math.sqrt(p.n) * p.sigma)
                + 0.5 * math.log2(math.log2(p.n))
                + COEFFICIENTS["smoothed_bits"])
    raise PreconditionViolated(f"unknown precision kind {kind!r}")


def _need(params: dict, kind: str, *names: str) -> list[float]:
    vals = []
    for name in names:
        if name not in params or params[name] is None:
            raise PreconditionViolated(f"{kind} requires parameter {name!r}")
        vals.append(params[name])
    return vals


def appendix_bound(kind: str, params: dict | None = None, **kw) -> float:
    """Scalar tail/expectation facts used inside the larger bounds.

    gauss_tail      P[N(0,1) >= k] bound, k >= 1; param k
    dist_to_plane   small-ball bound sqrt(2/pi) eps / sigma; params eps, sigma
    max_gauss       bound on E[max |g_i|] over n Gaussians; param n
    recip_one_norm  E[1 / one-norm of an n-vector] <= 2/(n sigma); params n, sigma
    expected_norm   E[2-norm of a centered Gaussian matrix] <= 2 sqrt(n) sigma
    lin_lin         product of two reciprocal-linear tails; params alpha, beta, x
    log_lin         reciprocal-linear-with-log times reciprocal-linear;
                    params alpha >= 1, beta, gamma, sigma, x >= gamma/sigma^2
    lin_chi         reciprocal-linear times a vector-norm factor;
                    params alpha, d, sigma, t, x
    lin_log         E[max(0, ln A)] <= ln(max(a0, alpha)) + 1; params a0, alpha
    """
    merged = dict(params or {})
    merged.update(kw)
    if kind == "gauss_tail":
        (k,) = _need(merged, kind, "k")
        if k < 1.0:
            raise DomainViolated("gauss_tail holds for k >= 1")
        return math.exp(-k * k / 2.0) / (k * _SQRT_2PI)
    if kind == "dist_to_plane":
        eps, sigma = _need(merged, kind, "eps", "sigma")
        if eps < 0.0 or sigma <= 0.0:
            raise DomainViolated("dist_to_plane needs eps >= 0 and sigma > 0")
        return _SQRT_2_OVER_PI * eps / sigma
    if kind == "max_gauss":
        (n,) = _need(merged, kind, "n")
        if n < 1:
            raise DomainViolated("max_gauss needs n >= 1")
        return _log_mix(int(n))
    if kind == "recip_one_norm":
        n, sigma = _need(merged, kind, "n", "sigma")
        if n < 2:
            raise DomainViolated("recip_one_norm holds for n >= 2")
        if sigma <= 0.0:
            raise DomainViolated("recip_one_norm needs sigma > 0")
        return 2.0 / (n * sigma)
    if kind == "expected_norm":
        n, sigma = _need(merged, kind, "n", "sigma")
        if n < 1 or sigma < 0.0:
            raise DomainViolated("expected_norm needs n >= 1 and sigma >= 0")
        return 2.0 * math.sqrt(n) * sigma
    if kind == "lin_lin":
        alpha, beta, x = _need(merged, kind, "alpha", "beta", "x")
        if alpha <= 0.0 or beta <= 0.0 or x <= 0.0:
            raise DomainViolated("lin_lin needs positive alpha, beta, x")
        ab = alpha * beta
        return (ab / x) * (1.0 + max(0.0, math.log(x / ab)))
    if kind == "log_lin":
        alpha, beta, gamma, sigma, x = _need(merged, kind, "alpha", "beta",
                                             "gamma", "sigma", "x")
        if alpha < 1.0 or beta < 0.0 or gamma <= 0.0 or sigma <= 0.0:
            raise DomainViolated("log_lin needs alpha >= 1, beta >= 0, "
                                 "gamma > 0, sigma > 0")
        if x < gamma / (sigma * sigma):
            raise DomainViolated("log_lin is defined for x >= gamma / sigma^2")
        body = math.log(x * sigma * sigma / gamma)
        return (alpha * gamma / (x * sigma * sigma)) * (
            1.0 + (2.0 * beta / (3.0 * alpha) + 1.0) * body ** 1.5)
    if kind == "lin_chi":
        alpha, d, sigma, t, x = _need(merged, kind, "alpha", "d", "sigma",
                                      "t", "x")
        if alpha <= 0.0 or d < 1 or sigma < 0.0 or t < 0.0 or x <= 0.0:
            raise DomainViolated("lin_chi needs alpha > 0, d >= 1, sigma >= 0, "
                                 "t >= 0, x > 0")
        return alpha * math.sqrt(sigma * sigma * d + t * t) / x
    if kind == "lin_log":
        a0, alpha = _need(merged, kind, "a0", "alpha")
        if a0 < 1.0 or alpha < 1.0:
            raise DomainViolated("lin_log needs a0 >= 1 and alpha >= 1")
        return math.log(max(a0, alpha)) + 1.0
    raise PreconditionViolated(f"unknown appendix bound kind {kind!r}")


def threshold_shift(kind: str) -> float:
    """Offset between statistic threshold t and bound argument x.

    Returns 1.0 for the rho_u tails (stated for value > 1 + x, so x = t - 1)
    and 0.0 for every other kind.
    """
    return 1.0 if kind in _SHIFTED_KINDS else 0.0


def evaluate_tail_bound(kind: str, p: BoundParams) -> float:
    """Evaluate any condition or growth tail bound by kind name."""
    if kind in CONDITION_KINDS:
        return bound_condition(kind, p)
    if kind in GROWTH_KINDS:
        return bound_growth(kind, p)
    raise PreconditionViolated(f"unknown tail bound kind {kind!r}")
