"""Acceptance battery: end-to-end statistical checks with frozen seeds.

Each criterion returns (passed, detail).  Seeds are fixed so the battery is
deterministic; thresholds and tolerances come from the checked statements
themselves, with Monte Carlo confidence 0.999 throughout.
"""

from __future__ import annotations

import contextlib
import io
import math
import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from . import gallery, lemmalab, mc, streams
from .bounds import BoundParams, PrecisionParams, precision_bits
from .matlin import (DegeneratePivot, Matrix, SingularMatrix,
                     condition_number, growth_factors, lu_nopivot, lu_partial)
from .perturb import PerturbationModel, apply_model, derive_stream

__all__ = ["CriterionResult", "run_all"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float


def _all_verdicts_pass(verdicts) -> tuple[bool, float]:
    worst = min(v.margin for v in verdicts)
    return all(v.passed for v in verdicts), worst


def criterion_1():
    """Inverse-norm tail of a centered Gaussian matrix vs both closed forms."""
    cfg = mc.ExperimentConfig(
        statistic="inv_norm",
        model=PerturbationModel("dense_gaussian", 1.0),
        base=mc.BaseSpec("zero"), n=50, trials=20000, seed=101,
        thresholds=(10.0, 20.0, 50.0, 100.0, 200.0))
    run = mc.run_experiment(cfg)
    params = BoundParams(n=50, x=1.0, sigma=1.0)
    verdicts = (mc.check_against_bound(run.samples, "edelman", params,
                                       cfg.thresholds)
                + mc.check_against_bound(run.samples, "dense_invnorm", params,
                                         cfg.thresholds))
    ok, worst = _all_verdicts_pass(verdicts)
    return ok, (f"{len(verdicts)} verdicts, min margin {worst:.4f}, "
                f"excluded {run.failures}")


def criterion_2():
    """Condition-number tail with a shifted center of 2-norm sqrt(n)."""
    n = 50
    rng = streams.RandomStream(202, 0)
    q, _ = np.linalg.qr(rng.gaussians(n * n).reshape(n, n))
    abar = Matrix(math.sqrt(float(n)) * q)
    from . import cli
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "center.txt")
        cli.write_matrix_file(abar, path)
        cfg = mc.ExperimentConfig(
            statistic="kappa",
            model=PerturbationModel("dense_gaussian", 0.5),
            base=mc.BaseSpec("file", path=path), n=n, trials=10000, seed=203,
            thresholds=(1.0e3, 1.0e4, 1.0e5))
        run = mc.run_experiment(cfg)
    params = BoundParams(n=n, x=1.0, sigma=0.5)
    verdicts = mc.check_against_bound(run.samples, "dense_kappa", params,
                                      cfg.thresholds)
    ok, worst = _all_verdicts_pass(verdicts)
    return ok, (f"{len(verdicts)} verdicts, min margin {worst:.4f}, "
                f"excluded {run.failures}")


def criterion_3():
    """Growth-factor tails for elimination without pivoting, dense noise."""
    model = PerturbationModel("dense_gaussian", 1.0)
    params = BoundParams(n=50, x=1.0, sigma=1.0)
    cfg_u = mc.ExperimentConfig(
        statistic="rho_u", model=model, base=mc.BaseSpec("zero"), n=50,
        trials=10000, seed=303, thresholds=(11.0, 101.0, 1001.0))
    run_u = mc.run_experiment(cfg_u)
    verdicts = (mc.check_against_bound(run_u.samples, "rho_u_first", params,
                                       cfg_u.thresholds)
                + mc.check_against_bound(run_u.samples, "rho_u_second", params,
                                         cfg_u.thresholds))
    cfg_l = mc.ExperimentConfig(
        statistic="rho_l", model=model, base=mc.BaseSpec("zero"), n=50,
        trials=10000, seed=304, thresholds=(100.0, 1000.0, 10000.0))
    run_l = mc.run_experiment(cfg_l)
    verdicts += mc.check_against_bound(run_l.samples, "rho_l", params,
                                       cfg_l.thresholds)
    ok, worst = _all_verdicts_pass(verdicts)
    return ok, (f"{len(verdicts)} verdicts, min margin {worst:.4f}, excluded "
                f"{run_u.failures + run_l.failures}")


def criterion_4():
    """Symmetric sparse model: condition and growth tails on one base."""
    n = 20
    base = np.zeros((n, n))
    idx = np.arange(n - 1)
    base[idx, idx] = 2.0
    base[idx + 1, idx + 1] = 2.0
    base[idx, idx + 1] = -1.0
    base[idx + 1, idx] = -1.0
    abar = Matrix(base / 4.0)
    model = PerturbationModel("zero_preserving_symmetric", 0.1)
    plan = (
        ("kappa", "sym_kappa", (1.0e6, 1.0e7), 404),
        ("inv_norm", "sym_invnorm", (1.0e3, 5.0e3), 405),
        ("rho_u", "sym_rho_u", (1.0e5 + 1.0, 1.0e6 + 1.0), 406),
        ("rho_l", "sym_rho_l", (100.0, 1000.0), 407),
    )
    from . import cli
    params = BoundParams(n=n, x=1.0, sigma=0.1)
    verdicts = []
    excluded = 0
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "tridiagonal.txt")
        cli.write_matrix_file(abar, path)
        for statistic, kind, thresholds, seed in plan:
            cfg = mc.ExperimentConfig(
                statistic=statistic, model=model,
                base=mc.BaseSpec("file", path=path), n=n, trials=10000,
                seed=seed, thresholds=thresholds)
            run = mc.run_experiment(cfg)
            excluded += run.failures
            verdicts += mc.check_against_bound(run.samples, kind, params,
                                               thresholds)
    ok, worst = _all_verdicts_pass(verdicts)
    return ok, (f"{len(verdicts)} verdicts, min margin {worst:.4f}, "
                f"excluded {excluded}")


def criterion_5():
    """Deterministic precision formula value, and the sampled bit count."""
    target = precision_bits("smoothed_expectation",
                            PrecisionParams(b=24, n=100, sigma=0.25))
    ok_value = abs(target - 77.32) <= 0.01
    q, _ = np.linalg.qr(streams.RandomStream(1505, 0).gaussians(10000)
                        .reshape(100, 100))
    abar = Matrix(q)
    model = PerturbationModel("dense_gaussian", 0.25)
    bits = []
    skipped = 0
    for i in range(2000):
        a = apply_model(abar, model, derive_stream(505, i))
        try:
            rep = growth_factors(a, lu_nopivot(a))
            kappa = condition_number(a)
        except (DegeneratePivot, SingularMatrix):
            skipped += 1
            continue
        bits.append(precision_bits(
            "wilkinson_rho",
            PrecisionParams(b=24, n=100, kappa=kappa,
                            rho_l=max(1.0, rep.rho_l), rho_u=rep.rho_u)))
    mean, _ = mc.mean_with_ci(bits)
    ok_mean = mean <= target + 1.0
    return ok_value and ok_mean, (
        f"formula {target:.5f} (target 77.32 +- 0.01), sampled mean "
        f"{mean:.2f} <= {target + 1.0:.2f}, skipped {skipped}")


_MATRIX_LEMMAS = frozenset({"projection", "schur_vector", "bigLk"})


def criterion_6():
    """Every lemma check over its parameter grid, plus the tightness witness."""
    grid = []
    for k in (1.0, 1.5, 2.0, 3.0):
        grid.append(("gauss_tail", {"k": k}))
    for lam in (0.0, 1.0):
        grid.append(("dist_to_plane", {"lam": lam}))
    for n in (2, 10, 100):
        grid.append(("max_gauss", {"n": n}))
    for n in (2, 10):
        for centered in (False, True):
            grid.append(("recip_one_norm", {"n": n, "centered": centered}))
    for d in (2, 5, 20):
        for c in (0.25, 0.57, 1.0):
            grid.append(("rand_sphere", {"d": d, "c": c}))
    for lemma in ("comb_lin_lin", "comb_lin_chi", "comb_lin_log",
                  "comb_log_lin", "vector_ratio", "projection",
                  "schur_vector", "bigLk"):
        grid.append((lemma, {}))
    failures = []
    tight_gap = None
    for i, (lemma, prm) in enumerate(grid):
        trials = 10 ** 4 if lemma in _MATRIX_LEMMAS else 10 ** 6
        res = lemmalab.check_lemma(lemma, prm, trials=trials, seed=606 + i)
        if not res.passed:
            failures.append(f"{lemma} {prm}")
        if lemma == "comb_lin_lin":
            tight_gap = abs(res.observed - 2.0 / math.e)
    ok = not failures and tight_gap is not None and tight_gap <= 0.01
    detail = (f"{len(grid)} checks, tight-value gap {tight_gap:.5f}"
              if not failures else f"failed: {', '.join(failures)}")
    return ok, detail


def criterion_7():
    """Factorization identities on random matrices: reconstruction, the
    Schur-complement row, and the eliminated-column ratios."""
    sizes = (2, 3, 5, 8, 13, 21, 34, 50)
    worst_recon = worst_schur = worst_lcol = worst_inter = 0.0
    skipped = 0
    for i in range(1000):
        n = sizes[i % len(sizes)]
        a = Matrix(streams.RandomStream(707, i).gaussians(n * n).reshape(n, n))
        try:
            factors = lu_nopivot(a, record_intermediates=True)
            pp = lu_partial(a)
        except DegeneratePivot:
            skipped += 1
            continue
        scale = np.abs(a.data).max()
        recon = np.abs(factors.l.data @ factors.u.data - a.data).max()
        recon_pp = np.abs(pp.l.data @ pp.u.data - a.data[pp.perm]).max()
        worst_recon = max(worst_recon, recon / (1e-10 * n * scale),
                          recon_pp / (1e-10 * n * scale))
        k = n // 2
        lead = a.data[:k, :k]
        solved = np.linalg.solve(lead, a.data[:k, k:])
        row_oracle = a.data[k, k:] - a.data[k, :k] @ solved
        row_err = np.abs(factors.u.data[k, k:] - row_oracle).max()
        worst_schur = max(worst_schur,
                          row_err / max(np.abs(row_oracle).max(), 1e-300))
        schur = a.data[k:, k:] - a.data[k:, :k] @ solved
        inter = factors.intermediates[k][k:, k:]
        inter_err = np.abs(inter - schur).max()
        worst_inter = max(worst_inter,
                          inter_err / max(np.abs(schur).max(), 1e-300))
        if n - k > 1:
            col_oracle = schur[1:, 0] / schur[0, 0]
            col_err = np.abs(factors.l.data[k + 1:, k] - col_oracle).max()
            worst_lcol = max(worst_lcol,
                             col_err / max(np.abs(col_oracle).max(), 1e-300))
    ok = (worst_recon <= 1.0 and worst_schur <= 1e-8 and worst_lcol <= 1e-8
          and worst_inter <= 1e-8 and skipped == 0)
    return ok, (f"worst reconstruction {worst_recon:.3g} of budget, Schur row "
                f"{worst_schur:.3g}, column ratio {worst_lcol:.3g}, "
                f"intermediate {worst_inter:.3g}, skipped {skipped}")


def criterion_8():
    """Structured examples stay bad under small zero-preserving noise."""
    bid = gallery.bidiagonal_example(10)
    kappa0 = condition_number(bid)
    model = PerturbationModel("zero_preserving", 0.01)
    min_kappa = min(
        condition_number(apply_model(bid, model, derive_stream(808, i)))
        for i in range(100))
    ok_kappa = min_kappa >= kappa0 / 10.0
    gro = gallery.growth_example(10)
    rho0_np = growth_factors(gro, lu_nopivot(gro)).rho_u
    rho0_pp = growth_factors(gro, lu_partial(gro)).rho_u
    min_np = math.inf
    min_pp = math.inf
    for i in range(100):
        a = apply_model(gro, model, derive_stream(809, i))
        min_np = min(min_np, growth_factors(a, lu_nopivot(a)).rho_u)
        min_pp = min(min_pp, growth_factors(a, lu_partial(a)).rho_u)
    ok_growth = min_np >= rho0_np / 2.0 and min_pp >= rho0_pp / 2.0
    return ok_kappa and ok_growth, (
        f"min kappa {min_kappa:.1f} vs floor {kappa0 / 10.0:.1f}; min rho_u "
        f"{min_np:.2f}/{min_pp:.2f} vs floors {rho0_np / 2.0:.2f}/"
        f"{rho0_pp / 2.0:.2f}")


def criterion_9():
    """Byte-identical reports across thread counts and reruns."""
    from . import cli
    base_args = ["experiment", "--statistic", "rho_u", "--model", "dense",
                 "--n", "10", "--sigma", "1", "--trials", "200", "--seed",
                 "909", "--thresholds", "2,5,20", "--base", "zero"]
    saved = os.environ.get(mc.THREADS_ENV_VAR)
    outputs = []
    codes = []
    try:
        with tempfile.TemporaryDirectory() as tmp:
            for i, threads in enumerate(("1", "4", "1")):
                os.environ[mc.THREADS_ENV_VAR] = threads
                path = os.path.join(tmp, f"report{i}.csv")
                with contextlib.redirect_stdout(io.StringIO()):
                    codes.append(cli.dispatch(base_args + ["--out", path]))
                with open(path, "rb") as fh:
                    outputs.append(fh.read())
    finally:
        if saved is None:
            os.environ.pop(mc.THREADS_ENV_VAR, None)
        else:
            os.environ[mc.THREADS_ENV_VAR] = saved
    ok = (codes == [0, 0, 0] and outputs[0] == outputs[1]
          and outputs[0] == outputs[2])
    return ok, (f"exit codes {codes}, identical bytes "
                f"{outputs[0] == outputs[1] == outputs[2]}, "
                f"{len(outputs[0])} bytes")


_CRITERIA = (
    (1, "inverse-norm tail, dense noise", criterion_1),
    (2, "condition-number tail, shifted center", criterion_2),
    (3, "growth-factor tails, dense noise", criterion_3),
    (4, "symmetric sparse suite", criterion_4),
    (5, "precision-bit estimates", criterion_5),
    (6, "lemma battery", criterion_6),
    (7, "elimination identities", criterion_7),
    (8, "gallery robustness", criterion_8),
    (9, "report determinism", criterion_9),
)


def run_all(only=None):
    """Run the battery (or the given criterion numbers) and report results."""
    results = []
    for number, name, fn in _CRITERIA:
        if only is not None and number not in only:
            continue
        start = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CriterionResult(number=number, name=name,
                                       passed=passed, detail=detail,
                                       elapsed=time.perf_counter() - start))
    return results
