"""Command-line front end: matrix file I/O, experiments, report emission.

Exit codes: 0 for success (and all verdicts passing), 1 when a requested
check fails, 2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass

import numpy as np

from . import bounds, gallery, lemmalab, mc
from .matlin import Matrix, matrix_norm
from .perturb import PerturbationModel

__all__ = [
    "ParseError",
    "DimensionMismatch",
    "Report",
    "ReportRow",
    "parse_matrix_file",
    "format_matrix",
    "write_matrix_file",
    "write_report_csv",
    "dispatch",
    "main",
]


class ParseError(ValueError):
    """Malformed matrix text; carries 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            message = f"{where}: {message}"
        super().__init__(message)


class DimensionMismatch(ParseError):
    """Row or column counts disagree with the header."""


@dataclass(frozen=True)
class ReportRow:
    """One threshold line of a report; bound is None for exploratory runs."""

    x: float
    p_hat: float
    ci_low: float
    ci_high: float
    bound: float | None
    passed: bool


@dataclass(frozen=True)
class Report:
    """Config echo plus verdict rows, ready for CSV emission."""

    header: dict
    rows: tuple
    passed: bool
    failures: int


_TOKEN = re.compile(r"\S+")


def _line_tokens(line: str):
    for m in _TOKEN.finditer(line):
        yield m.group(), m.start() + 1


def parse_matrix_file(src) -> Matrix:
    """Read the dense text format from a path, or from text containing newlines.

    Format: '#' lines are comments, the first data line is "rows cols", then
    one whitespace-separated row per line.
    """
    if isinstance(src, str) and ("\n" in src or "\r" in src):
        text = src
    else:
        with open(src, "r", encoding="utf-8") as fh:
            text = fh.read()
    shape = None
    data = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = list(_line_tokens(line))
        if shape is None:
            if len(tokens) != 2:
                raise ParseError("header must be 'rows cols'", lineno, 1)
            dims = []
            for tok, col in tokens:
                try:
                    value = int(tok)
                except ValueError:
                    raise ParseError(f"bad dimension {tok!r}", lineno,
                                     col) from None
                if value < 1:
                    raise ParseError("dimensions must be positive", lineno, col)
                dims.append(value)
            shape = (dims[0], dims[1])
            continue
        if len(data) == shape[0]:
            raise ParseError("unexpected data after the last row", lineno, 1)
        row = []
        for tok, col in tokens:
            try:
                value = float(tok)
            except ValueError:
                raise ParseError(f"bad number {tok!r}", lineno, col) from None
            if not math.isfinite(value):
                raise ParseError(f"non-finite entry {tok!r}", lineno, col)
            row.append(value)
        if len(row) != shape[1]:
            raise DimensionMismatch(
                f"expected {shape[1]} entries, found {len(row)}", lineno, 1)
        data.append(row)
    if shape is None:
        raise ParseError("no header line found")
    if len(data) != shape[0]:
        raise DimensionMismatch(f"expected {shape[0]} rows, found {len(data)}")
    return Matrix(np.array(data, dtype=np.float64))


def format_matrix(m: Matrix) -> str:
    """Dense text form; shortest round-trip decimals, so parsing is bit-exact."""
    lines = [f"{m.rows} {m.cols}"]
    for row in m.data:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_matrix_file(m: Matrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_matrix(m))


def write_report_csv(report: Report, path) -> None:
    """Emit the report; header echo as comment lines, then the column header."""
    lines = [f"# {key}={value}" for key, value in report.header.items()]
    lines.append("x,p_hat,ci_low,ci_high,bound,pass")
    for row in report.rows:
        bound = "" if row.bound is None else repr(float(row.bound))
        flag = "true" if row.passed else "false"
        lines.append(f"{float(row.x)!r},{float(row.p_hat)!r},"
                     f"{float(row.ci_low)!r},{float(row.ci_high)!r},"
                     f"{bound},{flag}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


_MODEL_ALIASES = {
    "dense": "dense_gaussian",
    "sym": "zero_preserving_symmetric",
    "symmetric": "zero_preserving_symmetric",
    "uniform": "uniform_box",
}

_PRECISION_ALIASES = {
    "wilkinson_lu": "wilkinson_lu",
    "wilkinson_rho": "wilkinson_rho",
    "smoothed": "smoothed_expectation",
    "smoothed_expectation": "smoothed_expectation",
}

# bound kind inferred from (statistic, symmetric-model flag); statistics
# without an applicable theorem default to an exploratory (bound-free) run
_DEFAULT_BOUNDS = {
    ("kappa", False): "dense_kappa",
    ("kappa", True): "sym_kappa",
    ("inv_norm", False): "dense_invnorm",
    ("inv_norm", True): "sym_invnorm",
    ("rho_u", False): "rho_u_second",
    ("rho_u", True): "sym_rho_u",
    ("rho_l", False): "rho_l",
    ("rho_l", True): "sym_rho_l",
}

_GALLERY_BUILDERS = {
    "bidiagonal": gallery.bidiagonal_example,
    "symmetric_embedding": gallery.symmetric_embedding_example,
    "growth": gallery.growth_example,
}


def _canon(name: str) -> str:
    return name.strip().replace("-", "_")


def _model_kind(raw: str) -> str:
    kind = _canon(raw)
    return _MODEL_ALIASES.get(kind, kind)


def _parse_thresholds(raw: str) -> tuple:
    try:
        return tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise mc.ConfigInvalid(f"bad thresholds list {raw!r}") from None


def _resolve_bound_kind(raw: str, statistic: str, model: PerturbationModel):
    symmetric = model.kind == "zero_preserving_symmetric"
    if raw == "auto":
        return _DEFAULT_BOUNDS.get((statistic, symmetric))
    kind = _canon(raw)
    if kind == "none":
        return None
    if kind not in bounds.CONDITION_KINDS and kind not in bounds.GROWTH_KINDS:
        raise mc.ConfigInvalid(f"unknown bound kind {kind!r}")
    if kind.startswith("sym_") and not symmetric:
        raise mc.ConfigInvalid("symmetric bounds require the symmetric model")
    return kind


def _cmd_experiment(ns) -> int:
    model = PerturbationModel(_model_kind(ns.model), ns.sigma)
    base = mc.BaseSpec.parse(ns.base)
    thresholds = _parse_thresholds(ns.thresholds)
    cfg = mc.ExperimentConfig(statistic=ns.statistic, model=model, base=base,
                              n=ns.n, trials=ns.trials, seed=ns.seed,
                              thresholds=thresholds)
    bound_kind = _resolve_bound_kind(ns.bound, ns.statistic, model)
    base_matrix = mc.resolve_base(cfg)
    run = mc.run_experiment(cfg)
    rows = []
    if bound_kind is None:
        for t in cfg.thresholds:
            est = mc.survival_with_ci(run.samples, t, ns.confidence)
            rows.append(ReportRow(x=est.x, p_hat=est.p_hat, ci_low=est.ci_low,
                                  ci_high=est.ci_high, bound=None,
                                  passed=True))
    else:
        norm_abar = (matrix_norm(base_matrix, "two")
                     if bound_kind == "wschebor" else None)
        params = bounds.BoundParams(n=base_matrix.rows, x=1.0, sigma=ns.sigma,
                                    norm_abar=norm_abar)
        for v in mc.check_against_bound(run.samples, bound_kind, params,
                                        cfg.thresholds, ns.confidence):
            rows.append(ReportRow(x=v.x, p_hat=v.estimate.p_hat,
                                  ci_low=v.estimate.ci_low,
                                  ci_high=v.estimate.ci_high,
                                  bound=v.bound_value, passed=v.passed))
    failures = sum(1 for row in rows if not row.passed)
    header = {
        "statistic": cfg.statistic,
        "model": model.kind,
        "n": base_matrix.rows,
        "sigma": repr(float(ns.sigma)),
        "trials": cfg.trials,
        "seed": cfg.seed,
        "base": ns.base,
        "bound": bound_kind or "none",
        "confidence": repr(float(ns.confidence)),
        "excluded": run.failures,
    }
    report = Report(header=header, rows=tuple(rows),
                    passed=failures == 0, failures=failures)
    for key, value in header.items():
        print(f"{key}={value}")
    for row in rows:
        bound = "-" if row.bound is None else repr(row.bound)
        status = "pass" if row.passed else "FAIL"
        print(f"x={row.x!r} p_hat={row.p_hat!r} "
              f"ci=[{row.ci_low!r},{row.ci_high!r}] bound={bound} {status}")
    print(f"result: {'PASS' if report.passed else 'FAIL'} "
          f"({failures} of {len(rows)} rows failed)")
    if ns.out:
        write_report_csv(report, ns.out)
    return 0 if report.passed else 1


def _cmd_bound(ns) -> int:
    kind = _canon(ns.kind)
    if kind in bounds.CONDITION_KINDS or kind in bounds.GROWTH_KINDS:
        missing = [flag for flag, val in
                   (("--n", ns.n), ("--x", ns.x), ("--sigma", ns.sigma))
                   if val is None]
        if missing:
            raise mc.ConfigInvalid(f"{kind} requires {' '.join(missing)}")
        params = bounds.BoundParams(n=ns.n, x=ns.x, sigma=ns.sigma,
                                    norm_abar=ns.norm_abar, k_dev=ns.k_dev)
        value = bounds.evaluate_tail_bound(kind, params)
    else:
        extra = {}
        for name in ("n", "x", "sigma", "k", "eps", "alpha", "beta", "gamma",
                     "t", "d", "a0"):
            val = getattr(ns, name)
            if val is not None:
                extra[name] = val
        value = bounds.appendix_bound(kind, extra)
    print(repr(float(value)))
    return 0


def _cmd_precision(ns) -> int:
    kind = _PRECISION_ALIASES.get(_canon(ns.kind))
    if kind is None:
        raise mc.ConfigInvalid(f"unknown precision kind {ns.kind!r}")
    params = bounds.PrecisionParams(b=ns.b, n=ns.n, kappa=ns.kappa,
                                    rho_l=ns.rho_l, rho_u=ns.rho_u,
                                    norm_ratio=ns.norm_ratio, sigma=ns.sigma)
    print(repr(float(bounds.precision_bits(kind, params))))
    return 0


def _cmd_verify_lemma(ns) -> int:
    params = {}
    for name in ("k", "n", "d", "c", "x", "alpha", "beta", "gamma", "sigma",
                 "eps", "lam", "t"):
        val = getattr(ns, name)
        if val is not None:
            params[name] = val
    if ns.centered is not None:
        params["centered"] = ns.centered == "true"
    result = lemmalab.check_lemma(ns.id, params or None, trials=ns.trials,
                                  seed=ns.seed, confidence=ns.confidence)
    status = "PASS" if result.passed else "FAIL"
    print(f"{result.lemma_id}: observed={result.observed!r} "
          f"bound={result.bound!r} trials={result.trials} "
          f"excluded={result.excluded} -> {status}")
    return 0 if result.passed else 1


def _cmd_verify_suite(ns) -> int:
    from . import suite
    only = None
    if ns.criteria:
        only = {int(part) for part in ns.criteria.split(",") if part.strip()}
    results = suite.run_all(only=only)
    all_passed = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        all_passed = all_passed and r.passed
        print(f"criterion {r.number} [{status}] {r.name}: {r.detail} "
              f"({r.elapsed:.1f}s)")
    return 0 if all_passed else 1


def _cmd_gallery(ns) -> int:
    name = _canon(ns.name)
    builder = _GALLERY_BUILDERS.get(name)
    if builder is None:
        raise mc.ConfigInvalid(f"unknown gallery matrix {ns.name!r}")
    m = builder(ns.n, normalize=ns.normalize)
    if ns.out:
        write_matrix_file(m, ns.out)
    else:
        print(format_matrix(m), end="")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothed-lab",
        description="Elimination growth and conditioning experiments on "
                    "randomly perturbed matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("experiment", help="run a Monte Carlo tail experiment")
    exp.add_argument("--statistic", required=True, choices=mc.STATISTICS)
    exp.add_argument("--model", default="dense_gaussian")
    exp.add_argument("--n", type=int, default=None)
    exp.add_argument("--sigma", type=float, required=True)
    exp.add_argument("--trials", type=int, default=1000)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--thresholds", required=True,
                     help="comma-separated ascending statistic thresholds")
    exp.add_argument("--base", default="zero",
                     help="zero | file:PATH | gallery:NAME")
    exp.add_argument("--bound", default="auto",
                     help="bound kind, 'none' for exploratory, default auto")
    exp.add_argument("--confidence", type=float, default=0.999)
    exp.add_argument("--out", default=None, help="write the report CSV here")
    exp.set_defaults(func=_cmd_experiment)

    bnd = sub.add_parser("bound", help="evaluate one closed-form bound")
    bnd.add_argument("--kind", required=True)
    for flag in ("x", "sigma", "k", "eps", "alpha", "beta", "gamma", "t",
                 "a0", "norm-abar", "k-dev"):
        bnd.add_argument(f"--{flag}", type=float, default=None,
                         dest=flag.replace("-", "_"))
    bnd.add_argument("--n", type=int, default=None)
    bnd.add_argument("--d", type=int, default=None)
    bnd.set_defaults(func=_cmd_bound)

    prec = sub.add_parser("precision", help="precision-bit estimates")
    prec.add_argument("--kind", required=True)
    prec.add_argument("--b", type=int, required=True)
    prec.add_argument("--n", type=int, required=True)
    prec.add_argument("--kappa", type=float, default=1.0)
    prec.add_argument("--rho-l", type=float, default=1.0, dest="rho_l")
    prec.add_argument("--rho-u", type=float, default=1.0, dest="rho_u")
    prec.add_argument("--norm-ratio", type=float, default=None,
                      dest="norm_ratio")
    prec.add_argument("--sigma", type=float, default=None)
    prec.set_defaults(func=_cmd_precision)

    lem = sub.add_parser("verify-lemma", help="Monte Carlo check of one lemma")
    lem.add_argument("--id", required=True)
    lem.add_argument("--trials", type=int, default=100000)
    lem.add_argument("--seed", type=int, default=0)
    lem.add_argument("--confidence", type=float, default=0.999)
    for flag in ("k", "c", "x", "alpha", "beta", "gamma", "sigma", "eps",
                 "lam", "t"):
        lem.add_argument(f"--{flag}", type=float, default=None)
    lem.add_argument("--n", type=int, default=None)
    lem.add_argument("--d", type=int, default=None)
    lem.add_argument("--centered", choices=("true", "false"), default=None)
    lem.set_defaults(func=_cmd_verify_lemma)

    ver = sub.add_parser("verify-suite", help="run the acceptance battery")
    ver.add_argument("--criteria", default=None,
                     help="comma-separated criterion numbers (default all)")
    ver.set_defaults(func=_cmd_verify_suite)

    gal = sub.add_parser("gallery", help="emit a gallery matrix")
    gal.add_argument("--name", required=True,
                     help="bidiagonal | symmetric-embedding | growth")
    gal.add_argument("--n", type=int, required=True)
    gal.add_argument("--normalize", action="store_true")
    gal.add_argument("--out", default=None)
    gal.set_defaults(func=_cmd_gallery)

    return parser


def dispatch(argv) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return ns.func(ns)
    except (ValueError, KeyError, OSError, mc.BaseMatrixUnavailable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
