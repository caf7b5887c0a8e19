"""Gaussian elimination on randomly perturbed matrices, instrumented.

The package factors matrices with and without pivoting while tracking growth
factors and condition numbers, evaluates closed-form tail bounds for those
quantities under several noise models, and checks the bounds by Monte Carlo
with deterministic counter-based sampling.
"""

from .bounds import (APPENDIX_KINDS, COEFFICIENTS, CONDITION_KINDS,
                     GROWTH_KINDS, PRECISION_KINDS, BoundParams,
                     DomainViolated, PrecisionParams, PreconditionViolated,
                     appendix_bound, bound_condition, bound_growth,
                     evaluate_tail_bound, precision_bits, threshold_shift)
from .gallery import (DimensionInvalid, bidiagonal_example, growth_example,
                      symmetric_embedding_example)
from .lemmalab import (LEMMA_IDS, LemmaCheckResult, UnknownLemma, check_lemma,
                       sample_pareto_tail)
from .matlin import (PIVOT_FLOOR, DegeneratePivot, GrowthReport, LUFactors,
                     Matrix, SingularMatrix, condition_number, growth_factors,
                     lu_nopivot, lu_partial, matrix_norm, smallest_singular,
                     solve_lu)
from .mc import (GALLERY_BASES, STATISTICS, THREADS_ENV_VAR,
                 BaseMatrixUnavailable, BaseSpec, BoundVerdict, ConfigInvalid,
                 EmptySamples, ExperimentConfig, ExperimentRun,
                 SurvivalEstimate, check_against_bound, mean_with_ci,
                 resolve_base, run_experiment, survival_with_ci,
                 wilson_interval)
from .perturb import (MODEL_KINDS, NotSymmetric, PerturbationModel,
                      apply_model, derive_stream, perturb_dense,
                      perturb_sym_zero_preserving, perturb_uniform,
                      perturb_zero_preserving, sample_gaussian_matrix)
from .streams import RandomStream

__version__ = "0.1.0"

__all__ = [
    "APPENDIX_KINDS", "COEFFICIENTS", "CONDITION_KINDS", "GALLERY_BASES",
    "GROWTH_KINDS", "LEMMA_IDS", "MODEL_KINDS", "PIVOT_FLOOR",
    "PRECISION_KINDS", "STATISTICS", "THREADS_ENV_VAR",
    "BaseMatrixUnavailable", "BaseSpec", "BoundParams", "BoundVerdict",
    "ConfigInvalid", "DegeneratePivot", "DimensionInvalid", "DomainViolated",
    "EmptySamples", "ExperimentConfig", "ExperimentRun", "GrowthReport",
    "LUFactors", "LemmaCheckResult", "Matrix", "NotSymmetric",
    "PerturbationModel", "PrecisionParams", "PreconditionViolated",
    "RandomStream", "SingularMatrix", "SurvivalEstimate", "UnknownLemma",
    "appendix_bound", "apply_model", "bidiagonal_example", "bound_condition",
    "bound_growth", "check_against_bound", "check_lemma", "condition_number",
    "derive_stream", "evaluate_tail_bound", "growth_example",
    "growth_factors", "lu_nopivot", "lu_partial", "matrix_norm",
    "mean_with_ci", "precision_bits", "perturb_dense",
    "perturb_sym_zero_preserving", "perturb_uniform",
    "perturb_zero_preserving", "resolve_base", "run_experiment",
    "sample_gaussian_matrix", "sample_pareto_tail", "smallest_singular",
    "solve_lu", "survival_with_ci", "symmetric_embedding_example",
    "threshold_shift", "wilson_interval",
]
