"""Diagonal likelihood ratio tests for high-dimensional mean vectors."""

from .baselines import BaselineKind, PermutationResult, baseline_statistic, permutation_test
from .datagen import CovarianceSpec, SignalSpec, inject_signal, sample_double_pareto, sample_heavy_tailed, sample_mvn
from .dlrt import TestResult, dlrt_one_sample, dlrt_two_sample, theoretical_power
from .errors import DegenerateVarianceError, DimensionError, DomainError
from .specfun import NullMoments, null_moments, xi_k

__version__ = "0.1.0"

__all__ = [
    "BaselineKind",
    "PermutationResult",
    "baseline_statistic",
    "permutation_test",
    "CovarianceSpec",
    "SignalSpec",
    "inject_signal",
    "sample_double_pareto",
    "sample_heavy_tailed",
    "sample_mvn",
    "TestResult",
    "dlrt_one_sample",
    "dlrt_two_sample",
    "theoretical_power",
    "DegenerateVarianceError",
    "DimensionError",
    "DomainError",
    "NullMoments",
    "null_moments",
    "xi_k",
]
