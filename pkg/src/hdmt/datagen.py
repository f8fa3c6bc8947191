"""Synthetic data for the simulation study.

Covariance is ``Sigma = D R D`` with D the diagonal of standard deviations and
R one of three correlation structures (independent, AR(1), long-range
dependent).  Samples are either Gaussian or built from standardized double
Pareto noise pushed through ``Sigma^{1/2}``.

All randomness flows through :func:`make_rng`, which wraps numpy's Philox
counter-based bit generator around a ``SeedSequence``.  Integer seeds and
``(seed, key...)`` tuples both work, so replicate streams can be derived as
``make_rng((master_seed, replicate))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "CovarianceSpec",
    "SignalSpec",
    "make_rng",
    "build_correlation",
    "draw_variances",
    "sample_mvn",
    "sample_double_pareto",
    "sample_heavy_tailed",
    "inject_signal",
    "signal_count",
    "generate_pair",
    "PARETO_A",
    "PARETO_B",
    "PARETO_VARIANCE",
]

PARETO_A = 16.5
PARETO_B = 8.0
# 2 b^2 / ((a - 1)(a - 2)) at (16.5, 8)
PARETO_VARIANCE = 512.0 / 899.0

VARIANCE_LAWS = ("chisq5_scaled", "equispaced", "unit")
CORRELATIONS = ("ind", "ar1", "lrd")

SeedLike = Union[int, Sequence[int], np.random.SeedSequence]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Philox generator for an int seed, a ``(seed, *keys)`` tuple or a SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    elif isinstance(seed, (tuple, list)):
        head, *keys = (int(s) for s in seed)
        ss = np.random.SeedSequence(head, spawn_key=tuple(keys))
    else:
        ss = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class CovarianceSpec:
    """Declarative ``Sigma = D R D``.

    variance_law: ``chisq5_scaled`` draws each variance from chi^2_5 / 5,
    ``equispaced`` spreads them evenly over ``variance_range``, ``unit`` is 1.
    correlation: ``ind``, ``ar1`` (uses ``rho``) or ``lrd`` (uses ``hurst``).
    """

    p: int
    variance_law: str = "chisq5_scaled"
    correlation: str = "ind"
    rho: float = 0.0
    hurst: float = 0.625
    variance_range: Tuple[float, float] = (0.01, 150.0)

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise DomainError(f"p must be a positive integer, got {self.p}")
        if self.variance_law not in VARIANCE_LAWS:
            raise DomainError(f"variance_law must be one of {VARIANCE_LAWS}")
        if self.correlation not in CORRELATIONS:
            raise DomainError(f"correlation must be one of {CORRELATIONS}")
        if self.correlation == "ar1" and not -1.0 < self.rho < 1.0:
            raise DomainError(f"rho must lie in (-1, 1), got {self.rho}")
        if self.correlation == "lrd" and not 0.5 < self.hurst < 1.0:
            raise DomainError(f"hurst must lie in (0.5, 1), got {self.hurst}")
        lo, hi = self.variance_range
        if self.variance_law == "equispaced" and not 0 < lo <= hi:
            raise DomainError(f"variance_range must satisfy 0 < lo <= hi, got {self.variance_range}")

    @property
    def dependence_parameter(self) -> float:
        if self.correlation == "ar1":
            return float(self.rho)
        if self.correlation == "lrd":
            return float(self.hurst)
        return 0.0


@dataclass(frozen=True)
class SignalSpec:
    beta: float
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise DomainError(f"beta must lie in [0, 1], got {self.beta}")


def build_correlation(spec: CovarianceSpec) -> np.ndarray:
    """The p x p correlation matrix R (a fresh, writable copy)."""
    return _correlation_cached(spec.p, spec.correlation, spec.rho, spec.hurst).copy()


@lru_cache(maxsize=32)
def _correlation_cached(p, correlation, rho, hurst) -> np.ndarray:
    lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p))).astype(float)
    if correlation == "ind":
        R = np.eye(p)
    elif correlation == "ar1":
        R = rho**lag
    else:
        e = 2.0 * hurst
        R = 0.5 * ((lag + 1.0) ** e + np.abs(lag - 1.0) ** e - 2.0 * lag**e)
    R.flags.writeable = False
    return R


def _sym_sqrt(S: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(S)
    if w.min() < -1e-8 * max(w.max(), 1.0):
        raise np.linalg.LinAlgError(
            f"covariance is not positive semidefinite (min eigenvalue {w.min():.3g})"
        )
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T


@lru_cache(maxsize=32)
def _corr_sqrt_cached(p, correlation, rho, hurst) -> np.ndarray:
    root = _sym_sqrt(_correlation_cached(p, correlation, rho, hurst))
    root.flags.writeable = False
    return root


def draw_variances(spec: CovarianceSpec, rng: np.random.Generator) -> np.ndarray:
    """Coordinate variances sigma_jj^2 per the spec's variance law."""
    if spec.variance_law == "chisq5_scaled":
        return rng.chisquare(5, size=spec.p) / 5.0
    if spec.variance_law == "equispaced":
        lo, hi = spec.variance_range
        return np.linspace(lo, hi, spec.p)
    return np.ones(spec.p)


def covariance_sqrt(spec: CovarianceSpec, variances: np.ndarray) -> np.ndarray:
    """Symmetric square root of ``D R D``."""
    sd = np.sqrt(variances)
    if spec.correlation == "ind":
        return np.diag(sd)
    R = _correlation_cached(spec.p, spec.correlation, spec.rho, spec.hurst)
    return _sym_sqrt(sd[:, None] * R * sd[None, :])


def _mean_vector(mu, p: int) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    if mu.ndim == 0:
        return np.full(p, float(mu))
    if mu.shape != (p,):
        raise DimensionError(f"mean vector has shape {mu.shape}, expected ({p},)")
    return mu


def _gaussian_rows(rng, spec, variances, n) -> np.ndarray:
    # Rows z @ R^{1/2} D have covariance D R D; for Gaussian noise this is the
    # same law as Sigma^{1/2} z, and R^{1/2} can be cached across replicates.
    z = rng.standard_normal((n, spec.p))
    sd = np.sqrt(variances)
    if spec.correlation != "ind":
        z = z @ _corr_sqrt_cached(spec.p, spec.correlation, spec.rho, spec.hurst)
    return z * sd


def _pareto_rows(rng, spec, variances, n, root=None) -> np.ndarray:
    z = _double_pareto(rng, PARETO_A, PARETO_B, (n, spec.p)) / math.sqrt(PARETO_VARIANCE)
    if spec.correlation == "ind":
        return z * np.sqrt(variances)
    if root is None:
        root = covariance_sqrt(spec, variances)
    return z @ root  # root is symmetric


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")


def sample_mvn(mu, spec: CovarianceSpec, n: int, seed: SeedLike, variances=None) -> np.ndarray:
    """n rows from N_p(mu, D R D).

    Variances are drawn from ``spec.variance_law`` (first, from the same
    stream) unless ``variances`` is given.
    """
    _check_n(n)
    mu = _mean_vector(mu, spec.p)
    rng = make_rng(seed)
    if variances is None:
        variances = draw_variances(spec, rng)
    return mu + _gaussian_rows(rng, spec, np.asarray(variances, float), int(n))


def _double_pareto(rng, a, b, size) -> np.ndarray:
    u = rng.random(size)
    magnitude = b * ((1.0 - u) ** (-1.0 / a) - 1.0)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return magnitude * sign


def sample_double_pareto(a: float, b: float, count: int, seed: SeedLike) -> np.ndarray:
    """Symmetric Pareto draws ``Z = U V`` by inversion of ``1 - (1 + x/b)^-a``."""
    if not a > 2.0:
        raise DomainError(f"double Pareto needs a > 2 for finite variance, got {a}")
    if not b > 0.0:
        raise DomainError(f"b must be positive, got {b}")
    _check_n(count)
    return _double_pareto(make_rng(seed), float(a), float(b), int(count))


def sample_heavy_tailed(mu, spec: CovarianceSpec, n: int, seed: SeedLike, variances=None) -> np.ndarray:
    """n rows ``mu + Sigma^{1/2} z / c0`` with z i.i.d. double Pareto(16.5, 8)."""
    _check_n(n)
    mu = _mean_vector(mu, spec.p)
    rng = make_rng(seed)
    if variances is None:
        variances = draw_variances(spec, rng)
    return mu + _pareto_rows(rng, spec, np.asarray(variances, float), int(n))


def signal_count(beta: float, p: int) -> int:
    """round-half-up of beta * p."""
    # the epsilon absorbs representation error such as 0.15 * 10 = 1.4999...
    return min(p, int(math.floor(beta * p + 0.5 + 1e-9)))


def inject_signal(mu_base, sigma_diag, signal: SignalSpec) -> np.ndarray:
    """Set the first round(beta p) means to ``theta * sigma_jj`` (sigma = sd)."""
    mu = np.array(mu_base, dtype=float)
    sd = np.asarray(sigma_diag, dtype=float)
    if mu.shape != sd.shape or mu.ndim != 1:
        raise DimensionError("mu_base and sigma_diag must be vectors of equal length")
    p0 = signal_count(signal.beta, mu.size)
    mu[:p0] = signal.theta * sd[:p0]
    return mu


def generate_pair(
    spec: CovarianceSpec,
    n1: int,
    n2: int,
    rng: np.random.Generator,
    tail: str = "normal",
):
    """Centred noise for a two-sample dataset sharing one variance draw.

    Returns ``(x_noise, y_noise, variances)``; callers add their mean vectors.
    """
    variances = draw_variances(spec, rng)
    if tail == "normal":
        x = _gaussian_rows(rng, spec, variances, n1)
        y = _gaussian_rows(rng, spec, variances, n2) if n2 else None
    elif tail == "double_pareto":
        root = None if spec.correlation == "ind" else covariance_sqrt(spec, variances)
        x = _pareto_rows(rng, spec, variances, n1, root)
        y = _pareto_rows(rng, spec, variances, n2, root) if n2 else None
    else:
        raise DomainError(f"tail must be 'normal' or 'double_pareto', got {tail!r}")
    return x, y, variances
