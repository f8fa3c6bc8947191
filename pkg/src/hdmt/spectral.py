"""Lag-window estimate of the long-run variance of the component sequence.

The DLRT components are ordered by coordinate, and neighbouring coordinates
may be correlated.  The variance of their sum is then ``p * tau^2`` with
``tau^2 = gamma(0) + 2 * sum_k gamma(k)``, which is estimated by a
Parzen-weighted sum of sample autocovariances.  The lag-0 term is the exact
null variance rather than its sample estimate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import parzen_window

logger = logging.getLogger(__name__)

__all__ = ["AutocovSequence", "TauEstimate", "sample_autocov", "autocov_sequence", "tau_sq_hat", "estimate_tau_sq"]

FLOOR_FRACTION = 1e-8


@dataclass(frozen=True)
class AutocovSequence:
    gamma_hat: np.ndarray  # lags 1..h
    gamma0_theoretical: float
    p: int


@dataclass(frozen=True)
class TauEstimate:
    value: float
    clamped: bool
    raw: float


def _as_sequence(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DomainError("values must be a non-empty 1-d sequence")
    return v


def sample_autocov(values, k: int) -> float:
    """Lag-k autocovariance with divisor p and the overall mean removed."""
    v = _as_sequence(values)
    p = v.size
    if int(k) != k or k < 0 or k >= p:
        raise DomainError(f"lag must satisfy 0 <= k < p={p}, got {k}")
    k = int(k)
    c = v - v.mean()
    return float(np.dot(c[: p - k], c[k:]) / p)


def autocov_sequence(values, h: int, gamma0_theoretical: float) -> AutocovSequence:
    v = _as_sequence(values)
    p = v.size
    if h < 0 or h >= p:
        raise DomainError(f"lag-window size must satisfy 0 <= h < p={p}, got {h}")
    c = v - v.mean()
    gam = np.array([np.dot(c[: p - k], c[k:]) / p for k in range(1, h + 1)])
    return AutocovSequence(gamma_hat=gam, gamma0_theoretical=float(gamma0_theoretical), p=p)


def estimate_tau_sq(values, gamma0_theoretical: float, h: int) -> TauEstimate:
    """Like :func:`tau_sq_hat` but also reports whether the floor was hit."""
    if not gamma0_theoretical > 0:
        raise DomainError("gamma0_theoretical must be positive")
    if int(h) != h:
        raise DomainError(f"h must be an integer, got {h!r}")
    h = int(h)
    seq = autocov_sequence(values, h, gamma0_theoretical)
    if h == 0:
        raw = float(gamma0_theoretical)
    else:
        weights = parzen_window(np.arange(1, h + 1) / h)
        raw = float(gamma0_theoretical + 2.0 * np.dot(weights, seq.gamma_hat))
    floor = FLOOR_FRACTION * gamma0_theoretical
    if raw < floor:
        # gamma(0) is theoretical, so the estimate is not guaranteed positive
        logger.warning("tau^2 estimate %.3g below floor; clamped to %.3g", raw, floor)
        return TauEstimate(value=floor, clamped=True, raw=raw)
    return TauEstimate(value=raw, clamped=False, raw=raw)


def tau_sq_hat(values, gamma0_theoretical: float, h: int = 5) -> float:
    """Parzen lag-window estimate of tau^2, floored at 1e-8 * gamma0."""
    return estimate_tau_sq(values, gamma0_theoretical, h).value
