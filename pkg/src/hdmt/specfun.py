"""Digamma/trigamma and the closed-form null moments of the DLRT components.

Every component ``n * log(1 + t**2 / nu)`` of the DLRT statistic has, under the
null, a mean and variance expressible through

    D(x) = digamma((x + 1) / 2) - digamma(x / 2)

and its derivative.  Everything here is plain ``math``; no special-function
library is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "NullMoments",
    "digamma",
    "trigamma",
    "dfun",
    "dfun_prime",
    "null_moments",
    "xi_k",
    "parzen_window",
]

# B_2, B_4, ..., B_18
_BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
)

# Arguments are pushed above this before the asymptotic series is used.  With
# the nine Bernoulli terms above the truncation error at x = 10 is < 1e-19.
_ASYMPTOTIC_START = 10.0


def _check_positive(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"argument must be positive and finite, got {x!r}")
    return x


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function for ``x > 0``."""
    x = _check_positive(x)
    shift = 0.0
    while x < _ASYMPTOTIC_START:
        shift += 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for k, b in enumerate(_BERNOULLI_EVEN, start=1):
        series += b / (2 * k) * power
        power *= inv2
    return math.log(x) - 0.5 / x - series - shift


def trigamma(x: float) -> float:
    """First derivative of :func:`digamma` for ``x > 0``."""
    x = _check_positive(x)
    shift = 0.0
    while x < _ASYMPTOTIC_START:
        shift += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    power = inv2 * inv
    for b in _BERNOULLI_EVEN:
        series += b * power
        power *= inv2
    return inv + 0.5 * inv2 + series + shift


def dfun(x: float) -> float:
    """D(x) = digamma((x+1)/2) - digamma(x/2)."""
    x = _check_positive(x)
    return digamma(0.5 * (x + 1.0)) - digamma(0.5 * x)


def dfun_prime(x: float) -> float:
    """Derivative of :func:`dfun`; strictly negative."""
    x = _check_positive(x)
    return 0.5 * (trigamma(0.5 * (x + 1.0)) - trigamma(0.5 * x))


@dataclass(frozen=True)
class NullMoments:
    """Exact null mean and second moment of one DLRT component.

    ``scale_n`` is n (one-sample) or N = n1 + n2 (two-sample); ``nu`` is the
    matching t degrees of freedom, n - 1 or N - 2.
    """

    nu: int
    scale_n: int
    m1: float
    m2: float
    var_u: float


def null_moments(n_scale: int, nu: int) -> NullMoments:
    """Mean ``m1``, raw second moment ``m2`` and variance of ``n log(1 + t^2/nu)``.

    The variance is evaluated as ``-2 n^2 D'(nu)``, which is algebraically
    ``m2 - m1**2`` but does not cancel catastrophically for large n.
    """
    if int(nu) != nu or nu < 1:
        raise DomainError(f"nu must be a positive integer, got {nu!r}")
    if int(n_scale) != n_scale or n_scale < 1:
        raise DomainError(f"n_scale must be a positive integer, got {n_scale!r}")
    nu = int(nu)
    n = float(n_scale)
    d = dfun(nu)
    dp = dfun_prime(nu)
    m1 = n * d
    m2 = n * n * (d * d - 2.0 * dp)
    var_u = -2.0 * n * n * dp
    return NullMoments(nu=nu, scale_n=int(n_scale), m1=m1, m2=m2, var_u=var_u)


def xi_k(n_scale: int, nu: int, k: int) -> float:
    """Order-k series approximation of the null mean ``m1``.

    ``n * sum_{i<=k} (-1)**(i+1) a_i / i`` with
    ``a_i = prod_{l<=i} (2l - 1) / (nu - 2l)``, the i-th moment of t^2/nu.
    Only defined for ``1 <= k < nu / 2``.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if 2 * k >= nu:
        raise DomainError(f"expansion undefined: need k < nu/2, got k={k}, nu={nu}")
    total = 0.0
    a = 1.0
    for i in range(1, int(k) + 1):
        a *= (2 * i - 1) / (nu - 2 * i)
        total += (-1) ** (i + 1) * a / i
    return float(n_scale) * total


def parzen_window(x):
    """Parzen lag window; accepts scalars or arrays.

    1 - 6x^2 + 6|x|^3 on |x| < 1/2, 2(1 - |x|)^3 on 1/2 <= |x| < 1, else 0.
    """
    ax = np.abs(np.asarray(x, dtype=float))
    inner = 1.0 - 6.0 * ax**2 + 6.0 * ax**3
    outer = 2.0 * (1.0 - ax) ** 3
    out = np.where(ax < 0.5, inner, np.where(ax < 1.0, outer, 0.0))
    if out.ndim == 0:
        return float(out)
    return out
