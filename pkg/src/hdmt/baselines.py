"""Hotelling-type comparison statistics with permutation calibration.

Three variants of ``(n1 n2 / N) d' A d`` with ``d = xbar - ybar``:

* ``diag_hotelling``: A = diag(S)^-1
* ``unscaled``:       A = I
* ``regularized``:    A = (S + lambda I)^-1, lambda defaulting to trace(S)/p

Their published asymptotic nulls live elsewhere, so here each is calibrated by
re-splitting the pooled rows at random.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dlrt import as_sample
from .errors import DegenerateVarianceError, DimensionError, DomainError

__all__ = [
    "BaselineKind",
    "PermutationResult",
    "baseline_statistic",
    "permutation_test",
    "split_statistics",
    "KIND_NAMES",
]

KIND_NAMES = ("diag_hotelling", "unscaled", "regularized")

MIN_PERMS = 99
_REL_TIE = 1e-10
_PERM_CHUNK = 128


@dataclass(frozen=True)
class BaselineKind:
    name: str
    lam: Optional[float] = None

    def __post_init__(self):
        if self.name not in KIND_NAMES:
            raise DomainError(f"unknown baseline {self.name!r}; choose from {KIND_NAMES}")
        if self.lam is not None:
            if self.name != "regularized":
                raise DomainError("lam only applies to the regularized kind")
            if not self.lam > 0:
                raise DomainError(f"lambda must be positive, got {self.lam}")

    @classmethod
    def parse(cls, value) -> "BaselineKind":
        if isinstance(value, cls):
            return value
        return cls(str(value))


@dataclass(frozen=True)
class PermutationResult:
    statistic: float
    perm_p_value: float
    n_perms: int
    seed: int
    redraws: int = 0


def _pair(x, y):
    x = as_sample(x, "x")
    y = as_sample(y, "y")
    if x.shape[1] != y.shape[1]:
        raise DimensionError(f"dimension mismatch: x has p={x.shape[1]}, y has p={y.shape[1]}")
    return x, y


def split_statistics(data: np.ndarray, masks: np.ndarray, kind: BaselineKind) -> np.ndarray:
    """Statistic for each row of ``masks`` (True = first group) over pooled ``data``.

    Rows whose split produces a zero pooled variance (diag kind) give ``nan``.
    """
    N, p = data.shape
    masks = np.atleast_2d(masks)
    n1 = masks[0].sum()
    n2 = N - n1
    w1 = masks / n1
    w2 = (~masks) / n2
    diff = w1 @ data - w2 @ data  # (B, p)
    scale = n1 * n2 / N
    if kind.name == "unscaled":
        return scale * np.einsum("bp,bp->b", diff, diff)

    grand = data.mean(axis=0)
    total_ss = ((data - grand) ** 2).sum(axis=0)
    if kind.name == "diag_hotelling":
        within = total_ss[None, :] - scale * diff**2
        tol = (64.0 * np.finfo(float).eps) ** 2 * np.max(data**2, axis=0) * N
        s2 = within / (N - 2)
        bad = np.any(within <= tol, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = scale * np.sum(diff**2 / s2, axis=1)
        out[bad] = np.nan
        return out

    # regularized, via Woodbury on the rank-(N-2) pooled covariance
    out = np.empty(masks.shape[0])
    for start in range(0, masks.shape[0], _PERM_CHUNK):
        m = masks[start : start + _PERM_CHUNK]
        mean1 = (m / n1) @ data
        mean2 = (~m / n2) @ data
        # within-group centred rows for every split: Z[b] = data - mean of own group
        Z = data[None, :, :] - np.where(m[:, :, None], mean1[:, None, :], mean2[:, None, :])
        d = mean1 - mean2
        if kind.lam is None:
            lam = np.einsum("bnp,bnp->b", Z, Z) / (N - 2) / p
        else:
            lam = np.full(m.shape[0], kind.lam)
        if np.any(~(lam > 0)):
            raise DegenerateVarianceError(0, "pooled covariance is zero; default lambda undefined")
        gram = Z @ np.swapaxes(Z, 1, 2)  # (b, N, N)
        M = gram + (lam * (N - 2))[:, None, None] * np.eye(N)
        zd = np.einsum("bnp,bp->bn", Z, d)
        sol = np.linalg.solve(M, zd[:, :, None])[:, :, 0]
        quad = (np.einsum("bp,bp->b", d, d) - np.einsum("bn,bn->b", zd, sol)) / lam
        out[start : start + m.shape[0]] = scale * quad
    return out


def baseline_statistic(x, y, kind) -> float:
    """Two-sample comparison statistic of the given kind (>= 0 for all kinds)."""
    kind = BaselineKind.parse(kind)
    x, y = _pair(x, y)
    data = np.vstack([x, y])
    mask = np.zeros(data.shape[0], dtype=bool)
    mask[: x.shape[0]] = True
    if kind.name == "diag_hotelling":
        ss = ((x - x.mean(0)) ** 2).sum(0) + ((y - y.mean(0)) ** 2).sum(0)
        tol = (64.0 * np.finfo(float).eps * np.abs(data).max(axis=0)) ** 2
        bad = np.flatnonzero(~(ss > tol))
        if bad.size:
            raise DegenerateVarianceError(bad[0])
    return float(split_statistics(data, mask[None, :], kind)[0])


def permutation_test(x, y, kind, n_perms: int = 999, seed: int = 0) -> PermutationResult:
    """Permutation p-value ``(1 + #{perm >= observed}) / (1 + n_perms)``.

    All splits are drawn up front from one Philox stream keyed by ``seed``, so
    the result does not depend on how the evaluation is chunked.  Splits that
    make a pooled variance vanish are replaced by fresh draws, up to ten times
    the permutation budget.
    """
    kind = BaselineKind.parse(kind)
    if n_perms < MIN_PERMS:
        raise DomainError(f"n_perms must be >= {MIN_PERMS}, got {n_perms}")
    x, y = _pair(x, y)
    observed = baseline_statistic(x, y, kind)
    data = np.vstack([x, y])
    N, n1 = data.shape[0], x.shape[0]
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))

    base = np.zeros(N, dtype=bool)
    base[:n1] = True
    stats = np.empty(0)
    drawn = 0
    budget = 10 * n_perms
    while stats.size < n_perms:
        need = n_perms - stats.size
        if drawn + need > budget:
            raise DegenerateVarianceError(0, "too many permutations with degenerate pooled variance")
        masks = rng.permuted(np.broadcast_to(base, (need, N)), axis=1)
        drawn += need
        s = split_statistics(data, masks, kind)
        stats = np.concatenate([stats, s[np.isfinite(s)]])
    exceed = int(np.sum(stats >= observed * (1.0 - _REL_TIE)))
    pval = (1.0 + exceed) / (1.0 + n_perms)
    return PermutationResult(
        statistic=observed,
        perm_p_value=pval,
        n_perms=int(n_perms),
        seed=int(seed),
        redraws=drawn - n_perms,
    )
