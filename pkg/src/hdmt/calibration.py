"""Empirical critical values by splitting a single group into two pseudo-groups.

Every iteration draws ``n1 + n2`` distinct rows from the group without
replacement and splits them into two disjoint classes; the null is true by
construction.  The critical value is the ``ceil(n_boot * alpha)``-th largest
statistic.  :func:`apply_calibration` then draws classes from two real groups
and reports how often the statistic reaches that value.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from .baselines import KIND_NAMES, BaselineKind, baseline_statistic
from .datagen import make_rng
from .dlrt import DEFAULT_LAG_H, as_sample, dlrt_two_sample
from .errors import DegenerateVarianceError, DimensionError, DomainError

__all__ = ["CalibrationReport", "calibration_statistic", "calibrate", "apply_calibration", "CALIBRATION_METHODS"]

CALIBRATION_METHODS = ("dlrt",) + KIND_NAMES


@dataclass(frozen=True)
class CalibrationReport:
    critical_value: float
    alpha: float
    n_boot: int
    group_sizes: Tuple[int, int]
    seed: int
    method: str = "dlrt"
    redraws: int = 0
    empirical_power: Optional[float] = None
    n_apply: Optional[int] = None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["group_sizes"] = list(self.group_sizes)
        return d


def calibration_statistic(x, y, method: str = "dlrt", lag_h: int = DEFAULT_LAG_H) -> float:
    """Standardized DLRT statistic, or the raw baseline statistic."""
    if method == "dlrt":
        return dlrt_two_sample(x, y, lag_h).statistic_std
    if method in KIND_NAMES:
        return baseline_statistic(x, y, BaselineKind(method))
    raise DomainError(f"unknown method {method!r}; choose from {CALIBRATION_METHODS}")


def _draw_stats(rng, sources, sizes, count, method, lag_h):
    """``count`` statistics; degenerate draws are replaced (budget 10x)."""
    out = np.empty(count)
    filled = drawn = 0
    while filled < count:
        if drawn >= 10 * count:
            raise DegenerateVarianceError(0, "too many resamples with degenerate variance")
        drawn += 1
        if len(sources) == 1:
            idx = rng.choice(sources[0].shape[0], size=sum(sizes), replace=False)
            x, y = sources[0][idx[: sizes[0]]], sources[0][idx[sizes[0] :]]
        else:
            x = sources[0][rng.choice(sources[0].shape[0], size=sizes[0], replace=False)]
            y = sources[1][rng.choice(sources[1].shape[0], size=sizes[1], replace=False)]
        try:
            out[filled] = calibration_statistic(x, y, method, lag_h)
        except DegenerateVarianceError:
            continue
        filled += 1
    return out, drawn - count


def calibrate(
    group,
    n1: int,
    n2: int,
    alpha: float = 0.05,
    n_boot: int = 10000,
    method: str = "dlrt",
    seed: int = 0,
    lag_h: int = DEFAULT_LAG_H,
) -> CalibrationReport:
    group = as_sample(group, "group")
    if n1 < 2 or n2 < 2:
        raise DomainError("n1 and n2 must be >= 2")
    if n1 + n2 > group.shape[0]:
        raise DimensionError(f"n1 + n2 = {n1 + n2} exceeds the {group.shape[0]} rows available")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if n_boot < 1:
        raise DomainError("n_boot must be >= 1")
    rank = math.ceil(n_boot * alpha - 1e-9)
    if rank < 1 or rank > n_boot:
        raise DomainError(f"n_boot * alpha must be >= 1 (got {n_boot * alpha})")
    stats, redraws = _draw_stats(make_rng((seed, 0)), (group,), (n1, n2), n_boot, method, lag_h)
    crit = float(np.sort(stats)[::-1][rank - 1])
    return CalibrationReport(
        critical_value=crit,
        alpha=float(alpha),
        n_boot=int(n_boot),
        group_sizes=(int(n1), int(n2)),
        seed=int(seed),
        method=method,
        redraws=int(redraws),
    )


def apply_calibration(report: CalibrationReport, x, y, n_apply: Optional[int] = None, lag_h: int = DEFAULT_LAG_H) -> CalibrationReport:
    """Fraction of (x-class, y-class) draws whose statistic reaches the critical value.

    When ``x`` and ``y`` hold the same rows, each draw is a disjoint split of
    that one group, so the result estimates the achieved level.
    """
    x = as_sample(x, "x")
    y = as_sample(y, "y")
    n1, n2 = report.group_sizes
    # identical inputs mean a within-group check: draw disjoint splits as in calibrate
    sources = (x,) if x.shape == y.shape and np.array_equal(x, y) else (x, y)
    if len(sources) == 1 and n1 + n2 > x.shape[0]:
        raise DimensionError(f"n1 + n2 = {n1 + n2} exceeds the {x.shape[0]} rows available for --apply")
    if n1 > x.shape[0] or n2 > y.shape[0]:
        raise DimensionError("group sizes exceed the rows available for --apply")
    n_apply = report.n_boot if n_apply is None else int(n_apply)
    stats, redraws = _draw_stats(make_rng((report.seed, 1)), sources, (n1, n2), n_apply, report.method, lag_h)
    power = float(np.mean(stats >= report.critical_value))
    return CalibrationReport(
        **{**report.__dict__, "empirical_power": power, "n_apply": n_apply, "redraws": report.redraws + redraws}
    )
