"""Replicated type I error / power experiments.

Each replicate ``r`` draws its data from ``make_rng((master_seed, r, attempt))``
and the same noise is reused across every beta in the grid, so power curves
are computed with common random numbers.  Replicates are processed in fixed
chunks whose results are merged in chunk order; the worker count therefore
never changes the output.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .baselines import BaselineKind, permutation_test
from .datagen import CovarianceSpec, SignalSpec, generate_pair, inject_signal, make_rng
from .dlrt import DEFAULT_LAG_H, dlrt_one_sample, dlrt_two_sample
from .errors import DegenerateVarianceError, DomainError

__all__ = [
    "ExperimentGrid",
    "ExperimentRow",
    "SimulationError",
    "run_grid",
    "null_distribution_snapshot",
    "rows_to_csv",
    "CSV_COLUMNS",
    "DEFAULT_BETAS",
    "resolve_threads",
]

METHODS = ("dlrt", "diag_hotelling", "unscaled", "regularized")
TAILS = ("normal", "double_pareto")
DESIGNS = ("two_sample", "one_sample")
DEFAULT_BETAS = tuple(round(0.05 * i, 2) for i in range(11))
CSV_COLUMNS = (
    "method", "tail", "structure", "rho_or_hurst", "n1", "n2", "p", "beta", "theta",
    "alpha", "replicates", "rejection_rate", "mc_stderr", "seed",
)

CHUNK_SIZE = 50
MAX_ATTEMPTS = 10


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentGrid:
    n1: int
    n2: int
    p: int
    structure: CovarianceSpec
    betas: Tuple[float, ...] = DEFAULT_BETAS
    theta: float = 0.5
    tail: str = "normal"
    replicates: int = 2000
    alpha: float = 0.05
    lag_h: int = DEFAULT_LAG_H
    methods: Tuple[str, ...] = ("dlrt",)
    master_seed: int = 0
    design: str = "two_sample"
    n_perms: int = 199
    lam: Optional[float] = None

    def __post_init__(self):
        if self.replicates < 1:
            raise DomainError("replicates must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")
        if self.structure.p != self.p:
            raise DomainError(f"structure.p={self.structure.p} does not match p={self.p}")
        if self.tail not in TAILS:
            raise DomainError(f"tail must be one of {TAILS}")
        if self.design not in DESIGNS:
            raise DomainError(f"design must be one of {DESIGNS}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise DomainError(f"unknown methods {bad}; choose from {METHODS}")
        if self.design == "one_sample" and set(self.methods) != {"dlrt"}:
            raise DomainError("one-sample experiments support only the dlrt method")
        for b in self.betas:
            SignalSpec(b, self.theta)
        if self.design == "two_sample" and (self.n1 < 2 or self.n2 < 2):
            raise DomainError("two-sample design needs n1, n2 >= 2")
        if self.design == "one_sample" and self.n1 < 2:
            raise DomainError("one-sample design needs n1 >= 2")

    @property
    def signals(self) -> List[SignalSpec]:
        return [SignalSpec(b, self.theta) for b in self.betas]


@dataclass(frozen=True)
class ExperimentRow:
    method: str
    beta: float
    rejection_rate: float
    mc_stderr: float
    replicates_used: int
    retries: int = 0


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        threads = int(os.environ.get("HDMT_THREADS", "1") or 1)
    return max(1, int(threads))


def _perm_seed(master_seed, rep, attempt, b, m) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(rep, attempt, b, m, 1))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def _replicate(grid: ExperimentGrid, rep: int, collect_stats: bool):
    """Rejections (n_beta x n_methods, bool), retries used, null std stat."""
    for attempt in range(MAX_ATTEMPTS):
        rng = make_rng((grid.master_seed, rep, attempt))
        n2 = grid.n2 if grid.design == "two_sample" else 0
        x0, y0, variances = generate_pair(grid.structure, grid.n1, n2, rng, grid.tail)
        sd = np.sqrt(variances)
        out = np.zeros((len(grid.betas), len(grid.methods)), dtype=bool)
        std_stat = math.nan
        try:
            for b, sig in enumerate(grid.signals):
                shift = inject_signal(np.zeros(grid.p), sd, sig)
                for m, method in enumerate(grid.methods):
                    if grid.design == "one_sample":
                        res = dlrt_one_sample(x0 + shift, np.zeros(grid.p), grid.lag_h)
                        out[b, m] = res.p_value < grid.alpha
                        if collect_stats and b == 0:
                            std_stat = res.statistic_std
                    elif method == "dlrt":
                        res = dlrt_two_sample(x0, y0 + shift, grid.lag_h)
                        out[b, m] = res.p_value < grid.alpha
                        if collect_stats and b == 0:
                            std_stat = res.statistic_std
                    else:
                        kind = BaselineKind(method, grid.lam if method == "regularized" else None)
                        seed = _perm_seed(grid.master_seed, rep, attempt, b, m)
                        pr = permutation_test(x0, y0 + shift, kind, grid.n_perms, seed)
                        out[b, m] = pr.perm_p_value <= grid.alpha
        except DegenerateVarianceError:
            continue
        return out, attempt, std_stat
    raise SimulationError(f"replicate {rep}: degenerate data after {MAX_ATTEMPTS} attempts")


def _run_chunk(args):
    grid, start, stop, collect_stats = args
    counts = np.zeros((len(grid.betas), len(grid.methods)), dtype=np.int64)
    retries = 0
    stats = np.full(stop - start, np.nan)
    for i, rep in enumerate(range(start, stop)):
        rej, attempts, s = _replicate(grid, rep, collect_stats)
        counts += rej
        retries += attempts
        stats[i] = s
    return counts, retries, stats


def _execute(grid: ExperimentGrid, threads: Optional[int], collect_stats: bool):
    threads = resolve_threads(threads)
    tasks = [
        (grid, s, min(s + CHUNK_SIZE, grid.replicates), collect_stats)
        for s in range(0, grid.replicates, CHUNK_SIZE)
    ]
    if threads == 1 or len(tasks) == 1:
        results = [_run_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_chunk, tasks))
    counts = sum(r[0] for r in results)
    retries = sum(r[1] for r in results)
    stats = np.concatenate([r[2] for r in results])
    return counts, retries, stats


def run_grid(grid: ExperimentGrid, threads: Optional[int] = None) -> List[ExperimentRow]:
    """Empirical rejection rate for every (method, beta) cell of the grid.

    DLRT rejects when its upper-tail normal p-value is below alpha; baselines
    reject when their permutation p-value is at most alpha.
    """
    counts, retries, _ = _execute(grid, threads, collect_stats=False)
    rows = []
    for m, method in enumerate(grid.methods):
        for b, beta in enumerate(grid.betas):
            r = counts[b, m] / grid.replicates
            rows.append(
                ExperimentRow(
                    method=method,
                    beta=float(beta),
                    rejection_rate=float(r),
                    mc_stderr=math.sqrt(r * (1.0 - r) / grid.replicates),
                    replicates_used=grid.replicates,
                    retries=int(retries),
                )
            )
    return rows


def null_distribution_snapshot(grid: ExperimentGrid, threads: Optional[int] = None) -> np.ndarray:
    """Standardized DLRT statistics of every replicate under the null."""
    if any(b != 0 for b in grid.betas):
        raise DomainError("null snapshot requires beta = 0")
    null_grid = ExperimentGrid(**{**grid.__dict__, "betas": (0.0,), "methods": ("dlrt",)})
    _, _, stats = _execute(null_grid, threads, collect_stats=True)
    return stats


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def rows_to_csv(results: Iterable[Tuple[ExperimentGrid, Sequence[ExperimentRow]]], header: bool = True) -> str:
    """Render ``(grid, rows)`` pairs with the fixed :data:`CSV_COLUMNS` schema."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(CSV_COLUMNS)
    for grid, rows in results:
        for row in rows:
            theta = grid.theta if row.beta > 0 else 0.0
            w.writerow([
                row.method,
                grid.tail,
                grid.structure.correlation,
                _fmt(grid.structure.dependence_parameter),
                grid.n1,
                grid.n2 if grid.design == "two_sample" else 0,
                grid.p,
                _fmt(row.beta),
                _fmt(theta),
                _fmt(grid.alpha),
                row.replicates_used,
                _fmt(row.rejection_rate),
                _fmt(row.mc_stderr),
                grid.master_seed,
            ])
    return buf.getvalue()
