"""``hdmt`` command line: test, simulate, power, calibrate.

Exit codes: 0 success, 2 bad input or configuration, 3 degenerate data.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import List, Optional

import numpy as np

from .calibration import CALIBRATION_METHODS, apply_calibration, calibrate
from .datagen import CovarianceSpec
from .dlrt import DEFAULT_K, DEFAULT_LAG_H, dlrt_one_sample, dlrt_two_sample, theoretical_power
from .errors import DegenerateVarianceError
from .simharness import DEFAULT_BETAS, ExperimentGrid, resolve_threads, rows_to_csv, run_grid

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3

GRID_KEYS = {
    "n1", "n2", "p", "design", "structure", "rho", "hurst", "variance_law",
    "variance_range", "betas", "theta", "tail", "replicates", "alpha", "lag_h",
    "methods", "master_seed", "n_perms", "lambda",
}
_STRUCTURE_ALIASES = {"ind": "ind", "srd": "ar1", "ar1": "ar1", "lrd": "lrd"}


class InputError(Exception):
    pass


def read_csv_matrix(path: str) -> np.ndarray:
    """Rectangular numeric CSV; a non-numeric first row is taken as a header."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise InputError(f"{path}: no data rows")

    def parse(row):
        return [float(c) for c in row]

    try:
        parse(rows[0])
    except ValueError:
        rows = rows[1:]
    width = len(rows[0]) if rows else 0
    if width < 1:
        raise InputError(f"{path}: no data rows (p < 1)")
    data = []
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise InputError(f"{path}: ragged CSV, data row {lineno} has {len(row)} fields, expected {width}")
        try:
            vals = parse(row)
        except ValueError:
            raise InputError(f"{path}: non-numeric value in data row {lineno}") from None
        if not all(math.isfinite(v) for v in vals):
            raise InputError(f"{path}: non-finite value in data row {lineno}")
        data.append(vals)
    return np.array(data, dtype=float)


def _emit(record: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(record) + "\n")
    elif fmt == "csv":
        w = csv.DictWriter(out, fieldnames=list(record), lineterminator="\n")
        w.writeheader()
        w.writerow(record)
    else:
        for key, val in record.items():
            out.write(f"{key}: {val}\n")


# ---------------------------------------------------------------- test

def cmd_test(args, out) -> int:
    if args.one_sample:
        x = read_csv_matrix(args.one_sample)
        if args.mu0 is None:
            mu0 = np.zeros(x.shape[1])
        else:
            mu0 = read_csv_matrix(args.mu0).ravel()
            if mu0.size == 1:
                mu0 = np.full(x.shape[1], mu0[0])
            if mu0.size != x.shape[1]:
                raise InputError(f"--mu0 has {mu0.size} values but data has p={x.shape[1]}")
        res = dlrt_one_sample(x, mu0, args.lag_h, args.centering, args.k)
        kind = "one_sample"
    else:
        x = read_csv_matrix(args.two_sample[0])
        y = read_csv_matrix(args.two_sample[1])
        if x.shape[1] != y.shape[1]:
            raise InputError(f"dimension mismatch: p={x.shape[1]} vs p={y.shape[1]}")
        res = dlrt_two_sample(x, y, args.lag_h, args.centering, args.k)
        kind = "two_sample"
    record = {"test": kind, **res.as_dict(), "alpha": args.alpha}
    record["decision"] = "reject" if res.p_value < args.alpha else "fail to reject"
    _emit(record, args.format, out)
    return EXIT_OK


# ---------------------------------------------------------------- simulate

def grid_from_mapping(table: dict, seed: Optional[int] = None) -> ExperimentGrid:
    unknown = sorted(set(table) - GRID_KEYS)
    if unknown:
        raise InputError("invalid config keys: " + ", ".join(unknown))
    missing = [k for k in ("n1", "p") if k not in table]
    if missing:
        raise InputError("missing config keys: " + ", ".join(missing))
    structure = str(table.get("structure", "ind")).lower()
    if structure not in _STRUCTURE_ALIASES:
        raise InputError(f"structure must be one of {sorted(_STRUCTURE_ALIASES)}, got {structure!r}")
    spec_kw = {"p": int(table["p"]), "correlation": _STRUCTURE_ALIASES[structure]}
    for key in ("rho", "hurst", "variance_law"):
        if key in table:
            spec_kw[key] = table[key]
    if "variance_range" in table:
        spec_kw["variance_range"] = tuple(float(v) for v in table["variance_range"])
    design = table.get("design", "two_sample")
    return ExperimentGrid(
        n1=int(table["n1"]),
        n2=int(table.get("n2", table["n1"] if design == "two_sample" else 0)),
        p=int(table["p"]),
        structure=CovarianceSpec(**spec_kw),
        betas=tuple(float(b) for b in table.get("betas", DEFAULT_BETAS)),
        theta=float(table.get("theta", 0.5)),
        tail=table.get("tail", "normal"),
        replicates=int(table.get("replicates", 2000)),
        alpha=float(table.get("alpha", 0.05)),
        lag_h=int(table.get("lag_h", DEFAULT_LAG_H)),
        methods=tuple(table.get("methods", ("dlrt",))),
        master_seed=int(seed if seed is not None else table.get("master_seed", 0)),
        design=design,
        n_perms=int(table.get("n_perms", 199)),
        lam=table.get("lambda"),
    )


def load_grids(path: str, seed: Optional[int] = None) -> List[ExperimentGrid]:
    """A config is either one table of grid keys or an array of ``[[grid]]`` tables."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"{path}: invalid TOML: {exc}") from None
    if "grid" in doc:
        extra = sorted(set(doc) - {"grid"})
        if extra:
            raise InputError("invalid config keys: " + ", ".join(extra))
        tables = doc["grid"] if isinstance(doc["grid"], list) else [doc["grid"]]
    else:
        tables = [doc]
    grids = []
    for i, table in enumerate(tables):
        try:
            grids.append(grid_from_mapping(table, seed))
        except InputError as exc:
            raise InputError(f"grid {i}: {exc}") from None
        except (ValueError, TypeError) as exc:
            raise InputError(f"grid {i}: {exc}") from None
    return grids


def cmd_simulate(args, out) -> int:
    grids = load_grids(args.config, args.seed)
    threads = resolve_threads(args.threads)
    text = rows_to_csv((g, run_grid(g, threads)) for g in grids)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- power

def cmd_power(args, out) -> int:
    beta = theoretical_power(args.delta_sq_sum, args.p, args.tau_sq, args.alpha)
    record = {
        "delta_sq_sum": args.delta_sq_sum, "p": args.p, "tau_sq": args.tau_sq,
        "alpha": args.alpha, "power": beta,
    }
    _emit(record, args.format, out)
    return EXIT_OK


# ---------------------------------------------------------------- calibrate

def cmd_calibrate(args, out) -> int:
    group = read_csv_matrix(args.data)
    if args.n1 + args.n2 > group.shape[0]:
        raise InputError(f"n1 + n2 = {args.n1 + args.n2} exceeds the {group.shape[0]} rows in {args.data}")
    report = calibrate(group, args.n1, args.n2, args.alpha, args.n_boot, args.method, args.seed, args.lag_h)
    if args.apply:
        x = read_csv_matrix(args.apply[0])
        y = read_csv_matrix(args.apply[1])
        if x.shape[1] != group.shape[1] or y.shape[1] != group.shape[1]:
            raise InputError("--apply files must have the same number of columns as --data")
        report = apply_calibration(report, x, y, args.n_apply, args.lag_h)
    _emit(report.as_dict(), args.format, out)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_format(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", dest="format", action="store_const", const="json")
    g.add_argument("--csv", dest="format", action="store_const", const="csv")
    p.set_defaults(format="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hdmt", description="Diagonal likelihood ratio tests for high-dimensional means.")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run a one- or two-sample DLRT on CSV data")
    src = t.add_mutually_exclusive_group(required=True)
    src.add_argument("--one-sample", metavar="X.csv")
    src.add_argument("--two-sample", nargs=2, metavar=("X.csv", "Y.csv"))
    t.add_argument("--mu0", metavar="mu.csv", help="hypothesized mean (one row or column); default 0")
    t.add_argument("--lag-h", type=int, default=DEFAULT_LAG_H)
    t.add_argument("--centering", choices=("exact", "expansion"), default="exact")
    t.add_argument("--k", type=int, default=DEFAULT_K)
    t.add_argument("--alpha", type=float, default=0.05)
    _add_format(t)

    s = sub.add_parser("simulate", help="run an experiment grid from a TOML config")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--seed", type=int)
    s.add_argument("--threads", type=int, help="worker processes (default $HDMT_THREADS or 1)")

    pw = sub.add_parser("power", help="asymptotic power of the level-alpha DLRT")
    pw.add_argument("--delta-sq-sum", type=float, required=True)
    pw.add_argument("--p", type=int, required=True)
    pw.add_argument("--tau-sq", type=float, required=True)
    pw.add_argument("--alpha", type=float, default=0.05)
    _add_format(pw)

    c = sub.add_parser("calibrate", help="empirical critical value from within-group splits")
    c.add_argument("--data", required=True, metavar="GROUP.csv")
    c.add_argument("--n1", type=int, required=True)
    c.add_argument("--n2", type=int, required=True)
    c.add_argument("--alpha", type=float, default=0.05)
    c.add_argument("--n-boot", type=int, default=10000)
    c.add_argument("--method", choices=CALIBRATION_METHODS, default="dlrt")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--lag-h", type=int, default=DEFAULT_LAG_H)
    c.add_argument("--apply", nargs=2, metavar=("X.csv", "Y.csv"))
    c.add_argument("--n-apply", type=int)
    _add_format(c)
    return parser


_COMMANDS = {"test": cmd_test, "simulate": cmd_simulate, "power": cmd_power, "calibrate": cmd_calibrate}


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return _COMMANDS[args.command](args, out)
    except DegenerateVarianceError as exc:
        err.write(f"hdmt: degenerate data: {exc}\n")
        return EXIT_DEGENERATE
    except InputError as exc:
        err.write(f"hdmt: input error: {exc}\n")
        return EXIT_INPUT
    except ValueError as exc:  # DomainError, DimensionError
        err.write(f"hdmt: invalid argument: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
