"""Command-line front end: ``gen``, ``project``, ``stats`` and ``bench``.

    perspcone gen --cone exp --region r2 --n 1000 --seed 7 --out r2.csv
    perspcone project --cone exp --in r2.csv --out r2_proj.csv --tol 1e-9
    perspcone stats --in r2_proj.csv --region r2
    perspcone bench --cone exp --region r2 --n 10000 --tol 1e-9

Exit codes: 0 success, 1 error threshold breached, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .functions import FUNCTIONS, get_function
from .projection import BatchResult, project_batch
from .rootfind import SolverConfig
from .testgen import generate_labeled, region

SCHEMA_VERSION = 1
WARMUP = 100

EXIT_OK, EXIT_BREACH, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

# error_mean must not exceed these
THRESHOLDS = {"r1": 3.2e-3, "r2": 1e-9, "r3": 1e-8, "r4": 1e-10}
DEFAULT_TOL = {"r1": 1e-9, "r2": 1e-9, "r3": 5e-10, "r4": 1e-12}
DEFAULT_CONE = {"r1": "exp", "r2": "exp", "r3": "exp-radial", "r4": "hyperbolic"}

_FMT = "%.17g"


class UsageError(Exception):
    pass


@dataclass
class BenchReport:
    cone: str
    region: str
    n_points: int
    dim: int
    error_mean: float
    error_std: float
    error_max: float
    n_failed: int
    time_mean_ns: float
    time_std_ns: float
    time_median_ns: float
    tol: float
    solver: str
    seed: int | None
    threshold: float | None
    passed: bool
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, allow_nan=True)


def error_statistics(projected: np.ndarray, exact: np.ndarray):
    """Mean, std and max of row-wise Euclidean errors, ignoring failed rows.

    Both arrays have shape ``(n, d + 2)``. Returns ``(mean, std, max, failed)``.
    """
    err = np.linalg.norm(projected - exact, axis=1)
    ok = np.isfinite(err)
    failed = int(np.count_nonzero(~ok))
    if not ok.any():
        return float("nan"), float("nan"), float("nan"), failed
    e = err[ok]
    return float(np.mean(e)), float(np.std(e)), float(np.max(e)), failed


def _time_stats(time_ns: np.ndarray):
    t = np.asarray(time_ns, dtype=float)
    if t.size == 0:
        return float("nan"), float("nan"), float("nan")
    return float(np.mean(t)), float(np.std(t)), float(np.median(t))


# ------------------------------------------------------------------ CSV

def _header(dim: int, prefix: str = "") -> list[str]:
    return [f"{prefix}x_{k}" for k in range(dim)] + [f"{prefix}eta", f"{prefix}delta"]


def _gen_header(dim: int) -> list[str]:
    return _header(dim) + _header(dim, "exact_") + ["t"]


_PROJ_EXTRA = ["mu", "nu", "outer_iters", "residual", "time_ns", "error"]


def _fmt(v) -> str:
    return _FMT % v


def write_csv(path, header, rows):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_csv(path):
    """Returns ``(header, rows)`` with rows as lists of strings."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            r = csv.reader(fh)
            header = next(r)
            rows = [row for row in r if row]
    except StopIteration:
        raise UsageError(f"{path}: empty CSV file") from None
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return header, rows


def _columns(header, rows, names, path):
    idx = {h: i for i, h in enumerate(header)}
    missing = [n for n in names if n not in idx]
    if missing:
        raise UsageError(f"{path}: missing columns {', '.join(missing)}")
    cols = [idx[n] for n in names]
    try:
        return np.array([[float(row[i]) for i in cols] for row in rows],
                        dtype=float).reshape(len(rows), len(cols))
    except (ValueError, IndexError) as exc:
        raise UsageError(f"{path}: malformed row ({exc})") from None


def _dim_of(header) -> int:
    dim = 0
    while f"x_{dim}" in header:
        dim += 1
    if dim == 0:
        raise UsageError("input CSV has no x_0 column")
    return dim


# ------------------------------------------------------------------ commands

def _config(tol: float, solver: str) -> SolverConfig:
    return SolverConfig(tol_outer=tol,
                        method="bisection" if solver == "bisect" else "brent")


def _samples(cone, region_name, n, seed, dim):
    if n < 1:
        raise UsageError("--n must be at least 1")
    overrides = {} if dim is None else {"dim": dim}
    try:
        spec = region(region_name, **overrides)
        return generate_labeled(get_function(cone), spec, n, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _gen_rows(samples):
    for s in samples:
        yield [_fmt(v) for v in s.input.as_array()] + \
              [_fmt(v) for v in s.exact.as_array()] + [_fmt(s.t)]


def cmd_gen(args) -> int:
    samples = _samples(args.cone, args.region, args.n, args.seed, args.dim)
    dim = samples[0].input.x.size
    write_csv(args.out, _gen_header(dim), _gen_rows(samples))
    _summary(args, {"command": "gen", "rows": len(samples), "dim": dim,
                    "out": args.out})
    return EXIT_OK


def _project_arrays(cone, Z, cfg) -> BatchResult:
    dim = Z.shape[1] - 2
    return project_batch(get_function(cone), Z[:, :dim], Z[:, dim], Z[:, dim + 1],
                         cfg, warmup=WARMUP)


def _projected(b: BatchResult) -> np.ndarray:
    return np.column_stack([b.x, b.eta, b.delta])


def cmd_project(args) -> int:
    header, rows = read_csv(args.inp)
    dim = _dim_of(header)
    Z = _columns(header, rows, _header(dim), args.inp)
    if dim > 1 and not FUNCTIONS[args.cone]().radial:
        raise UsageError(f"cone {args.cone} takes scalar rows, found dim {dim}")
    b = _project_arrays(args.cone, Z, _config(args.tol, args.solver))
    P = _projected(b)

    def out_rows():
        for i, row in enumerate(rows):
            yield row + [_fmt(v) for v in P[i]] + [
                _fmt(b.mu[i]), _fmt(b.nu[i]), str(int(b.outer_iterations[i])),
                _fmt(b.residual[i]), str(int(b.time_ns[i])), b.errors[i]]

    write_csv(args.out, header + _header(dim, "proj_") + _PROJ_EXTRA, out_rows())
    _summary(args, {"command": "project", "rows": len(rows),
                    "failed": sum(1 for e in b.errors if e), "out": args.out})
    return EXIT_OK


def _report(cone, region_name, P, E, time_ns, dim, tol, solver, seed):
    mean, std, emax, failed = error_statistics(P, E)
    tmean, tstd, tmed = _time_stats(time_ns)
    thr = THRESHOLDS.get(region_name) if region_name else None
    passed = failed == 0 and (thr is None or mean <= thr)
    return BenchReport(cone, region_name or "custom", int(P.shape[0]), dim,
                       mean, std, emax, failed, tmean, tstd, tmed, tol, solver,
                       seed, thr, bool(passed))


def cmd_stats(args) -> int:
    header, rows = read_csv(args.inp)
    dim = _dim_of(header)
    P = _columns(header, rows, _header(dim, "proj_"), args.inp)
    E = _columns(header, rows, _header(dim, "exact_"), args.inp)
    T = _columns(header, rows, ["time_ns"], args.inp)[:, 0]
    rep = _report(args.cone or "unknown", args.region, P, E, T, dim,
                  args.tol, args.solver, None)
    return _emit(args, rep)


def run_bench(cone, region_name, n, seed, tol, solver, dim=None) -> BenchReport:
    """Generate, project and summarize; the engine behind ``bench``."""
    samples = _samples(cone, region_name, n, seed, dim)
    Z = np.array([s.input.as_array() for s in samples])
    E = np.array([s.exact.as_array() for s in samples])
    b = _project_arrays(cone, Z, _config(tol, solver))
    return _report(cone, region_name, _projected(b), E, b.time_ns,
                   Z.shape[1] - 2, tol, solver, seed)


def cmd_bench(args) -> int:
    rep = run_bench(args.cone, args.region, args.n, args.seed, args.tol,
                    args.solver, args.dim)
    return _emit(args, rep)


def _emit(args, rep: BenchReport) -> int:
    text = rep.to_json()
    print(text)
    if args.json:
        try:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise OSError(f"cannot write {args.json}: {exc.strerror or exc}") from exc
    return EXIT_OK if rep.passed else EXIT_BREACH


def _summary(args, info: dict):
    if args.json:
        try:
            with open(args.json, "w", encoding="utf-8") as fh:
                json.dump(info, fh, indent=2)
        except OSError as exc:
            raise OSError(f"cannot write {args.json}: {exc.strerror or exc}") from exc
    else:
        print(", ".join(f"{k}={v}" for k, v in info.items()), file=sys.stderr)


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perspcone",
        description="Projections onto epigraphs of perspective functions.")
    sub = parser.add_subparsers(dest="command", required=True)
    cones = sorted(FUNCTIONS)
    regions = sorted(THRESHOLDS)

    def common(p, need_cone=True):
        p.add_argument("--cone", choices=cones, required=need_cone,
                       default=None)
        p.add_argument("--json", metavar="PATH", default=None,
                       help="also write the JSON report/summary to PATH")

    def solver(p):
        p.add_argument("--tol", type=float, default=None,
                       help="outer tolerance (default depends on the region)")
        p.add_argument("--solver", choices=["brent", "bisect"], default="brent")

    g = sub.add_parser("gen", help="write labeled samples to CSV")
    common(g)
    g.add_argument("--region", choices=regions, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--dim", type=int, default=None)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("project", help="project every row of a CSV")
    common(p)
    solver(p)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_project)

    s = sub.add_parser("stats", help="error statistics of a projected CSV")
    common(s, need_cone=False)
    solver(s)
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--region", choices=regions, default=None)
    s.set_defaults(func=cmd_stats)

    b = sub.add_parser("bench", help="generate, project and report")
    common(b, need_cone=False)
    solver(b)
    b.add_argument("--region", choices=regions, required=True)
    b.add_argument("--n", type=int, default=1000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--dim", type=int, default=None)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    region_name = getattr(args, "region", None)
    if getattr(args, "cone", None) is None and args.command == "bench":
        args.cone = DEFAULT_CONE[region_name]
    if hasattr(args, "tol") and args.tol is None:
        args.tol = DEFAULT_TOL.get(region_name, 1e-9)
    if hasattr(args, "tol") and not args.tol > 0:
        parser.error("--tol must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"perspcone: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"perspcone: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
