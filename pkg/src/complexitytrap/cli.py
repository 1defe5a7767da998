"""Command-line entry point: one subcommand per analysis plus ``pipeline``.

Exit codes: 0 success, 1 I/O failure, 2 invalid input or usage.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import fields, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import ingest as io
from .fitness import DEFAULT_MAX_ITER, DEFAULT_TOL, iterate_fitness
from .growth import (decompose_panel, detrend, gdp_levels, tertiles_by_year)
from .kernel import (DEFAULT_B, DEFAULT_GRID_N, DEFAULT_LEVEL, kernel_1d,
                     kernel_2d, threshold)
from .panel import ValidationError, validate_panel
from .rca import binarize, compute_rca, order_matrix
from .solow import DEFAULT_N_SCAN, find_equilibria, simulate
from .synth import SynthConfig, default_fitness_levels, synth_world

log = logging.getLogger("complexitytrap")

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2
MANIFEST = "run_manifest.txt"


class UsageError(ValidationError):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def parse_years(spec: Optional[str], available: Sequence[int]) -> list[int]:
    """``A..B`` (inclusive), a single year, or None for every available year."""
    if spec is None:
        return list(available)
    try:
        if ".." in spec:
            a, b = (int(s) for s in spec.split("..", 1))
        else:
            a = b = int(spec)
    except ValueError:
        raise UsageError(f"bad --years value {spec!r}; expected A..B") from None
    if a > b:
        raise UsageError(f"empty year range {spec}")
    years = [y for y in available if a <= y <= b]
    if not years:
        raise ValidationError(f"no trade data for years {spec}")
    return years


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_manifest(out: Path, command: str, params: dict) -> None:
    items = {"command": command, "version": __version__}
    items.update(params)
    io.write_keyvalue(out / MANIFEST, items)


def _effective(args: argparse.Namespace, skip=("out", "func", "verbose")) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# analysis steps shared by the subcommands and the pipeline
# ---------------------------------------------------------------------------

def run_fitness(flows, years, threshold_, tol, max_iter):
    rcas, mats, fits = [], [], []
    for y in years:
        rca = compute_rca(flows, y)
        m = binarize(rca, threshold_)
        fit = iterate_fitness(m, max_iter=max_iter, tol=tol)
        if not fit.converged:
            log.info("year %s: fitness not converged after %d iterations",
                     y, fit.iterations)
        rcas.append(rca)
        mats.append(m)
        fits.append(fit)
    stuck = [f.year for f in fits if not f.converged]
    if stuck:
        log.warning("fitness not converged in %d of %d years (see convergence.csv)",
                    len(stuck), len(fits))
    return rcas, mats, fits


def run_decompose(panel, alpha):
    bad = validate_panel(panel)
    if bad:
        lines = "\n".join(f"  {v.country} {v.year} {v.field}: {v.reason}" for v in bad)
        raise ValidationError(f"macro panel failed validation:\n{lines}")
    decomps = decompose_panel(panel, alpha)
    if not decomps:
        raise ValidationError("no computable growth decompositions in the panel")
    return decomps, detrend(decomps, gdp_levels(panel))


def select_rows(detrended, fitness=None, tertile=None):
    """Detrended rows, optionally restricted to one fitness tertile.

    Rows are kept only when their (country, year) has a fitness value, if
    a fitness table is given.
    """
    rows = list(detrended)
    if fitness is not None:
        rows = [r for r in rows if r.country in fitness.get(r.year, {})]
    if tertile is not None:
        if fitness is None:
            raise UsageError("--tertile needs --fitness")
        labels = tertiles_by_year(fitness)
        rows = [r for r in rows if labels.get((r.country, r.year)) == tertile]
    if len(rows) < 2:
        raise ValidationError("fewer than two rows left for kernel estimation")
    return rows


def run_kernel(rows, fitness, dim, bandwidth, grid_n, B, level, seed):
    """1-D: input growth against relative GDP; 2-D: also against log fitness."""
    x = [r.relative_gdp for r in rows]
    yv = [r.input_growth for r in rows]
    if dim == 1:
        h = None if bandwidth is None else bandwidth[0]
        return kernel_1d(x, yv, h=h, B=B, level=level, seed=seed, grid_n=grid_n)
    if fitness is None:
        raise UsageError("--dim 2 needs --fitness")
    x2 = [math.log(fitness[r.year][r.country]) for r in rows]
    h = None if bandwidth is None else tuple(bandwidth)
    return kernel_2d(x, x2, yv, h=h, B=B, level=level, seed=seed, grid_n=grid_n)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_rca(args) -> None:
    flows, rep = io.load_trade(args.trade)
    rca = compute_rca(flows, args.year)
    m = binarize(rca, args.threshold)
    out = _outdir(args.out)
    io.write_rca(out / "rca.csv", [rca])
    io.write_matrix(out / "matrix.csv", [m])
    io.write_report(out / "cleaning_report.txt", [rep])
    write_manifest(out, "rca", _effective(args))


def cmd_fitness(args) -> None:
    flows, rep = io.load_trade(args.trade)
    years = parse_years(args.years, flows.years())
    _, _, fits = run_fitness(flows, years, args.threshold, args.tol, args.max_iter)
    out = _outdir(args.out)
    io.write_fitness(out / "fitness.csv", fits)
    io.write_complexity(out / "complexity.csv", fits)
    io.write_convergence(out / "convergence.csv", fits)
    io.write_report(out / "cleaning_report.txt", [rep])
    write_manifest(out, "fitness", _effective(args))


def cmd_decompose(args) -> None:
    panel, rep = io.load_macro(args.macro)
    decomps, det = run_decompose(panel, args.alpha)
    out = _outdir(args.out)
    io.write_decomposition(out / "decomposition.csv", decomps)
    io.write_detrended(out / "detrended.csv", det)
    io.write_report(out / "cleaning_report.txt", [rep])
    write_manifest(out, "decompose", _effective(args))


def cmd_kernel(args) -> None:
    det = io.read_detrended(args.detrended)
    fitness = io.read_fitness(args.fitness) if args.fitness else None
    rows = select_rows(det, fitness, args.tertile)
    est = run_kernel(rows, fitness, args.dim, args.bandwidth, args.grid_n,
                     args.bootstrap_b, args.level, args.seed)
    out = _outdir(args.out)
    io.write_kernel(out / "kernel.csv", est)
    params = _effective(args)
    params.update(n_rows=len(rows), bandwidth_used=",".join(io.fmt(h) for h in est.bandwidth),
                  n_omitted=est.n_omitted)
    write_manifest(out, "kernel", params)


def cmd_simulate(args) -> None:
    p = io.read_params(args.params)
    traj = simulate(p, args.k0, args.steps)
    out = _outdir(args.out)
    io.write_trajectory(out / "trajectory.csv", traj)
    params = _effective(args)
    params.update({f"param_{f.name}": getattr(p, f.name) for f in fields(p)})
    write_manifest(out, "simulate", params)


def cmd_equilibria(args) -> None:
    p = io.read_params(args.params)
    eqs = find_equilibria(p, args.k_max, n_scan=args.n_scan)
    out = _outdir(args.out)
    io.write_equilibria(out / "equilibria.csv", eqs)
    params = _effective(args)
    params.update({f"param_{f.name}": getattr(p, f.name) for f in fields(p)})
    params.update({f"diagnostic_{i}": d for i, d in enumerate(eqs.diagnostics)})
    write_manifest(out, "equilibria", params)


def read_fitness_spec(path, n: int) -> tuple[list[float], SynthConfig]:
    """Fitness levels and generator settings from a ``key = value`` file.

    Keys: ``levels`` (comma-separated, one per country) or ``min``/``max``
    (log-spaced levels), plus any generator setting such as ``kf0``.
    """
    kv = io.read_keyvalue(path) if path else {}
    cfg_fields = {f.name: f.type for f in fields(SynthConfig)}
    cfg_kw = {}
    for k in list(kv):
        if k in cfg_fields:
            v = kv.pop(k)
            try:
                cfg_kw[k] = int(v) if k in ("n_products", "year0") else float(v)
            except ValueError:
                raise ValidationError(f"bad value for {k}: {v!r}") from None
    try:
        if "levels" in kv:
            levels = [float(s) for s in kv.pop("levels").split(",")]
        else:
            lo, hi = float(kv.pop("min", 0.25)), float(kv.pop("max", 2.5))
            if not 0 < lo <= hi:
                raise ValidationError("fitness spec needs 0 < min <= max")
            levels = (np.geomspace(lo, hi, n).tolist() if path
                      else default_fitness_levels(n))
    except ValueError as exc:
        raise ValidationError(f"bad fitness spec: {exc}") from None
    if kv:
        raise ValidationError(f"unknown fitness spec key(s): {', '.join(sorted(kv))}")
    return levels, replace(SynthConfig(), **cfg_kw)


def cmd_synth(args) -> None:
    levels, cfg = read_fitness_spec(args.fitness_spec, args.countries)
    world = synth_world(args.countries, args.steps, args.seed, levels, cfg)
    out = _outdir(args.out)
    io.write_trade(out / "trade.csv", world.flows)
    io.write_macro(out / "macro.csv", world.panel)
    io.write_true_fitness(out / "true_fitness.csv", world.true_fitness)
    params = _effective(args)
    params.update({f"config_{k}": v for k, v in cfg.as_dict().items()})
    write_manifest(out, "synth", params)


def cmd_pipeline(args) -> None:
    src = Path(args.input)
    flows, trade_rep = io.load_trade(src / "trade.csv")
    panel, macro_rep = io.load_macro(src / "macro.csv")
    years = parse_years(args.years, flows.years())
    rcas, mats, fits = run_fitness(flows, years, args.threshold, args.tol,
                                   args.max_iter)
    decomps, det = run_decompose(panel, args.alpha)
    fitness = {f.year: f.fitness_map() for f in fits}

    out = _outdir(args.out)
    io.write_report(out / "cleaning_report.txt", [trade_rep, macro_rep])
    io.write_rca(out / "rca.csv", rcas)
    io.write_matrix(out / "matrix.csv",
                    [order_matrix(m, f) for m, f in zip(mats, fits)])
    io.write_fitness(out / "fitness.csv", fits)
    io.write_complexity(out / "complexity.csv", fits)
    io.write_convergence(out / "convergence.csv", fits)
    io.write_decomposition(out / "decomposition.csv", decomps)
    io.write_detrended(out / "detrended.csv", det)

    kw = dict(bandwidth=None, grid_n=args.grid_n, B=args.bootstrap_b,
              level=args.level, seed=args.seed)
    params = _effective(args)
    # every curve uses rows with a fitness value, as `kernel --fitness` does
    curves = {"kernel_all": (None, 1), "kernel_low": ("low", 1),
              "kernel_high": ("high", 1), "kernel_2d": (None, 2)}
    thresholds = {}
    for name, (tertile, dim) in curves.items():
        rows = select_rows(det, fitness, tertile)
        est = run_kernel(rows, fitness, dim, **kw)
        io.write_kernel(out / f"{name}.csv", est)
        params[f"{name}_rows"] = len(rows)
        params[f"{name}_bandwidth"] = ",".join(io.fmt(h) for h in est.bandwidth)
        if tertile:
            thresholds[tertile] = threshold(est)
    io.write_keyvalue(out / "thresholds.txt",
                      {f"threshold_{k}": ("" if v is None else v)
                       for k, v in thresholds.items()})
    write_manifest(out, "pipeline", params)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="complexitytrap",
        description="Fitness ranking, growth accounting, kernel estimates and "
                    "poverty-trap simulation on CSV data.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def fitness_opts(p):
        p.add_argument("--threshold", type=float, default=1.0, help="RCA cut-off (default 1.0)")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--max-iter", type=_positive_int, default=DEFAULT_MAX_ITER)

    def kernel_opts(p):
        p.add_argument("--grid-n", type=_positive_int, default=DEFAULT_GRID_N)
        p.add_argument("--bootstrap-b", type=int, default=DEFAULT_B,
                       help="bootstrap resamples; 0 skips the band")
        p.add_argument("--level", type=float, default=DEFAULT_LEVEL)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("rca", help="RCA and binary export matrix for one year")
    p.add_argument("--trade", required=True)
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--threshold", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rca)

    p = sub.add_parser("fitness", help="fitness and complexity per year")
    p.add_argument("--trade", required=True)
    p.add_argument("--years", help="A..B inclusive (default: every year)")
    fitness_opts(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fitness)

    p = sub.add_parser("decompose", help="growth accounting and detrending")
    p.add_argument("--macro", required=True)
    p.add_argument("--alpha", type=float, help="capital elasticity override")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("kernel", help="kernel estimate of detrended input growth")
    p.add_argument("--detrended", required=True)
    p.add_argument("--fitness", help="fitness table, needed for --tertile and --dim 2")
    p.add_argument("--dim", type=int, choices=(1, 2), default=1)
    p.add_argument("--tertile", choices=("low", "mid", "high"))
    p.add_argument("--bandwidth", type=float, nargs="+",
                   help="one value per dimension (default: Silverman's rule)")
    kernel_opts(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("simulate", help="iterate the capital map")
    p.add_argument("--params", required=True, help="key = value parameter file")
    p.add_argument("--k0", type=float, required=True)
    p.add_argument("--steps", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("equilibria", help="fixed points of the capital map")
    p.add_argument("--params", required=True)
    p.add_argument("--k-max", type=float, default=200.0)
    p.add_argument("--n-scan", type=int, default=DEFAULT_N_SCAN)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("synth", help="generate a synthetic trade and macro data set")
    p.add_argument("--countries", type=_positive_int, default=12)
    p.add_argument("--steps", type=_positive_int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fitness-spec", help="key = value file with levels or min/max")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pipeline", help="every analysis on DIR/trade.csv and DIR/macro.csv")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--years")
    fitness_opts(p)
    p.add_argument("--alpha", type=float)
    kernel_opts(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pipeline)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "bootstrap_b", None) == 0:
        args.bootstrap_b = None
    try:
        args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
