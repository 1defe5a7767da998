"""CSV readers and writers for every input and output table.

All tables are UTF-8 with ``\\n`` line endings. Floats are written with 17
significant digits so that reading a table back reproduces the exact
binary values. Missing values are empty fields.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field, fields
from functools import singledispatch
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .panel import (MACRO_FIELDS, CountryProductMatrix, DetrendedRow,
                    Equilibrium, EquilibriumSet, FitnessResult,
                    GrowthDecomposition, KernelEstimate, MacroObservation,
                    MacroPanel, SolowParams, TradeFlows, TradeRecord,
                    TrajectoryPoint, ValidationError, _field_violation)
from .rca import RcaMatrix

HEADERS = {
    "trade": ("year", "country", "product", "value"),
    "macro": ("year", "country") + MACRO_FIELDS,
    "rca": ("year", "country", "product", "rca"),
    "matrix": ("year", "country", "product", "m"),
    "fitness": ("year", "country", "fitness", "rank"),
    "complexity": ("year", "product", "complexity"),
    "convergence": ("year", "iterations", "rank_stable_at", "converged",
                    "floored", "n_components"),
    "decomposition": ("year", "country", "y", "a", "alpha", "term_k", "term_e",
                      "term_h", "input_growth"),
    "detrended": ("year", "country", "relative_gdp", "input_growth"),
    "kernel1d": ("x", "estimate", "ci_low", "ci_high", "n_effective", "supported"),
    "kernel2d": ("x1", "x2", "estimate", "ci_low", "ci_high", "n_effective",
                 "supported"),
    "equilibria": ("k_star", "stability"),
    "trajectory": ("t", "k", "y", "s"),
    "true_fitness": ("country", "fitness"),
}


# ---------------------------------------------------------------------------
# low-level helpers
# ---------------------------------------------------------------------------

def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _bool(s: str) -> bool:
    if s not in ("true", "false"):
        raise ValidationError(f"expected true/false, got {s!r}")
    return s == "true"


def _opt_float(s: str) -> Optional[float]:
    return None if s == "" else float(s)


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_rows(path, header: Sequence[str]) -> list[list[str]]:
    """Data rows of a CSV whose first line must equal ``header``."""
    with open(path, encoding="utf-8-sig", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(c.strip() for c in rows[0]) != tuple(header):
        got = ",".join(rows[0]) if rows else "<empty file>"
        raise ValidationError(
            f"{path}: expected header {','.join(header)!r}, got {got!r}")
    return [r for r in rows[1:] if r]


# ---------------------------------------------------------------------------
# cleaning report
# ---------------------------------------------------------------------------

@dataclass
class CleaningReport:
    source: str
    total: int = 0
    kept: int = 0
    dropped: Counter = field(default_factory=Counter)
    notes: list[str] = field(default_factory=list)

    def drop(self, line: int, reason: str, detail: str = "") -> None:
        self.dropped[reason] += 1
        self.notes.append(f"line {line}: {reason}" + (f" ({detail})" if detail else ""))

    @property
    def n_dropped(self) -> int:
        return sum(self.dropped.values())

    def lines(self) -> list[str]:
        out = [f"source = {self.source}", f"total_rows = {self.total}",
               f"kept_rows = {self.kept}", f"dropped_rows = {self.n_dropped}"]
        out += [f"dropped_{k.replace(' ', '_')} = {v}"
                for k, v in sorted(self.dropped.items())]
        out += [f"# {n}" for n in self.notes]
        return out


def write_report(path, reports: Sequence[CleaningReport]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, r in enumerate(reports):
            if i:
                fh.write("\n")
            fh.write("\n".join(r.lines()) + "\n")


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------

def load_trade(path) -> tuple[TradeFlows, CleaningReport]:
    """Parse a trade file, dropping bad rows into a cleaning report.

    Dropped: wrong column count, unparsable numbers, empty codes, values that
    are not finite and positive, and repeated (year, country, product) keys
    (the first occurrence wins).
    """
    rows = read_rows(path, HEADERS["trade"])
    rep = CleaningReport(Path(path).name, total=len(rows))
    seen = set()
    recs = []
    for line, row in enumerate(rows, start=2):
        if len(row) != 4:
            rep.drop(line, "malformed", f"{len(row)} columns")
            continue
        try:
            year, value = int(row[0]), float(row[3])
        except ValueError:
            rep.drop(line, "malformed", "bad number")
            continue
        country, product = row[1].strip(), row[2].strip()
        if not country or not product:
            rep.drop(line, "malformed", "empty code")
            continue
        if not (math.isfinite(value) and value > 0):
            rep.drop(line, "non-positive value", row[3])
            continue
        key = (year, country, product)
        if key in seen:
            rep.drop(line, "duplicate", f"{year},{country},{product}")
            continue
        seen.add(key)
        recs.append(TradeRecord(year, country, product, value))
    rep.kept = len(recs)
    if not recs:
        raise ValidationError(f"{path}: no valid trade rows")
    return TradeFlows(tuple(recs)), rep


def parse_trade_csv(path) -> TradeFlows:
    return load_trade(path)[0]


def load_macro(path) -> tuple[MacroPanel, CleaningReport]:
    """Parse a macro panel file. Empty fields are kept as missing values.

    Rows with unparsable numbers, out-of-range values or a repeated
    (country, year) are dropped and reported.
    """
    header = HEADERS["macro"]
    rows = read_rows(path, header)
    rep = CleaningReport(Path(path).name, total=len(rows))
    seen = set()
    obs = []
    for line, row in enumerate(rows, start=2):
        if len(row) != len(header):
            rep.drop(line, "malformed", f"{len(row)} columns")
            continue
        try:
            year = int(row[0])
            vals = [_opt_float(v.strip()) for v in row[2:]]
        except ValueError:
            rep.drop(line, "malformed", "bad number")
            continue
        country = row[1].strip()
        if not country:
            rep.drop(line, "malformed", "empty code")
            continue
        bad = [(n, why) for n, v in zip(MACRO_FIELDS, vals)
               if (why := _field_violation(n, v))]
        if bad:
            rep.drop(line, "out of range", "; ".join(f"{n} {w}" for n, w in bad))
            continue
        if (country, year) in seen:
            rep.drop(line, "duplicate", f"{country},{year}")
            continue
        seen.add((country, year))
        obs.append(MacroObservation(country, year, *vals))
    rep.kept = len(obs)
    if not obs:
        raise ValidationError(f"{path}: no valid macro rows")
    return MacroPanel(tuple(obs)), rep


def parse_macro_csv(path) -> MacroPanel:
    return load_macro(path)[0]


def write_trade(path, flows: TradeFlows) -> None:
    write_rows(path, HEADERS["trade"], flows.records)


def write_macro(path, panel: MacroPanel) -> None:
    write_rows(path, HEADERS["macro"],
               ((o.year, o.country) + tuple(o[2:]) for o in panel.observations))


# ---------------------------------------------------------------------------
# RCA and binary matrices (long format, every cell)
# ---------------------------------------------------------------------------

def _long_rows(year, countries, products, values):
    for i, c in enumerate(countries):
        for j, p in enumerate(products):
            yield year, c, p, values[i, j]


def _from_long(rows, cast):
    """Group long rows by year, keeping first-appearance order of codes."""
    by_year: dict[int, dict] = {}
    for row in rows:
        year = int(row[0])
        d = by_year.setdefault(year, {"c": {}, "p": {}, "v": {}})
        d["c"].setdefault(row[1], len(d["c"]))
        d["p"].setdefault(row[2], len(d["p"]))
        d["v"][(row[1], row[2])] = cast(row[3])
    out = []
    for year, d in by_year.items():
        cs, ps = list(d["c"]), list(d["p"])
        if len(d["v"]) != len(cs) * len(ps):
            raise ValidationError(f"year {year}: long table is not a full grid")
        arr = np.array([[d["v"][(c, p)] for p in ps] for c in cs])
        out.append((year, cs, ps, arr))
    return out


def write_rca(path, rcas: Sequence[RcaMatrix]) -> None:
    write_rows(path, HEADERS["rca"],
               (row for r in rcas
                for row in _long_rows(r.year, r.countries, r.products, r.rca)))


def read_rca(path) -> list[RcaMatrix]:
    return [RcaMatrix(y, cs, ps, arr)
            for y, cs, ps, arr in _from_long(read_rows(path, HEADERS["rca"]), float)]


def write_matrix(path, ms: Sequence[CountryProductMatrix]) -> None:
    write_rows(path, HEADERS["matrix"],
               (row for m in ms
                for row in _long_rows(m.year, m.countries, m.products,
                                      m.m.astype(int))))


def read_matrix(path) -> list[CountryProductMatrix]:
    return [CountryProductMatrix(y, cs, ps, arr)
            for y, cs, ps, arr in _from_long(read_rows(path, HEADERS["matrix"]), int)]


# ---------------------------------------------------------------------------
# fitness
# ---------------------------------------------------------------------------

def write_fitness(path, results: Sequence[FitnessResult]) -> None:
    """One row per country and year, sorted by year then rank (ties by code)."""
    from .fitness import rank_of

    def rows():
        for r in sorted(results, key=lambda r: r.year):
            ranks = rank_of(r)
            fmap = r.fitness_map()
            for c in sorted(r.countries, key=lambda c: (ranks[c], c)):
                yield r.year, c, fmap[c], ranks[c]

    write_rows(path, HEADERS["fitness"], rows())


def write_complexity(path, results: Sequence[FitnessResult]) -> None:
    write_rows(path, HEADERS["complexity"],
               ((r.year, p, q) for r in sorted(results, key=lambda r: r.year)
                for p, q in zip(r.products, r.complexity.tolist())))


def write_convergence(path, results: Sequence[FitnessResult]) -> None:
    write_rows(path, HEADERS["convergence"],
               ((r.year, r.iterations, r.rank_stable_at, r.converged, r.floored,
                 r.n_components) for r in sorted(results, key=lambda r: r.year)))


def read_fitness(path) -> dict[int, dict[str, float]]:
    """Year -> {country: fitness}."""
    out: dict[int, dict[str, float]] = {}
    for row in read_rows(path, HEADERS["fitness"]):
        out.setdefault(int(row[0]), {})[row[1]] = float(row[2])
    return out


def read_fitness_results(fitness_path, complexity_path,
                         convergence_path) -> list[FitnessResult]:
    """Rebuild results from the three fitness tables.

    Countries come back in rank order, products in file order.
    """
    fit = read_fitness(fitness_path)
    cx: dict[int, dict[str, float]] = {}
    for row in read_rows(complexity_path, HEADERS["complexity"]):
        cx.setdefault(int(row[0]), {})[row[1]] = float(row[2])
    out = []
    for row in read_rows(convergence_path, HEADERS["convergence"]):
        year = int(row[0])
        if year not in fit or year not in cx:
            raise ValidationError(f"year {year} missing from fitness tables")
        out.append(FitnessResult(
            year=year, countries=list(fit[year]), products=list(cx[year]),
            fitness=list(fit[year].values()), complexity=list(cx[year].values()),
            iterations=int(row[1]), rank_stable_at=int(row[2]),
            converged=_bool(row[3]), floored=_bool(row[4]),
            n_components=int(row[5])))
    return out


# ---------------------------------------------------------------------------
# growth accounting
# ---------------------------------------------------------------------------

_DECOMP_ORDER = HEADERS["decomposition"]


def write_decomposition(path, decomps: Sequence[GrowthDecomposition]) -> None:
    write_rows(path, _DECOMP_ORDER,
               ([getattr(d, n) for n in _DECOMP_ORDER] for d in decomps))


def read_decomposition(path) -> list[GrowthDecomposition]:
    out = []
    for row in read_rows(path, _DECOMP_ORDER):
        kw = dict(zip(_DECOMP_ORDER, row))
        out.append(GrowthDecomposition(
            country=kw.pop("country"), year=int(kw.pop("year")),
            **{k: float(v) for k, v in kw.items()}))
    return out


def write_detrended(path, rows: Sequence[DetrendedRow]) -> None:
    write_rows(path, HEADERS["detrended"],
               ((r.year, r.country, r.relative_gdp, r.input_growth) for r in rows))


def read_detrended(path) -> list[DetrendedRow]:
    return [DetrendedRow(r[1], int(r[0]), float(r[2]), float(r[3]))
            for r in read_rows(path, HEADERS["detrended"])]


# ---------------------------------------------------------------------------
# kernel estimates
# ---------------------------------------------------------------------------

def write_kernel(path, k: KernelEstimate) -> None:
    g = k.grid.reshape(len(k.estimate), -1)
    lo = [None] * len(k.estimate) if k.ci_low is None else k.ci_low.tolist()
    hi = [None] * len(k.estimate) if k.ci_high is None else k.ci_high.tolist()
    header = HEADERS["kernel1d" if k.dim == 1 else "kernel2d"]
    write_rows(path, header,
               (tuple(g[i].tolist()) + (k.estimate[i], lo[i], hi[i],
                                        k.n_effective[i], bool(k.supported[i]))
                for i in range(len(k.estimate))))


def read_kernel(path, bandwidth: Sequence[float], dim: int = 1) -> KernelEstimate:
    """Read a kernel table; the bandwidth is not stored in it and must be given."""
    if dim not in (1, 2):
        raise ValidationError("dim must be 1 or 2")
    rows = read_rows(path, HEADERS["kernel1d" if dim == 1 else "kernel2d"])
    grid = np.array([[float(v) for v in r[:dim]] for r in rows]).reshape(-1, dim)
    rest = [r[dim:] for r in rows]
    lo = [_opt_float(r[1]) for r in rest]
    hi = [_opt_float(r[2]) for r in rest]
    has_ci = any(v is not None for v in lo)
    return KernelEstimate(
        grid=grid[:, 0] if dim == 1 else grid,
        estimate=[float(r[0]) for r in rest],
        bandwidth=tuple(bandwidth),
        n_effective=[float(r[3]) for r in rest],
        supported=[_bool(r[4]) for r in rest],
        ci_low=lo if has_ci else None, ci_high=hi if has_ci else None)


# ---------------------------------------------------------------------------
# simulator tables and parameter files
# ---------------------------------------------------------------------------

def write_equilibria(path, eqs: EquilibriumSet) -> None:
    write_rows(path, HEADERS["equilibria"], eqs.equilibria)


def read_equilibria(path) -> EquilibriumSet:
    return EquilibriumSet(tuple(Equilibrium(float(k), s)
                                for k, s in read_rows(path, HEADERS["equilibria"])))


def write_trajectory(path, traj: Sequence[TrajectoryPoint]) -> None:
    write_rows(path, HEADERS["trajectory"], traj)


def read_trajectory(path) -> list[TrajectoryPoint]:
    return [TrajectoryPoint(int(t), float(k), float(y), float(s))
            for t, k, y, s in read_rows(path, HEADERS["trajectory"])]


def write_true_fitness(path, fitness: Mapping[str, float]) -> None:
    write_rows(path, HEADERS["true_fitness"], sorted(fitness.items()))


def read_true_fitness(path) -> dict[str, float]:
    return {c: float(f) for c, f in read_rows(path, HEADERS["true_fitness"])}


def read_keyvalue(path) -> dict[str, str]:
    """``key = value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{n}: expected 'key = value'")
            k, v = (s.strip() for s in line.split("=", 1))
            if k in out:
                raise ValidationError(f"{path}:{n}: repeated key {k!r}")
            out[k] = v
    return out


def write_keyvalue(path, items: Mapping[str, object]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k, v in items.items():
            fh.write(f"{k} = {fmt(v)}\n")


def read_params(path) -> SolowParams:
    kv = read_keyvalue(path)
    names = {f.name for f in fields(SolowParams)}
    unknown = sorted(set(kv) - names)
    if unknown:
        raise ValidationError(f"{path}: unknown parameter(s) {', '.join(unknown)}")
    try:
        vals = {k: (v if k == "saving_mode" else float(v)) for k, v in kv.items()}
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    return SolowParams(**vals)


def write_params(path, p: SolowParams) -> None:
    write_keyvalue(path, {f.name: getattr(p, f.name) for f in fields(SolowParams)})


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def write_table(path, table) -> None:
    """Write any output object (or a list of same-typed objects) to ``path``."""
    _write(table, path)


@singledispatch
def _write(table, path) -> None:
    raise TypeError(f"no table format for {type(table).__name__}")


_write.register(TradeFlows, lambda t, path: write_trade(path, t))
_write.register(MacroPanel, lambda t, path: write_macro(path, t))
_write.register(RcaMatrix, lambda t, path: write_rca(path, [t]))
_write.register(CountryProductMatrix, lambda t, path: write_matrix(path, [t]))
_write.register(FitnessResult, lambda t, path: write_fitness(path, [t]))
_write.register(KernelEstimate, lambda t, path: write_kernel(path, t))
_write.register(EquilibriumSet, lambda t, path: write_equilibria(path, t))
_write.register(SolowParams, lambda t, path: write_params(path, t))

_SEQ_WRITERS = {
    RcaMatrix: write_rca,
    CountryProductMatrix: write_matrix,
    FitnessResult: write_fitness,
    GrowthDecomposition: write_decomposition,
    DetrendedRow: write_detrended,
    TrajectoryPoint: write_trajectory,
}


@_write.register(list)
@_write.register(tuple)
def _write_seq(table, path) -> None:
    if not table:
        raise ValidationError("cannot infer the format of an empty table")
    kinds = {type(t) for t in table}
    kind = kinds.pop() if len(kinds) == 1 else None
    if kind not in _SEQ_WRITERS:
        raise TypeError("no table format for this sequence")
    _SEQ_WRITERS[kind](path, table)
