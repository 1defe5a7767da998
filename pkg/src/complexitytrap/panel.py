"""Core domain types shared across the package.

All containers are immutable once built. Numeric arrays held by them are
flagged read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np


class ValidationError(ValueError):
    """Input data violates a domain invariant."""


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Trade flows
# ---------------------------------------------------------------------------

class TradeRecord(NamedTuple):
    year: int
    country: str
    product: str
    value: float


@dataclass(frozen=True)
class TradeFlows:
    """Export flows keyed by unique (year, country, product)."""

    records: tuple[TradeRecord, ...]

    def __post_init__(self):
        recs = tuple(TradeRecord(int(r[0]), str(r[1]), str(r[2]), float(r[3]))
                     for r in self.records)
        seen = set()
        for r in recs:
            if not (math.isfinite(r.value) and r.value > 0):
                raise ValidationError(
                    f"non-positive export value {r.value!r} for {r[:3]}")
            key = r[:3]
            if key in seen:
                raise ValidationError(f"duplicate trade record {key}")
            seen.add(key)
        object.__setattr__(self, "records", recs)

    def __len__(self):
        return len(self.records)

    def years(self) -> list[int]:
        return sorted({r.year for r in self.records})

    def for_year(self, year: int) -> list[TradeRecord]:
        return [r for r in self.records if r.year == year]


# ---------------------------------------------------------------------------
# Country-product matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CountryProductMatrix:
    """Binary export matrix ``m[c, p]`` for one year.

    Rows and columns that are entirely zero are not allowed; cleaning code
    drops them before construction and records them in ``dropped_countries``
    and ``dropped_products``.
    """

    year: int
    countries: tuple[str, ...]
    products: tuple[str, ...]
    m: np.ndarray
    dropped_countries: tuple[str, ...] = ()
    dropped_products: tuple[str, ...] = ()

    def __post_init__(self):
        m = np.asarray(self.m)
        object.__setattr__(self, "countries", tuple(self.countries))
        object.__setattr__(self, "products", tuple(self.products))
        if m.ndim != 2 or m.shape != (len(self.countries), len(self.products)):
            raise ValidationError(
                f"matrix shape {m.shape} does not match "
                f"{len(self.countries)} countries x {len(self.products)} products")
        if m.size == 0:
            raise ValidationError("empty country-product matrix")
        if not np.isin(m, (0, 1)).all():
            raise ValidationError("matrix entries must be 0 or 1")
        if (m.sum(axis=1) == 0).any() or (m.sum(axis=0) == 0).any():
            raise ValidationError("matrix has an all-zero row or column")
        if len(set(self.countries)) != len(self.countries) or \
                len(set(self.products)) != len(self.products):
            raise ValidationError("duplicate country or product code")
        object.__setattr__(self, "m", _frozen(m, dtype=np.int8))
        object.__setattr__(self, "dropped_countries", tuple(self.dropped_countries))
        object.__setattr__(self, "dropped_products", tuple(self.dropped_products))

    def __eq__(self, other):
        if not isinstance(other, CountryProductMatrix):
            return NotImplemented
        return (self.year == other.year and self.countries == other.countries
                and self.products == other.products
                and np.array_equal(self.m, other.m))

    @property
    def shape(self) -> tuple[int, int]:
        return self.m.shape


# ---------------------------------------------------------------------------
# Macro panel
# ---------------------------------------------------------------------------

MACRO_FIELDS = ("gdp_pc", "capital_pc", "employment_rate", "human_capital",
                "labor_share", "population")


class MacroObservation(NamedTuple):
    """One (country, year) row. ``None`` marks a missing field."""

    country: str
    year: int
    gdp_pc: Optional[float] = None
    capital_pc: Optional[float] = None
    employment_rate: Optional[float] = None
    human_capital: Optional[float] = None
    labor_share: Optional[float] = None
    population: Optional[float] = None


def _field_violation(name: str, value) -> Optional[str]:
    if value is None:
        return None
    if not math.isfinite(value):
        return "not finite"
    if name == "employment_rate":
        ok = 0 < value <= 1
        bound = "outside (0, 1]"
    elif name == "labor_share":
        ok = 0 < value < 1
        bound = "outside (0, 1)"
    else:
        ok = value > 0
        bound = "not positive"
    return None if ok else bound


@dataclass(frozen=True)
class MacroPanel:
    """Per (country, year) macro observations, sorted by country then year."""

    observations: tuple[MacroObservation, ...]

    def __post_init__(self):
        obs = []
        for o in self.observations:
            o = MacroObservation(*o)
            vals = [None if v is None else float(v) for v in o[2:]]
            obs.append(MacroObservation(str(o.country), int(o.year), *vals))
        obs.sort(key=lambda o: (o.country, o.year))
        keys = [(o.country, o.year) for o in obs]
        if len(set(keys)) != len(keys):
            raise ValidationError("duplicate (country, year) observation")
        object.__setattr__(self, "observations", tuple(obs))
        object.__setattr__(self, "_index", {k: o for k, o in zip(keys, obs)})

    def __len__(self):
        return len(self.observations)

    def countries(self) -> list[str]:
        return sorted({o.country for o in self.observations})

    def years(self, country: Optional[str] = None) -> list[int]:
        return sorted({o.year for o in self.observations
                       if country is None or o.country == country})

    def get(self, country: str, year: int) -> Optional[MacroObservation]:
        return self._index.get((country, year))

    def series(self, country: str, name: str) -> dict[int, float]:
        """Non-missing values of one field for one country, keyed by year."""
        return {o.year: getattr(o, name) for o in self.observations
                if o.country == country and getattr(o, name) is not None}


class Violation(NamedTuple):
    country: str
    year: Optional[int]
    field: str
    reason: str


def validate_panel(panel: MacroPanel) -> list[Violation]:
    """Every broken invariant of ``panel``; empty when the panel is valid."""
    out = []
    for o in panel.observations:
        for name in MACRO_FIELDS:
            why = _field_violation(name, getattr(o, name))
            if why:
                out.append(Violation(o.country, o.year, name, why))
    for c in panel.countries():
        years = set(panel.years(c))
        if not any(y - 1 in years for y in years):
            out.append(Violation(c, min(years), "year",
                                 "insufficient consecutive years"))
    return out


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FitnessResult:
    """Converged (or budget-limited) fitness and complexity for one year."""

    year: int
    countries: tuple[str, ...]
    products: tuple[str, ...]
    fitness: np.ndarray
    complexity: np.ndarray
    iterations: int
    converged: bool
    rank_stable_at: int
    floored: bool = False
    n_components: int = 1

    def __post_init__(self):
        object.__setattr__(self, "countries", tuple(self.countries))
        object.__setattr__(self, "products", tuple(self.products))
        object.__setattr__(self, "fitness", _frozen(self.fitness))
        object.__setattr__(self, "complexity", _frozen(self.complexity))
        if self.fitness.shape != (len(self.countries),) or \
                self.complexity.shape != (len(self.products),):
            raise ValidationError("fitness/complexity length mismatch")

    def fitness_map(self) -> dict[str, float]:
        return dict(zip(self.countries, self.fitness.tolist()))

    def complexity_map(self) -> dict[str, float]:
        return dict(zip(self.products, self.complexity.tolist()))


@dataclass(frozen=True)
class GrowthDecomposition:
    country: str
    year: int
    y: float
    a: float
    alpha: float
    term_k: float
    term_e: float
    term_h: float
    input_growth: float


@dataclass(frozen=True)
class DetrendedRow:
    country: str
    year: int
    relative_gdp: float
    input_growth: float


@dataclass(frozen=True, eq=False)
class KernelEstimate:
    """Kernel regression evaluated on a grid.

    ``grid`` has shape ``(G,)`` for one conditioning variable and ``(G, 2)``
    for two. ``ci_low``/``ci_high`` are ``None`` when no bootstrap was run.
    """

    grid: np.ndarray
    estimate: np.ndarray
    bandwidth: tuple[float, ...]
    n_effective: np.ndarray
    supported: np.ndarray
    ci_low: Optional[np.ndarray] = None
    ci_high: Optional[np.ndarray] = None
    n_omitted: int = 0

    def __post_init__(self):
        object.__setattr__(self, "bandwidth", tuple(float(h) for h in self.bandwidth))
        if not all(h > 0 for h in self.bandwidth):
            raise ValidationError("bandwidths must be positive")
        for name in ("grid", "estimate", "n_effective"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "supported", _frozen(self.supported, dtype=bool))
        if (self.ci_low is None) != (self.ci_high is None):
            raise ValidationError("ci_low and ci_high must both be set or both be None")
        if self.ci_low is not None:
            object.__setattr__(self, "ci_low", _frozen(self.ci_low))
            object.__setattr__(self, "ci_high", _frozen(self.ci_high))

    @property
    def dim(self) -> int:
        return 1 if self.grid.ndim == 1 else self.grid.shape[1]

    def __eq__(self, other):
        if not isinstance(other, KernelEstimate):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return np.array_equal(a, b, equal_nan=True)

        return (self.bandwidth == other.bandwidth
                and all(same(getattr(self, n), getattr(other, n))
                        for n in ("grid", "estimate", "n_effective", "supported",
                                  "ci_low", "ci_high")))


@dataclass(frozen=True)
class SolowParams:
    """Parameters of the one-sector capital accumulation map."""

    A: float = 1.0
    alpha: float = 0.5
    L: float = 1.0
    delta: float = 0.1
    s_max: float = 0.2
    K_F: float = 0.0
    saving_mode: str = "constant"

    def __post_init__(self):
        checks = [
            (self.A > 0, "A must be > 0"),
            (0 < self.alpha < 1, "alpha must lie in (0, 1)"),
            (self.L > 0, "L must be > 0"),
            (0 < self.delta < 1, "delta must lie in (0, 1)"),
            (0 < self.s_max < 1, "s_max must lie in (0, 1)"),
            (self.K_F >= 0, "K_F must be >= 0"),
            (self.saving_mode in ("constant", "sigmoid"),
             "saving_mode must be 'constant' or 'sigmoid'"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValidationError(msg)


class Equilibrium(NamedTuple):
    k_star: float
    stability: str  # "stable" | "unstable"


@dataclass(frozen=True)
class EquilibriumSet:
    equilibria: tuple[Equilibrium, ...]
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        eqs = tuple(Equilibrium(float(k), str(s)) for k, s in self.equilibria)
        ks = [e.k_star for e in eqs]
        if ks != sorted(ks):
            raise ValidationError("equilibria must be sorted by k_star")
        if any(e.stability not in ("stable", "unstable") for e in eqs):
            raise ValidationError("stability must be 'stable' or 'unstable'")
        object.__setattr__(self, "equilibria", eqs)
        object.__setattr__(self, "diagnostics", tuple(self.diagnostics))

    def __iter__(self):
        return iter(self.equilibria)

    def __len__(self):
        return len(self.equilibria)

    def positive(self) -> list[Equilibrium]:
        return [e for e in self.equilibria if e.k_star > 0]


class TrajectoryPoint(NamedTuple):
    t: int
    k: float
    y: float
    s: float
