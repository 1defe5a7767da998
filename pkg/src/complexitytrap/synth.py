"""Synthetic multi-country world in which the take-off threshold falls with fitness.

Each country follows the sigmoid-saving capital map with subsistence
threshold ``K_F = kf0 / F``. Employment and schooling rise only while the
country is in its high-growth phase. Exports follow a nested staircase whose
depth is proportional to fitness, with random cell flips, so fitness can be
recovered from the trade table alone.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .panel import (MacroObservation, MacroPanel, SolowParams, TradeFlows,
                    TradeRecord, ValidationError)
from .solow import net_investment, production, simulate

_MACRO_STREAM = 0
_TRADE_STREAM = 1


@dataclass(frozen=True)
class SynthConfig:
    kf0: float = 4.0
    A: float = 1.5
    alpha: float = 0.4
    delta: float = 0.05
    s_max: float = 0.4
    # initial capital is log-uniform on [k0_min, k0_max], independent of fitness
    k0_min: float = 0.5
    k0_max: float = 32.0
    a_noise_sd: float = 0.01
    # high-growth phase: net investment above this fraction of delta * K
    takeoff_fraction: float = 0.25
    employment_start: float = 0.4
    employment_max: float = 0.6
    schooling_start: float = 4.0
    schooling_max: float = 8.0
    catch_up_speed: float = 0.1
    labor_share: float = 0.6
    n_products: int = 60
    flip_rate: float = 0.05
    export_noise_sd: float = 0.3
    year0: int = 1960

    def as_dict(self) -> dict:
        return asdict(self)


class SyntheticWorld(NamedTuple):
    panel: MacroPanel
    flows: TradeFlows
    true_fitness: dict[str, float]


def default_fitness_levels(n: int) -> list[float]:
    """``n`` levels spaced evenly in log over one decade, [0.25, 2.5]."""
    return np.geomspace(0.25, 2.5, n).tolist()


def country_codes(n: int) -> list[str]:
    width = max(2, len(str(n - 1)))
    return [f"C{i:0{width}d}" for i in range(n)]


def product_codes(n: int) -> list[str]:
    width = max(3, len(str(n - 1)))
    return [f"P{j:0{width}d}" for j in range(n)]


def country_params(fitness: float, cfg: SynthConfig) -> SolowParams:
    return SolowParams(A=cfg.A, alpha=cfg.alpha, L=1.0, delta=cfg.delta,
                       s_max=cfg.s_max, K_F=cfg.kf0 / fitness,
                       saving_mode="sigmoid")


def _country_macro(code: str, fitness: float, T: int, rng, cfg: SynthConfig):
    p = country_params(fitness, cfg)
    k0 = float(np.exp(rng.uniform(np.log(cfg.k0_min), np.log(cfg.k0_max))))
    population = float(np.exp(rng.normal(np.log(1e7), 1.0)))
    ks = np.array([pt.k for pt in simulate(p, k0, T - 1)])
    a_noise = np.exp(rng.normal(0.0, cfg.a_noise_sd, size=T))
    booming = net_investment(p, ks) > cfg.takeoff_fraction * cfg.delta * ks
    emp = np.empty(T)
    school = np.empty(T)
    emp[0], school[0] = cfg.employment_start, cfg.schooling_start
    for t in range(1, T):
        # logistic-style: the step shrinks as the gap to the ceiling closes
        rate = cfg.catch_up_speed if booming[t - 1] else 0.0
        emp[t] = emp[t - 1] + rate * (cfg.employment_max - emp[t - 1])
        school[t] = school[t - 1] + rate * (cfg.schooling_max - school[t - 1])
    labour = (emp * school / (emp[0] * school[0])) ** (1.0 - p.alpha)
    gdp = production(replace(p, A=1.0), ks) * cfg.A * a_noise * labour
    return [MacroObservation(code, cfg.year0 + t, float(gdp[t]), float(ks[t]),
                             float(emp[t]), float(school[t]), cfg.labor_share,
                             population)
            for t in range(T)]


def staircase(fitness: Sequence[float], n_products: int) -> np.ndarray:
    """Nested matrix: country i exports the ``round(P F_i / max F)`` least complex products."""
    f = np.asarray(fitness, dtype=float)
    depth = np.maximum(1, np.rint(n_products * f / f.max())).astype(int)
    return (np.arange(n_products)[None, :] < depth[:, None]).astype(np.int8)


def synth_world(n_countries: int, T: int, seed: int,
                fitness_levels: Sequence[float] | None = None,
                config: SynthConfig | None = None) -> SyntheticWorld:
    """Generate a macro panel, trade flows and the true fitness per country."""
    cfg = config or SynthConfig()
    if fitness_levels is None:
        fitness_levels = default_fitness_levels(n_countries)
    fitness_levels = [float(f) for f in fitness_levels]
    if n_countries != len(fitness_levels):
        raise ValidationError("n_countries must equal the number of fitness levels")
    if n_countries < 6:
        raise ValidationError("synthetic world needs at least 6 countries")
    if T < 20:
        raise ValidationError("synthetic world needs at least 20 periods")
    if not all(f > 0 for f in fitness_levels):
        raise ValidationError("fitness levels must be positive")
    codes = country_codes(n_countries)
    products = product_codes(cfg.n_products)

    obs = []
    for i, (code, f) in enumerate(zip(codes, fitness_levels)):
        rng = np.random.default_rng([seed, _MACRO_STREAM, i])
        obs.extend(_country_macro(code, f, T, rng, cfg))
    panel = MacroPanel(tuple(obs))

    planted = staircase(fitness_levels, cfg.n_products)
    size = {o.country: o.population for o in obs}
    records = []
    for t in range(T):
        rng = np.random.default_rng([seed, _TRADE_STREAM, t])
        flips = rng.random(planted.shape) < cfg.flip_rate
        m = planted ^ flips
        noise = np.exp(rng.normal(0.0, cfg.export_noise_sd, size=planted.shape))
        for i, j in zip(*np.nonzero(m)):
            value = size[codes[i]] * 1e-3 * noise[i, j]
            records.append(TradeRecord(cfg.year0 + t, codes[i], products[j], float(value)))
    flows = TradeFlows(tuple(records))
    return SyntheticWorld(panel, flows, dict(zip(codes, fitness_levels)))
