"""Growth accounting: split GDP-per-capita growth into input and residual parts.

    y = a + alpha k + (1 - alpha) e + (1 - alpha) h

with lowercase letters the log growth rates of GDP per capita, capital per
capita, employment rate and human capital.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .panel import (DetrendedRow, GrowthDecomposition, MacroPanel,
                    ValidationError)

log = logging.getLogger(__name__)

TERTILES = ("low", "mid", "high")


def growth_rate(series: Mapping[int, float]) -> dict[int, float]:
    """Log growth ``ln(X_t / X_{t-1})`` for every year whose predecessor is present."""
    for year, v in series.items():
        if v is None or not v > 0:
            raise ValidationError(f"non-positive value {v!r} in year {year}")
    if len(series) < 2:
        raise ValidationError("growth rates need at least two years")
    rates = {t: math.log(series[t] / series[t - 1])
             for t in sorted(series) if t - 1 in series}
    if not rates:
        raise ValidationError("growth rates need two consecutive years")
    return rates


def estimate_alpha(panel: MacroPanel, country: str, year: int) -> float:
    """Capital share of income, ``1 - labor_share`` for that observation."""
    obs = panel.get(country, year)
    share = None if obs is None else obs.labor_share
    if share is None:
        raise ValidationError(f"missing labor share for {country} {year}")
    if not 0 < share < 1:
        raise ValidationError(f"labor share {share} for {country} {year} outside (0, 1)")
    return 1.0 - share


def _left_sum(a: float, terms: Sequence[float]) -> float:
    s = a
    for t in terms:
        s = s + t
    return s


def _solve_sum(target: float, t: float) -> Optional[float]:
    """A float ``x`` with ``x + t == target`` after rounding, or None."""
    x = target - t
    for _ in range(8):
        s = x + t
        if s == target:
            return float(x)
        x = np.nextafter(x, -math.inf if s > target else math.inf)
    return None


def _residual(y: float, terms: Sequence[float]) -> tuple[float, float]:
    """Residual ``a`` such that ``a + t1 + t2 + ...`` (left to right) equals ``y``.

    ``y - sum(terms)`` is tried first and corrected by the shortfall of the
    rounded sum; failing that,
    the partial sums are solved for from the right. With cancellation
    between terms larger than ``y`` the rounded sum may be unable to land on
    ``y`` at all; ``y`` is then replaced by that sum, an ulp-level change.
    Returns ``(y, a)``.
    """
    a0 = y - sum(terms)
    a = a0
    for _ in range(16):
        s = _left_sum(a, terms)
        if s == y:
            return y, float(a)
        nxt = a + (y - s)
        a = nxt if nxt != a else np.nextafter(a, -math.inf if s > y else math.inf)
    target = y
    for t in reversed(terms):
        target = _solve_sum(target, t)
        if target is None:
            return float(_left_sum(a0, terms)), float(a0)
    return y, target


def split_growth(y: float, k: float, e: float, h: float, alpha: float) -> GrowthDecomposition:
    """Decompose given growth rates; country and year left blank."""
    return _decomposition("", 0, y, k, e, h, alpha)


def _decomposition(country, year, y, k, e, h, alpha) -> GrowthDecomposition:
    if not 0 < alpha < 1:
        raise ValidationError(f"alpha {alpha} outside (0, 1)")
    term_k, term_e, term_h = alpha * k, (1 - alpha) * e, (1 - alpha) * h
    y, a = _residual(y, (term_k, term_e, term_h))
    return GrowthDecomposition(country=country, year=year, y=y, a=a, alpha=alpha,
                               term_k=term_k, term_e=term_e, term_h=term_h,
                               input_growth=term_k + term_e + term_h)


_RATE_FIELDS = ("gdp_pc", "capital_pc", "employment_rate", "human_capital")


def decompose(panel: MacroPanel, country: str, year: int,
              alpha: Optional[float] = None) -> GrowthDecomposition:
    """Growth decomposition of ``country`` between ``year - 1`` and ``year``.

    ``alpha`` overrides the income-share estimate when given.
    """
    rates = []
    for name in _RATE_FIELDS:
        pair = {}
        for t in (year - 1, year):
            obs = panel.get(country, t)
            v = None if obs is None else getattr(obs, name)
            if v is None:
                raise ValidationError(f"missing {name} for {country} {t}")
            pair[t] = v
        rates.append(growth_rate(pair)[year])
    if alpha is None:
        alpha = estimate_alpha(panel, country, year)
    y, k, e, h = rates
    return _decomposition(country, year, y, k, e, h, alpha)


def decompose_panel(panel: MacroPanel, alpha: Optional[float] = None) -> list[GrowthDecomposition]:
    """Every computable decomposition in the panel.

    Observations with a missing field are skipped, not imputed.
    """
    out = []
    for c in panel.countries():
        years = panel.years(c)
        present = set(years)
        for t in years:
            if t - 1 not in present:
                continue
            try:
                out.append(decompose(panel, c, t, alpha))
            except ValidationError as exc:
                log.debug("skipping %s %s: %s", c, t, exc)
    return sorted(out, key=lambda d: (d.year, d.country))


def detrend(decomps: Iterable[GrowthDecomposition],
            gdp: Mapping[tuple[str, int], float]) -> list[DetrendedRow]:
    """Remove the yearly cross-country mean.

    Input growth has the yearly mean subtracted; GDP per capita is divided by
    the yearly mean, giving relative GDP. ``gdp`` maps (country, year) to the
    GDP-per-capita level paired with each decomposition row. Years with fewer
    than two countries are dropped.
    """
    by_year = defaultdict(list)
    for d in decomps:
        by_year[d.year].append(d)
    out = []
    for year in sorted(by_year):
        rows = sorted(by_year[year], key=lambda d: d.country)
        if len(rows) < 2:
            log.warning("year %s has a single country; excluded from detrending", year)
            continue
        ig = np.array([d.input_growth for d in rows])
        lv = np.array([gdp[(d.country, year)] for d in rows])
        ig = ig - ig.mean()
        lv = lv / lv.mean()
        out.extend(DetrendedRow(d.country, year, float(r), float(g))
                   for d, r, g in zip(rows, lv, ig))
    return out


def gdp_levels(panel: MacroPanel) -> dict[tuple[str, int], float]:
    return {(o.country, o.year): o.gdp_pc for o in panel.observations
            if o.gdp_pc is not None}


def tertile_sizes(n: int) -> tuple[int, int, int]:
    """(low, mid, high) group sizes; remainders go to the lower groups."""
    base, rem = divmod(n, 3)
    return base + (rem >= 1), base + (rem >= 2), base


def tertile_split(fitness: Mapping[str, float]) -> dict[str, str]:
    """Label each country low/mid/high by its fitness rank within one year.

    Ties are broken by country code so the split is deterministic.
    """
    if len(fitness) < 3:
        raise ValidationError("tertile split needs at least three countries")
    order = sorted(fitness, key=lambda c: (fitness[c], c))
    n_low, n_mid, _ = tertile_sizes(len(order))
    labels = {}
    for i, c in enumerate(order):
        labels[c] = "low" if i < n_low else "mid" if i < n_low + n_mid else "high"
    return labels


def tertiles_by_year(fitness: Mapping[int, Mapping[str, float]]) -> dict[tuple[str, int], str]:
    out = {}
    for year, fmap in fitness.items():
        for c, lab in tertile_split(fmap).items():
            out[(c, year)] = lab
    return out


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation with average ranks for ties."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("spearman needs two 1-D sequences of equal length")
    if x.size < 2:
        raise ValidationError("spearman needs at least two points")
    rx, ry = rankdata(x), rankdata(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = math.sqrt(float(rx @ rx) * float(ry @ ry))
    if denom == 0:
        raise ValidationError("spearman is undefined for a constant series")
    return float(np.clip(rx @ ry / denom, -1.0, 1.0))
