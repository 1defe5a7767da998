"""Balassa revealed comparative advantage and the binary export matrix."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .panel import (CountryProductMatrix, FitnessResult, TradeFlows,
                    ValidationError, _frozen)

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RcaMatrix:
    year: int
    countries: tuple[str, ...]
    products: tuple[str, ...]
    rca: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rca, dtype=float)
        if r.shape != (len(self.countries), len(self.products)):
            raise ValidationError("rca shape does not match index lists")
        if not np.isfinite(r).all() or (r < 0).any():
            raise ValidationError("rca values must be finite and non-negative")
        object.__setattr__(self, "countries", tuple(self.countries))
        object.__setattr__(self, "products", tuple(self.products))
        object.__setattr__(self, "rca", _frozen(r))


def export_matrix(flows: TradeFlows, year: int):
    """Dense export-value matrix for ``year`` with sorted index lists."""
    recs = flows.for_year(year)
    if not recs:
        raise ValidationError(f"no trade data for year {year}")
    countries = sorted({r.country for r in recs})
    products = sorted({r.product for r in recs})
    ci = {c: i for i, c in enumerate(countries)}
    pi = {p: j for j, p in enumerate(products)}
    x = np.zeros((len(countries), len(products)))
    for r in recs:
        x[ci[r.country], pi[r.product]] = r.value
    return countries, products, x


def rca_from_values(x: np.ndarray) -> np.ndarray:
    """RCA of a dense export matrix whose row and column totals are positive."""
    x = np.asarray(x, dtype=float)
    country_tot = x.sum(axis=1, keepdims=True)
    product_tot = x.sum(axis=0, keepdims=True)
    return (x / country_tot) / (product_tot / x.sum())


def compute_rca(flows: TradeFlows, year: int) -> RcaMatrix:
    """Balassa index ``(x_cp / X_c) / (X_p / X)`` for every country and product.

    Countries and products with zero total exports cannot occur after
    ingestion (all stored flows are positive), so nothing is dropped here.
    """
    countries, products, x = export_matrix(flows, year)
    return RcaMatrix(year, tuple(countries), tuple(products), rca_from_values(x))


def binarize(rca: RcaMatrix, threshold: float = 1.0) -> CountryProductMatrix:
    """``m[c, p] = 1`` iff ``rca[c, p] >= threshold``, then drop empty rows/columns.

    One pass is enough: removing an all-zero row never empties a column.
    """
    if not threshold > 0:
        raise ValidationError("threshold must be positive")
    m = (rca.rca >= threshold).astype(np.int8)
    keep_c = m.sum(axis=1) > 0
    keep_p = m.sum(axis=0) > 0
    dropped_c = tuple(c for c, k in zip(rca.countries, keep_c) if not k)
    dropped_p = tuple(p for p, k in zip(rca.products, keep_p) if not k)
    if not keep_c.any() or not keep_p.any():
        raise ValidationError(
            f"binarized matrix for year {rca.year} is empty at threshold {threshold}")
    if dropped_c or dropped_p:
        log.info("year %s: dropped %d countries and %d products with no RCA >= %g",
                 rca.year, len(dropped_c), len(dropped_p), threshold)
    return CountryProductMatrix(
        year=rca.year,
        countries=[c for c, k in zip(rca.countries, keep_c) if k],
        products=[p for p, k in zip(rca.products, keep_p) if k],
        m=m[np.ix_(keep_c, keep_p)],
        dropped_countries=dropped_c,
        dropped_products=dropped_p,
    )


def diversification(m: CountryProductMatrix) -> dict[str, int]:
    return dict(zip(m.countries, m.m.sum(axis=1).astype(int).tolist()))


def ubiquity(m: CountryProductMatrix) -> dict[str, int]:
    return dict(zip(m.products, m.m.sum(axis=0).astype(int).tolist()))


def order_matrix(m: CountryProductMatrix, fit: FitnessResult) -> CountryProductMatrix:
    """Permute rows by descending fitness and columns by ascending complexity.

    Ties keep the incoming order. The result is the data behind the usual
    triangular picture of the export matrix.
    """
    fmap, qmap = fit.fitness_map(), fit.complexity_map()
    missing = [c for c in m.countries if c not in fmap] + \
              [p for p in m.products if p not in qmap]
    if missing:
        raise ValidationError(f"fitness result lacks keys: {', '.join(missing)}")
    f = np.array([fmap[c] for c in m.countries])
    q = np.array([qmap[p] for p in m.products])
    rows = np.argsort(-f, kind="stable")
    cols = np.argsort(q, kind="stable")
    return CountryProductMatrix(
        year=m.year,
        countries=[m.countries[i] for i in rows],
        products=[m.products[j] for j in cols],
        m=m.m[np.ix_(rows, cols)],
        dropped_countries=m.dropped_countries,
        dropped_products=m.dropped_products,
    )
