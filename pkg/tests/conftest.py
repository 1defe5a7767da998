import numpy as np
import pytest

from complexitytrap.panel import CountryProductMatrix, MacroObservation, MacroPanel


def cpm(rows, year=2000, countries=None, products=None):
    m = np.asarray(rows)
    countries = countries or [f"C{i}" for i in range(m.shape[0])]
    products = products or [f"P{j}" for j in range(m.shape[1])]
    return CountryProductMatrix(year, countries, products, m)


def obs(country, year, gdp=1.0, k=1.0, e=0.5, h=2.0, ls=0.6, pop=1e6):
    return MacroObservation(country, year, gdp, k, e, h, ls, pop)


@pytest.fixture
def two_country_panel():
    return MacroPanel(tuple(obs(c, y, gdp=1.0 + 0.1 * t, k=2.0 + t)
                            for c in ("AAA", "BBB")
                            for t, y in enumerate((2000, 2001, 2002))))


def random_binary(rng, max_rows=30, max_cols=50):
    """Random binary matrix without empty rows or columns."""
    n = int(rng.integers(2, max_rows + 1))
    p = int(rng.integers(2, max_cols + 1))
    m = (rng.random((n, p)) < rng.uniform(0.2, 0.7)).astype(int)
    m[np.arange(n), rng.integers(0, p, n)] = 1
    m[rng.integers(0, n, p), np.arange(p)] = 1
    return m
