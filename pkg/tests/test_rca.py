import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from complexitytrap.panel import FitnessResult, TradeFlows, TradeRecord, ValidationError
from complexitytrap.rca import (RcaMatrix, binarize, compute_rca, diversification,
                                order_matrix, rca_from_values, ubiquity)

from conftest import cpm


def flows_from(x, year=2000):
    recs = [TradeRecord(year, f"C{i}", f"P{j}", float(v))
            for (i, j), v in np.ndenumerate(np.asarray(x)) if v > 0]
    return TradeFlows(tuple(recs))


def rca(values):
    values = np.asarray(values, dtype=float)
    return RcaMatrix(2000, [f"C{i}" for i in range(values.shape[0])],
                     [f"P{j}" for j in range(values.shape[1])], values)


def test_rca_diagonal():
    r = compute_rca(flows_from([[10, 0], [0, 10]]), 2000)
    assert np.array_equal(r.rca, [[2, 0], [0, 2]])


def test_rca_single_cell():
    assert compute_rca(flows_from([[5]]), 2000).rca.tolist() == [[1.0]]


def test_rca_uniform():
    r = compute_rca(flows_from(np.full((3, 4), 7.0)), 2000)
    assert np.allclose(r.rca, 1.0, rtol=0, atol=1e-15)


def test_rca_missing_year_names_it():
    with pytest.raises(ValidationError, match="1999"):
        compute_rca(flows_from([[1]]), 1999)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_rca_scale_free(seed, c):
    x = np.random.default_rng(seed).uniform(0.1, 10, size=(4, 5))
    assert np.allclose(rca_from_values(x), rca_from_values(c * x), rtol=1e-12)


def test_binarize_identity():
    m = binarize(rca([[2, 0], [0, 2]]))
    assert m.m.tolist() == [[1, 0], [0, 1]]


def test_binarize_inclusive_threshold():
    assert binarize(rca(np.ones((2, 3)))).m.tolist() == [[1, 1, 1], [1, 1, 1]]


def test_binarize_empty_is_error():
    with pytest.raises(ValidationError):
        binarize(rca(np.full((2, 2), 0.5)))


def test_binarize_drops_and_records_empty_lines():
    m = binarize(rca([[2, 0, 0], [0.5, 0.2, 0.1], [0, 3, 0]]))
    assert m.countries == ("C0", "C2")
    assert m.products == ("P0", "P1")
    assert m.dropped_countries == ("C1",)
    assert m.dropped_products == ("P2",)


def test_diversification_and_ubiquity():
    assert diversification(cpm([[1, 0], [0, 1]])) == {"C0": 1, "C1": 1}
    m = cpm([[1, 1], [0, 1]], countries=["A", "B"])
    assert diversification(m) == {"A": 2, "B": 1}
    assert set(diversification(cpm(np.ones((3, 4)))).values()) == {4}
    assert ubiquity(m) == {"P0": 1, "P1": 2}


def fit_for(m, f, q):
    return FitnessResult(m.year, m.countries, m.products, f, q, 1, True, 0)


def test_order_sorted_is_identity():
    m = cpm([[1, 1], [1, 0]])
    out = order_matrix(m, fit_for(m, [1.5, 0.5], [0.5, 1.5]))
    assert out == m


def test_order_swaps_rows_back():
    m = cpm([[1, 0], [1, 1]], countries=["B", "A"])
    out = order_matrix(m, fit_for(m, [0.5, 1.5], [1.0, 1.0]))
    assert out.countries == ("A", "B")
    assert out.m.tolist() == [[1, 1], [1, 0]]


def test_order_recovers_nested_form():
    nested = np.tril(np.ones((3, 3), dtype=int))[::-1]  # row 0 exports everything
    rng = np.random.default_rng(3)
    r, c = rng.permutation(3), rng.permutation(3)
    m = cpm(nested[np.ix_(r, c)])
    true_f = np.array([3.0, 2.0, 1.0])[r]
    true_q = np.array([1.0, 2.0, 3.0])[c]
    out = order_matrix(m, fit_for(m, true_f, true_q))
    assert out.m.tolist() == nested.tolist()
    assert sorted(out.m.ravel()) == sorted(m.m.ravel())


def test_order_missing_keys():
    m = cpm([[1]])
    other = FitnessResult(2000, ["X"], ["P0"], [1.0], [1.0], 1, True, 0)
    with pytest.raises(ValidationError, match="C0"):
        order_matrix(m, other)
