import numpy as np
import pytest

from complexitytrap.panel import (CountryProductMatrix, EquilibriumSet,
                                  KernelEstimate, MacroPanel, SolowParams,
                                  TradeFlows, TradeRecord, ValidationError,
                                  validate_panel)

from conftest import cpm, obs


def test_trade_flows_reject_non_positive_and_duplicates():
    with pytest.raises(ValidationError):
        TradeFlows((TradeRecord(2000, "A", "p", 0.0),))
    with pytest.raises(ValidationError):
        TradeFlows((TradeRecord(2000, "A", "p", -1.0),))
    with pytest.raises(ValidationError):
        TradeFlows((TradeRecord(2000, "A", "p", 1.0), TradeRecord(2000, "A", "p", 2.0)))


def test_trade_flows_years_and_lookup():
    f = TradeFlows((TradeRecord(2001, "A", "p", 1.0), TradeRecord(2000, "A", "p", 2.0)))
    assert f.years() == [2000, 2001]
    assert f.for_year(2000) == [TradeRecord(2000, "A", "p", 2.0)]


def test_matrix_rejects_empty_rows_and_bad_shapes():
    with pytest.raises(ValidationError):
        cpm([[1, 0], [0, 0]])
    with pytest.raises(ValidationError):
        CountryProductMatrix(2000, ["A"], ["p", "q"], np.ones((2, 2)))
    with pytest.raises(ValidationError):
        cpm([[1, 2]])
    with pytest.raises(ValidationError):
        CountryProductMatrix(2000, ["A", "A"], ["p"], np.ones((2, 1)))


def test_matrix_is_read_only():
    m = cpm([[1, 1], [0, 1]])
    with pytest.raises(ValueError):
        m.m[0, 0] = 0


def test_validate_panel_flags_out_of_range_field():
    p = MacroPanel((obs("A", 2000, e=1.2), obs("A", 2001)))
    bad = validate_panel(p)
    assert len(bad) == 1
    assert bad[0].field == "employment_rate"


def test_validate_panel_clean(two_country_panel):
    assert validate_panel(two_country_panel) == []


def test_validate_panel_single_year():
    p = MacroPanel((obs("A", 2000), obs("A", 2001), obs("B", 2000)))
    bad = validate_panel(p)
    assert [(v.country, v.reason) for v in bad] == [("B", "insufficient consecutive years")]


def test_panel_rejects_duplicate_observation():
    with pytest.raises(ValidationError):
        MacroPanel((obs("A", 2000), obs("A", 2000)))


def test_panel_series_skips_missing():
    p = MacroPanel((obs("A", 2000), obs("A", 2001)._replace(gdp_pc=None)))
    assert p.series("A", "gdp_pc") == {2000: 1.0}


def test_kernel_estimate_ci_pairing():
    with pytest.raises(ValidationError):
        KernelEstimate([0.0], [1.0], (1.0,), [1.0], [True], ci_low=[0.0])
    with pytest.raises(ValidationError):
        KernelEstimate([0.0], [1.0], (0.0,), [1.0], [True])


def test_solow_params_validation():
    with pytest.raises(ValidationError):
        SolowParams(alpha=1.0)
    with pytest.raises(ValidationError):
        SolowParams(saving_mode="linear")
    with pytest.raises(ValidationError):
        SolowParams(K_F=-1)


def test_equilibrium_set_sorted():
    with pytest.raises(ValidationError):
        EquilibriumSet(((2.0, "stable"), (1.0, "unstable")))
