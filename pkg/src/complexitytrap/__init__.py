"""Economic fitness, growth accounting and poverty-trap dynamics."""

__version__ = "0.1.0"

from .panel import (CountryProductMatrix, DetrendedRow, Equilibrium,
                    EquilibriumSet, FitnessResult, GrowthDecomposition,
                    KernelEstimate, MacroObservation, MacroPanel, SolowParams,
                    TradeFlows, TradeRecord, TrajectoryPoint, ValidationError,
                    validate_panel)
from .rca import RcaMatrix, binarize, compute_rca, order_matrix
from .fitness import fitness_step, iterate_fitness, rank_of
from .growth import decompose, decompose_panel, detrend, spearman, tertile_split
from .kernel import bootstrap_band, kernel_1d, kernel_2d, nw_1d, nw_2d
from .solow import find_equilibria, production, saving_rate, simulate, step_capital
from .synth import SynthConfig, synth_world
from .ingest import parse_macro_csv, parse_trade_csv, write_table

__all__ = [
    "CountryProductMatrix", "DetrendedRow", "Equilibrium", "EquilibriumSet",
    "FitnessResult", "GrowthDecomposition", "KernelEstimate", "MacroObservation",
    "MacroPanel", "RcaMatrix", "SolowParams", "SynthConfig", "TradeFlows",
    "TradeRecord", "TrajectoryPoint", "ValidationError", "binarize",
    "bootstrap_band", "compute_rca", "decompose", "decompose_panel", "detrend",
    "find_equilibria", "fitness_step", "iterate_fitness", "kernel_1d",
    "kernel_2d", "nw_1d", "nw_2d", "order_matrix", "parse_macro_csv",
    "parse_trade_csv", "production", "rank_of", "saving_rate", "simulate",
    "spearman", "step_capital", "synth_world", "tertile_split",
    "validate_panel", "write_table",
]
