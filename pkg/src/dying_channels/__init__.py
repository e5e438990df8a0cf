"""Blocklength scheduling for channels that die at a random time."""
from .codesize import (AlwaysAdmissible, BoundedDistanceTail, CodeEntry, CodeTableModel,
                       SpherePackingModel, StrassenModel, decoding_radius, load_code_table,
                       repetition_error_floor)
from .death import (DiscreteWeibull, Empirical, FiniteUniform, Geometric, load_empirical,
                    load_empirical_csv, parse_death)
from .dmc import ChannelModel, ChannelScalars, blahut_arimoto, bsc_scalars, general_dmc_scalars
from .optimizer import (OptimizationReport, Partition, check_global_optimality,
                        check_local_optimality, check_neighborhood_optimality,
                        dp_schedule, dp_schedule_explicit_state,
                        evaluate_volume, exhaustive_schedule, greedy_schedule,
                        optimal_epoch_size, solve)
from .ordering import combined_order, output_degradation, stochastic_dominance
from .simulator import SimulationResult, simulate, sweep

__all__ = [
    "AlwaysAdmissible", "BoundedDistanceTail", "ChannelModel", "ChannelScalars", "CodeEntry",
    "CodeTableModel", "DiscreteWeibull", "Empirical", "FiniteUniform", "Geometric",
    "OptimizationReport", "Partition", "SimulationResult", "SpherePackingModel",
    "StrassenModel", "blahut_arimoto", "bsc_scalars", "check_global_optimality",
    "check_local_optimality", "check_neighborhood_optimality", "combined_order",
    "decoding_radius", "dp_schedule",
    "dp_schedule_explicit_state", "evaluate_volume", "exhaustive_schedule", "general_dmc_scalars",
    "greedy_schedule", "load_code_table", "load_empirical", "load_empirical_csv",
    "optimal_epoch_size", "output_degradation", "parse_death", "repetition_error_floor",
    "simulate", "solve", "stochastic_dominance", "sweep",
]
__version__ = "0.1.0"
