"""Uplink AP-UE antenna selection for radio stripe networks.

A radio stripe chains access points on one fronthaul cable; each AP refines
the uplink signal estimate in turn. This package simulates such a network
down to MMSE channel estimates, evaluates sequential MRC and OSLP detection
for a given antenna selection, and searches selections with an adaptive
genetic algorithm run centrally or AP by AP.
"""

from .detection import SumSEEvaluator, centralized_lmmse_oracle, run_sequential_detection
from .experiment import emit_csv, run_adaptability, run_experiment
from .network import build_network
from .optimizer import STRATEGIES, run_strategy
from .scenario import GaConfig, ScenarioConfig, load_config, preset

__all__ = [
    "STRATEGIES",
    "GaConfig",
    "ScenarioConfig",
    "SumSEEvaluator",
    "build_network",
    "centralized_lmmse_oracle",
    "emit_csv",
    "load_config",
    "preset",
    "run_adaptability",
    "run_experiment",
    "run_sequential_detection",
    "run_strategy",
]
