"""Experiment harness: configs, PAA estimation, condition checks, reports."""
from .conditions import ConditionRow, condition_report
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config, save_config
from .paa import PAAEstimate, SlopeReport, TrialResult, estimate_paa, fit_slopes, scaling_sweep
from .report import emit_report, read_estimates, read_trials

__all__ = ["ConditionRow", "ConfigError", "ExperimentConfig", "PAAEstimate", "SlopeReport", "TrialResult",
           "condition_report", "config_from_dict", "emit_report", "estimate_paa", "fit_slopes", "load_config",
           "read_estimates", "read_trials", "save_config", "scaling_sweep"]
