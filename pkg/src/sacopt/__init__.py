"""Derivative-free optimisation by sampling and classification.

Modules:

``problems``  benchmark objectives on boxes and their sublevel sets
``geometry``  balls, sampling, Monte Carlo measures, minimum enclosing balls
``learners``  threshold labelling and ball classifiers
``engine``    the sampling-and-learning loop and uniform search
``theory``    query-complexity and success-probability bounds
``harness``   experiment configs, PAA estimation, reports and the CLI
"""
from .engine import RunResult, SacConfig, default_schedule, run_sac, run_uniform
from .problems import DomainError, SphereProblem, SpikeProblem, make_problem

__all__ = ["DomainError", "RunResult", "SacConfig", "SphereProblem", "SpikeProblem", "default_schedule",
           "make_problem", "run_sac", "run_uniform"]
__version__ = "0.1.0"
