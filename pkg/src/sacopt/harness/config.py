"""Experiment configuration files.

A config is a flat JSON object. Keys (defaults in brackets):

=================  ==========================================================
``problem``        ``"sphere"`` or ``"spike"``
``n``              dimension, integer >= 1
``x_star``         explicit optimum (list of n floats) [null]
``problem_seed``   seed for drawing ``x_star`` uniformly when it is null [null]
``algorithms``     list drawn from ``"uniform"``, ``"sac1"``, ``"sac2"``
``alpha_stars``    list of approximation levels in (0, 1)
``delta``          failure probability in (0, 1) [0.1]
``trials``         independent trials per level, R >= 1 [1000]
``budget``         per-trial query cap >= 1 [10000000]
``seed``           master seed, non-negative integer [0]
``sample_scale``   multiplier on the scheduled sample sizes [1.0]
``mc_samples``     Monte Carlo points per measure estimate [100000]
``bootstrap``      bootstrap resamples for slope intervals [200]
``diagnostic_runs`` completion-mode runs per level in condition reports [10]
``out``            output directory ["results"]
=================  ==========================================================

Unknown keys are rejected.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    """Malformed or invalid experiment configuration."""


ALGORITHMS = ("uniform", "sac1", "sac2")
PROBLEMS = ("sphere", "spike")


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    n: int
    algorithms: tuple[str, ...]
    alpha_stars: tuple[float, ...]
    x_star: tuple[float, ...] | None = None
    problem_seed: int | None = None
    delta: float = 0.1
    trials: int = 1000
    budget: int = 10_000_000
    seed: int = 0
    sample_scale: float = 1.0
    mc_samples: int = 100_000
    bootstrap: int = 200
    diagnostic_runs: int = 10
    out: str = "results"

    def __post_init__(self):
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "alpha_stars", tuple(float(a) for a in self.alpha_stars))
        if self.x_star is not None:
            object.__setattr__(self, "x_star", tuple(float(v) for v in self.x_star))
        self.validate()

    def validate(self):
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.problem in PROBLEMS, f"problem must be one of {PROBLEMS}")
        need(isinstance(self.n, int) and self.n >= 1, "n must be a positive integer")
        need(len(self.algorithms) >= 1 and all(a in ALGORITHMS for a in self.algorithms),
             f"algorithms must be a non-empty list drawn from {ALGORITHMS}")
        need(len(set(self.algorithms)) == len(self.algorithms), "algorithms must not repeat")
        need(len(self.alpha_stars) >= 1 and all(0.0 < a < 1.0 for a in self.alpha_stars),
             "alpha_stars must be a non-empty list of values in (0, 1)")
        need(self.x_star is not None or self.problem_seed is not None,
             "give either x_star or problem_seed")
        if self.x_star is not None:
            need(len(self.x_star) == self.n, "x_star must have n entries")
        need(0.0 < self.delta < 1.0, "delta must lie in (0, 1)")
        for key in ("trials", "budget", "mc_samples", "bootstrap", "diagnostic_runs"):
            value = getattr(self, key)
            need(isinstance(value, int) and value >= 1, f"{key} must be a positive integer")
        need(isinstance(self.seed, int) and self.seed >= 0, "seed must be a non-negative integer")
        need(math.isfinite(self.sample_scale) and self.sample_scale > 0, "sample_scale must be positive")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("algorithms", "alpha_stars", "x_star"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}
_REQUIRED = {f.name for f in dataclasses.fields(ExperimentConfig)
             if f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING}


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - _FIELDS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted(_REQUIRED - set(raw))
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    try:
        return ExperimentConfig(**raw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return config_from_dict(raw)


def save_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
