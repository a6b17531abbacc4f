"""Per-iteration checks of the error-target independence and one-side-error
conditions on completion-mode runs over a Sphere problem."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import geometry
from ..engine import default_schedule, run_sac
from ..problems import SphereProblem, sublevel_measure_sphere
from .config import ConfigError, ExperimentConfig
from .paa import build_problem, trial_seed


@dataclass(frozen=True)
class ConditionRow:
    algorithm: str
    alpha_star: float
    run: int
    t: int
    alpha_t: float
    positives: int
    train_error: float | None
    radius: float | None
    indep_lhs: float | None
    indep_rhs: float | None
    indep_z: float | None
    violation: float | None
    violation_se: float | None
    vol_h: float | None
    vol_h_se: float | None
    vol_alpha_t: float
    vol_alpha_t_se: float

    @property
    def one_side_ok(self) -> bool:
        """Violation measure within three standard errors of zero."""
        if self.violation is None:
            return True
        return self.violation <= 3.0 * self.violation_se

    @property
    def volume_ok(self) -> bool:
        """``|D_h| <= |D_alpha_t|`` up to three combined standard errors."""
        if self.vol_h is None:
            return True
        slack = 3.0 * float(np.hypot(self.vol_h_se, self.vol_alpha_t_se))
        return self.vol_h <= self.vol_alpha_t + slack


def condition_report(cfg: ExperimentConfig, algorithm: str | None = None, learner=None) -> list[ConditionRow]:
    """Run ``cfg.diagnostic_runs`` completion-mode runs per level and check
    every iteration's hypothesis against the exact sublevel sets."""
    problem = build_problem(cfg)
    if not isinstance(problem, SphereProblem):
        raise ConfigError("condition reports need a sphere problem")
    algorithm = algorithm or next((a for a in cfg.algorithms if a != "uniform"), "sac2")
    if algorithm == "uniform":
        raise ConfigError("condition reports need a SAC algorithm")
    lower, upper = problem.spec.lower, problem.spec.upper
    rows = []
    for level, a_star in enumerate(cfg.alpha_stars):
        sched = default_schedule(a_star, cfg.n, algorithm, cfg.sample_scale, delta=cfg.delta)
        target = geometry.sublevel_region(problem, a_star)
        for run in range(cfg.diagnostic_runs):
            seed = trial_seed(cfg.seed, level, run)
            res = run_sac(problem, sched, np.random.default_rng(seed), stop_on_hit=False, learner=learner)
            mc = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0xC0, level, run]))
            for it in res.iterations:
                d_at = geometry.sublevel_region(problem, it.alpha_t)
                vol_at = sublevel_measure_sphere(problem, it.alpha_t, cfg.mc_samples, mc)
                if it.hypothesis is None:
                    rows.append(ConditionRow(algorithm, a_star, run, it.t, it.alpha_t, it.positives, None,
                                             None, None, None, None, None, None, None, None,
                                             vol_at.value, vol_at.stderr))
                    continue
                d_h = geometry.ball_region(it.hypothesis.ball, lower, upper)
                ind = geometry.check_error_target_independence(target, d_at, d_h, cfg.mc_samples, mc)
                viol = geometry.check_one_side_error(d_at, d_h, cfg.mc_samples, mc)
                vol_h = geometry.mc_volume(d_h, cfg.mc_samples, mc)
                rows.append(ConditionRow(algorithm, a_star, run, it.t, it.alpha_t, it.positives,
                                         it.train_error, it.hypothesis.ball.radius, ind.lhs, ind.rhs,
                                         ind.z_score, viol.value, viol.stderr, vol_h.value, vol_h.stderr,
                                         vol_at.value, vol_at.stderr))
    return rows
