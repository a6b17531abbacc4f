"""Monte Carlo estimation of PAA query complexity.

For every approximation level the harness runs ``R`` independent trials and
records the index of the first query with ``f(x) <= alpha*``. The empirical
PAA complexity is the ``ceil((1 - delta) R)``-th order statistic of those
first-hit counts. Trials that exhaust the budget are censored: they sort
after every observed hit and a quantile that lands on one is reported as
unattainable.

A SAC run makes a fixed number of queries. When it ends without a hit the
trial starts a fresh run on the same random stream and keeps counting, until
a hit or the budget.

Trial seeds come from ``numpy.random.SeedSequence([seed, level, trial])``
where ``level`` is the position of ``alpha*`` in the config. The seed does
not depend on the algorithm, so algorithms are compared on paired streams.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .. import theory
from ..engine import default_schedule, run_sac, run_uniform
from ..problems import make_problem, sublevel_measure_sphere
from .config import ExperimentConfig


def trial_seed(master: int, level: int, trial: int) -> int:
    return int(np.random.SeedSequence([master, level, trial]).generate_state(1, np.uint64)[0])


def build_problem(cfg: ExperimentConfig):
    return make_problem(cfg.problem, cfg.n, cfg.x_star, cfg.problem_seed)


@dataclass(frozen=True)
class TrialResult:
    algorithm: str
    alpha_star: float
    trial: int
    seed: int
    first_hit: int | None
    restarts: int = 0

    @property
    def censored(self) -> bool:
        return self.first_hit is None


def run_trial(problem, algorithm: str, alpha_star: float, budget: int, seed: int,
              sample_scale: float = 1.0) -> tuple[int | None, int]:
    """First-hit query index of one trial (``None`` if censored) and restart count."""
    rng = np.random.default_rng(seed)
    if algorithm == "uniform":
        return run_uniform(problem, budget, alpha_star, rng, stop_on_hit=True).first_hit, 0
    cfg = default_schedule(alpha_star, problem.spec.n, algorithm, sample_scale)
    used, restarts = 0, 0
    while used < budget:
        res = run_sac(problem, cfg, rng, stop_on_hit=True)
        if res.first_hit is not None:
            hit = used + res.first_hit
            return (hit if hit <= budget else None), restarts
        used += res.total_queries
        restarts += 1
    return None, restarts


def _trial_job(args, problem, budget, sample_scale):
    algorithm, alpha_star, trial, seed = args
    hit, restarts = run_trial(problem, algorithm, alpha_star, budget, seed, sample_scale)
    return TrialResult(algorithm, alpha_star, trial, seed, hit, restarts)


def run_trials(cfg: ExperimentConfig, algorithm: str, workers: int = 1) -> list[TrialResult]:
    problem = build_problem(cfg)
    jobs = [(algorithm, a, i, trial_seed(cfg.seed, level, i))
            for level, a in enumerate(cfg.alpha_stars) for i in range(cfg.trials)]
    job = partial(_trial_job, problem=problem, budget=cfg.budget, sample_scale=cfg.sample_scale)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        results = [job(j) for j in jobs]
    return sorted(results, key=lambda r: (cfg.alpha_stars.index(r.alpha_star), r.trial))


def order_statistic_quantile(first_hits, delta: float) -> int | None:
    """The ``ceil((1-delta) R)``-th smallest first hit, or ``None`` if censored.

    ``first_hits`` uses ``None`` for censored trials, which sort last.
    """
    R = len(first_hits)
    if R == 0:
        return None
    k = math.ceil((1.0 - delta) * R - 1e-9)
    k = min(max(k, 1), R)
    observed = sorted(h for h in first_hits if h is not None)
    return observed[k - 1] if k <= len(observed) else None


@dataclass(frozen=True)
class PAAEstimate:
    algorithm: str
    alpha_star: float
    delta: float
    quantile: int | None
    hit_fraction: float
    censored: int
    first_hits: tuple = field(repr=False)
    theory: float | None = None
    note: str = ""

    @property
    def valid(self) -> bool:
        return self.quantile is not None


def uniform_reference(cfg: ExperimentConfig, problem, alpha_star: float) -> float | None:
    """Exact geometric quantile for uniform search when ``|D_alpha*|`` is known."""
    pr_u = success_probability(problem, alpha_star)
    if pr_u is None:
        return None
    return float(theory.uniform_paa_complexity(pr_u, cfg.delta).exact_quantile)


def success_probability(problem, alpha_star: float) -> float | None:
    """Closed-form ``|D_alpha*|`` where available, else ``None``."""
    from ..geometry import Ball, ball_inside_box, ball_volume
    from ..problems import SphereProblem, SpikeProblem

    if isinstance(problem, SphereProblem):
        m = sublevel_measure_sphere(problem, alpha_star)
        return m.value if m.exact else None
    if isinstance(problem, SpikeProblem) and alpha_star < 0.05:
        # below 0.05 only the central piece g(r) = r qualifies
        radius = math.sqrt(problem.n) * alpha_star
        if ball_inside_box(Ball(problem.x_star, radius), problem.spec.lower, problem.spec.upper):
            return ball_volume(problem.n, radius)
    return None


def summarize(cfg: ExperimentConfig, trials: list[TrialResult], problem=None) -> list[PAAEstimate]:
    problem = problem if problem is not None else build_problem(cfg)
    out = []
    for alg in dict.fromkeys(t.algorithm for t in trials):
        for a in cfg.alpha_stars:
            hits = tuple(t.first_hit for t in trials if t.algorithm == alg and t.alpha_star == a)
            if not hits:
                continue
            censored = sum(h is None for h in hits)
            ref = uniform_reference(cfg, problem, a) if alg == "uniform" else None
            note = "R < 1/delta: order statistic is biased" if len(hits) < 1.0 / cfg.delta else ""
            out.append(PAAEstimate(alg, a, cfg.delta, order_statistic_quantile(hits, cfg.delta),
                                   1.0 - censored / len(hits), censored, hits, ref, note))
    return out


def estimate_paa(cfg: ExperimentConfig, workers: int = 1) -> tuple[list[PAAEstimate], list[TrialResult]]:
    trials = []
    for alg in cfg.algorithms:
        trials.extend(run_trials(cfg, alg, workers))
    return summarize(cfg, trials), trials


# -- scaling exponents ---------------------------------------------------------

@dataclass(frozen=True)
class SlopeReport:
    algorithm: str
    slope: float | None
    ci_low: float | None
    ci_high: float | None
    levels: tuple[float, ...]
    gaps: tuple[float, ...] = ()


def loglog_slope(alphas, quantiles) -> float:
    x = np.log(1.0 / np.asarray(alphas, dtype=float))
    y = np.log(np.asarray(quantiles, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def fit_slopes(cfg: ExperimentConfig, estimates: list[PAAEstimate]) -> list[SlopeReport]:
    """Least-squares log-log slope per algorithm with a bootstrap interval."""
    reports = []
    for alg in dict.fromkeys(e.algorithm for e in estimates):
        ests = [e for e in estimates if e.algorithm == alg]
        usable = [e for e in ests if e.valid]
        gaps = tuple(e.alpha_star for e in ests if not e.valid)
        if len(usable) < 2:
            reports.append(SlopeReport(alg, None, None, None, tuple(e.alpha_star for e in usable), gaps))
            continue
        slope = loglog_slope([e.alpha_star for e in usable], [e.quantile for e in usable])
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0x51, cfg.algorithms.index(alg)
                                                            if alg in cfg.algorithms else 99]))
        arrays = [np.array([np.inf if h is None else h for h in e.first_hits]) for e in usable]
        boots = []
        for _ in range(cfg.bootstrap):
            qs = []
            for arr in arrays:
                k = min(max(math.ceil((1.0 - cfg.delta) * arr.size - 1e-9), 1), arr.size)
                sample = arr[rng.integers(0, arr.size, arr.size)]
                qs.append(float(np.partition(sample, k - 1)[k - 1]))
            if all(np.isfinite(qs)):
                boots.append(loglog_slope([e.alpha_star for e in usable], qs))
        lo, hi = (float(np.percentile(boots, 2.5)), float(np.percentile(boots, 97.5))) if boots else (None, None)
        reports.append(SlopeReport(alg, slope, lo, hi, tuple(e.alpha_star for e in usable), gaps))
    return reports


def scaling_sweep(cfg: ExperimentConfig, workers: int = 1):
    estimates, trials = estimate_paa(cfg, workers)
    return estimates, fit_slopes(cfg, estimates), trials
