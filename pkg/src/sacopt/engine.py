"""The sampling-and-learning loop with threshold-classification learners.

One run draws ``m_0`` uniform points, then for each iteration ``t``:

1. labels the previous iteration's points against the threshold ``alpha_t``,
2. fits a ball classifier ``h_t`` to the labels,
3. draws ``m_t`` fresh points, each from the uniform distribution on
   ``D_{h_t}`` (intersected with the box) with probability ``lambda`` and from
   the uniform distribution on the box otherwise.

Only the fresh points of iteration ``t`` are used to train ``h_{t+1}``.

Random streams: uniform-over-box points are always drawn from the generator
passed in, in query order; mixture coins, ball samples and box fallbacks use
a child stream spawned from it. With ``lam == 0`` a run therefore makes the
same queries as :func:`run_uniform` with the same generator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import theory
from .geometry import Ball, sample_ball_in_box_batch
from .learners import LEARNERS, NoPositives, SampleBatch, SphereHypothesis, label, training_error


@dataclass(frozen=True)
class SacConfig:
    alpha_star: float
    T: int
    m: tuple[int, ...]
    lam: float
    alphas: tuple[float, ...]
    learner: str = "sphere"
    delta: float = 0.1
    eta: float = 0.5
    max_rejects: int = 100

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(v) for v in self.m))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.alpha_star <= 0:
            raise ValueError("alpha_star must be positive")
        if self.T < 0:
            raise ValueError("T must be non-negative")
        if len(self.m) != self.T + 1 or min(self.m) < 1:
            raise ValueError("need T + 1 sample sizes m_0..m_T, all >= 1")
        if len(self.alphas) != self.T:
            raise ValueError("need one threshold per iteration")
        if any(a <= 0 for a in self.alphas) or any(a <= b for a, b in zip(self.alphas, self.alphas[1:])):
            raise ValueError("thresholds must be positive and strictly decreasing")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")
        if self.learner not in LEARNERS:
            raise ValueError(f"unknown learner {self.learner!r}")
        if not (0 < self.delta < 1 and 0 < self.eta < 1):
            raise ValueError("delta and eta must lie in (0, 1)")
        if self.max_rejects < 1:
            raise ValueError("max_rejects must be >= 1")

    @property
    def total_queries(self) -> int:
        return sum(self.m)


@dataclass(frozen=True)
class IterationDiagnostics:
    t: int
    alpha_t: float
    n_train: int
    positives: int
    train_error: float | None
    hypothesis: SphereHypothesis | None
    fallbacks: int
    no_positives: bool
    queries: int


@dataclass(frozen=True)
class RunResult:
    best_values: np.ndarray
    first_hit: int | None
    total_queries: int
    best_x: np.ndarray | None
    iterations: tuple[IterationDiagnostics, ...] = field(default_factory=tuple)

    @property
    def best_value(self) -> float:
        return float(self.best_values[-1]) if self.best_values.size else math.inf

    @property
    def fallbacks(self) -> int:
        return sum(it.fallbacks for it in self.iterations)


def _spec(problem):
    return getattr(problem, "spec", problem)


def _uniform(spec, k: int, rng: np.random.Generator) -> np.ndarray:
    return spec.lower + (spec.upper - spec.lower) * rng.random((k, spec.n))


class _Ledger:
    """Query bookkeeping for one run.

    Batches are evaluated vectorised. In stop-on-hit mode the values after
    the first hit are discarded and are not counted as queries.
    """

    def __init__(self, spec, alpha_star: float, stop_on_hit: bool):
        self.spec = spec
        self.alpha_star = alpha_star
        self.stop_on_hit = stop_on_hit
        self.chunks: list[np.ndarray] = []
        self.count = 0
        self.first_hit: int | None = None
        self.best = math.inf
        self.best_x = None

    @property
    def done(self) -> bool:
        return self.stop_on_hit and self.first_hit is not None

    def query(self, X: np.ndarray) -> np.ndarray:
        y = np.asarray(self.spec(X), dtype=float)
        if self.first_hit is None:
            hits = np.flatnonzero(y <= self.alpha_star)
            if hits.size:
                self.first_hit = self.count + int(hits[0]) + 1
                if self.stop_on_hit:
                    X, y = X[: hits[0] + 1], y[: hits[0] + 1]
        if y.size:
            # first-encountered minimum wins ties
            i = int(np.argmin(y))
            if y[i] < self.best:
                self.best, self.best_x = float(y[i]), X[i].copy()
            self.chunks.append(y)
            self.count += y.size
        return y

    def result(self, iterations=()) -> RunResult:
        values = np.concatenate(self.chunks) if self.chunks else np.empty(0)
        return RunResult(np.minimum.accumulate(values), self.first_hit, self.count, self.best_x,
                         tuple(iterations))


def run_uniform(problem, budget: int, alpha_star: float, rng: np.random.Generator,
                stop_on_hit: bool = True, chunk: int = 4096) -> RunResult:
    """Pure random search: up to ``budget`` i.i.d. uniform queries."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    spec = _spec(problem)
    ledger = _Ledger(spec, alpha_star, stop_on_hit)
    left = budget
    while left > 0 and not ledger.done:
        k = min(chunk, left)
        ledger.query(_uniform(spec, k, rng))
        left -= k
    return ledger.result()


def _mixture_batch(spec, h: SphereHypothesis | None, k: int, lam: float, rng, aux, max_rejects):
    """``k`` points from ``lam * U(D_h & box) + (1 - lam) * U(box)``."""
    if h is None or lam == 0.0:
        return _uniform(spec, k, rng), 0
    from_h = aux.random(k) < lam
    X = np.empty((k, spec.n))
    n_u = int((~from_h).sum())
    X[~from_h] = _uniform(spec, n_u, rng)
    n_h = k - n_u
    fallbacks = 0
    if n_h:
        pts, fb = sample_ball_in_box_batch(h.ball, n_h, spec.lower, spec.upper, aux, max_rejects)
        fallbacks = int(fb.sum())
        if fallbacks:
            pts[fb] = _uniform(spec, fallbacks, aux)
        X[from_h] = pts
    return X, fallbacks


def run_sac(problem, cfg: SacConfig, rng: np.random.Generator, stop_on_hit: bool = False,
            learner: Callable | None = None) -> RunResult:
    """Execute one sampling-and-classification run.

    ``learner`` overrides ``cfg.learner`` with any callable mapping a
    labelled batch to a :class:`SphereHypothesis`; it must not evaluate the
    objective.
    """
    spec = _spec(problem)
    fit = learner if learner is not None else LEARNERS[cfg.learner]
    aux = rng.spawn(1)[0]
    ledger = _Ledger(spec, cfg.alpha_star, stop_on_hit)
    X_prev = _uniform(spec, cfg.m[0], rng)
    y_prev = ledger.query(X_prev)
    X_prev = X_prev[: y_prev.size]
    diagnostics = []
    for t in range(1, cfg.T + 1):
        if ledger.done:
            break
        alpha_t = cfg.alphas[t - 1]
        B = label(SampleBatch(X_prev, y_prev), alpha_t)
        positives = int((B.z == 1).sum())
        try:
            h = fit(B)
            h = SphereHypothesis(h.ball, h.learner, t)
            err = training_error(h, B)
        except NoPositives:
            h, err = None, None
        X, fallbacks = _mixture_batch(spec, h, cfg.m[t], cfg.lam, rng, aux, cfg.max_rejects)
        y = ledger.query(X)
        diagnostics.append(IterationDiagnostics(t, alpha_t, len(B), positives, err, h, fallbacks,
                                                h is None, int(y.size)))
        X_prev, y_prev = X[: y.size], y
    return ledger.result(diagnostics)


def default_schedule(alpha_star: float, n: int, mode: str, sample_scale: float = 1.0,
                     eta: float = 0.5, delta: float = 0.1) -> SacConfig:
    """Parameter schedule for the two analysed SAC variants.

    ``sac1``: ``T = ceil(log2(1/sqrt(alpha*)))``, ``alpha_t = 2^-t``,
    ``lambda = 1/2``, minimum enclosing ball learner, every ``m_t`` (t >= 1)
    sized so the zero-training-error VC bound (``d = n + 1``) reaches
    ``2^-T``.

    ``sac2``: ``T = ceil(log2(1/alpha*))``, ``lambda = 1/3``, one-sided
    learner, every ``m_t`` sized for error 1/2.

    ``m_0`` trains ``h_1`` whose threshold is 1/2, so it is sized for error
    1/2 in both modes. ``sample_scale`` multiplies every size (rounded up)
    and leaves the dependence on ``alpha*`` unchanged.
    """
    if not 0.0 < alpha_star < 1.0:
        raise ValueError("alpha_star must lie in (0, 1)")
    d = n + 1
    m_half = theory.invert_zero_error_bound(0.5, d, eta)
    if mode == "sac1":
        T = max(1, math.ceil(0.5 * math.log2(1.0 / alpha_star) - 1e-12))
        m_t = theory.invert_zero_error_bound(2.0 ** -T, d, eta)
        lam, learner = 0.5, "sphere"
    elif mode == "sac2":
        T = max(1, math.ceil(math.log2(1.0 / alpha_star) - 1e-12))
        m_t = m_half
        lam, learner = 1.0 / 3.0, "sphere_oneside"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    m0 = max(1, math.ceil(sample_scale * m_half))
    m_t = max(1, math.ceil(sample_scale * m_t))
    return SacConfig(alpha_star, T, (m0,) + (m_t,) * T, lam, tuple(2.0 ** -t for t in range(1, T + 1)),
                     learner, delta, eta)
