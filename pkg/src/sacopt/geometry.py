"""Ball geometry, uniform ball sampling and Monte Carlo set measures.

Regions are represented by :class:`RegionPredicate`, a vectorised membership
test attached to a reference box. Measures of regions (and of their Boolean
combinations) are estimated by uniform sampling over the box and reported
with binomial standard errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(-1)
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        if not self.radius >= 0.0:
            raise ValueError("ball radius must be non-negative")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def n(self) -> int:
        return self.center.shape[0]

    def contains(self, X) -> np.ndarray:
        return distances(np.atleast_2d(np.asarray(X, dtype=float)), self.center) <= self.radius


def distances(X: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Row-wise Euclidean distances from ``c``.

    Every containment test in the package goes through this function so that
    a radius computed as a maximum distance classifies its own points
    consistently.
    """
    return np.sqrt(((X - c) ** 2).sum(axis=1))


def ball_volume(n: int, r: float) -> float:
    """Volume ``pi^(n/2) r^n / Gamma(n/2 + 1)`` evaluated in log space."""
    if n < 1 or r < 0:
        raise ValueError("need n >= 1 and r >= 0")
    if r == 0:
        return 0.0
    log_v = 0.5 * n * math.log(math.pi) + n * math.log(r) - math.lgamma(0.5 * n + 1.0)
    return math.exp(log_v)


def ball_inside_box(b: Ball, lower, upper) -> bool:
    return bool(np.all(b.center - b.radius >= lower) and np.all(b.center + b.radius <= upper))


def box_inside_ball(b: Ball, lower, upper) -> bool:
    # farthest corner from the center
    far = np.maximum(np.abs(b.center - lower), np.abs(upper - b.center))
    return float(np.sqrt((far ** 2).sum())) <= b.radius


def sample_ball_batch(b: Ball, k: int, rng: np.random.Generator) -> np.ndarray:
    """``k`` points uniform in ``b``: isotropic direction, radius ``r U^(1/n)``."""
    n = b.n
    direction = rng.standard_normal((k, n))
    norms = np.sqrt((direction ** 2).sum(axis=1, keepdims=True))
    # a zero Gaussian draw has probability zero but would divide by zero
    norms[norms == 0.0] = 1.0
    u = rng.random((k, 1))
    return b.center + direction / norms * (b.radius * u ** (1.0 / n))


def sample_ball(b: Ball, rng: np.random.Generator) -> np.ndarray:
    if b.radius <= 0:
        raise ValueError("sample_ball needs a positive radius")
    return sample_ball_batch(b, 1, rng)[0]


def sample_ball_in_box(b: Ball, lower, upper, rng: np.random.Generator, max_rejects: int = 100):
    """One point uniform in ``b`` intersected with the box, or ``None``.

    ``None`` is the fallback signal: ``max_rejects`` consecutive draws all
    landed outside the box and the caller should sample the box uniformly.
    """
    if b.radius <= 0:
        raise ValueError("sample_ball_in_box needs a positive radius")
    for _ in range(max_rejects):
        x = sample_ball_batch(b, 1, rng)[0]
        if np.all(x >= lower) and np.all(x <= upper):
            return x
    return None


def sample_ball_in_box_batch(b: Ball, k: int, lower, upper, rng: np.random.Generator,
                             max_rejects: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`sample_ball_in_box` for ``k`` independent points.

    Returns ``(points, fallback)``; rows flagged in ``fallback`` exhausted the
    rejection cap and contain NaN, to be filled by the caller.
    """
    out = np.full((k, b.n), np.nan)
    pending = np.arange(k)
    if b.radius <= 0:
        return out, np.ones(k, dtype=bool)
    for _ in range(max_rejects):
        if pending.size == 0:
            break
        cand = sample_ball_batch(b, pending.size, rng)
        ok = np.all((cand >= lower) & (cand <= upper), axis=1)
        out[pending[ok]] = cand[ok]
        pending = pending[~ok]
    fallback = np.zeros(k, dtype=bool)
    fallback[pending] = True
    return out, fallback


@dataclass(frozen=True)
class RegionPredicate:
    """A subset of a box given by a vectorised membership test."""

    contains: Callable[[np.ndarray], np.ndarray]
    lower: np.ndarray
    upper: np.ndarray

    def __call__(self, X) -> np.ndarray:
        return np.asarray(self.contains(np.atleast_2d(np.asarray(X, dtype=float))), dtype=bool)

    def _same_box(self, other: "RegionPredicate"):
        if not (np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)):
            raise ValueError("regions live in different boxes")

    def __and__(self, other):
        self._same_box(other)
        return RegionPredicate(lambda X: self(X) & other(X), self.lower, self.upper)

    def __or__(self, other):
        self._same_box(other)
        return RegionPredicate(lambda X: self(X) | other(X), self.lower, self.upper)

    def __xor__(self, other):
        self._same_box(other)
        return RegionPredicate(lambda X: self(X) ^ other(X), self.lower, self.upper)

    def __sub__(self, other):
        self._same_box(other)
        return RegionPredicate(lambda X: self(X) & ~other(X), self.lower, self.upper)


def box_region(lower, upper) -> RegionPredicate:
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    return RegionPredicate(lambda X: np.ones(X.shape[0], dtype=bool), lower, upper)


def ball_region(b: Ball, lower, upper) -> RegionPredicate:
    return RegionPredicate(b.contains, np.asarray(lower, dtype=float), np.asarray(upper, dtype=float))


def sublevel_region(problem, alpha: float) -> RegionPredicate:
    """``{x in box : f(x) <= alpha}`` for a problem exposing ``spec``."""
    spec = getattr(problem, "spec", problem)
    return RegionPredicate(lambda X: spec.objective(X) <= alpha, spec.lower, spec.upper)


class MCEstimate(NamedTuple):
    value: float
    stderr: float


def _uniform_box(lower, upper, samples, rng):
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    return lower + (upper - lower) * rng.random((samples, lower.shape[0]))


def _proportion(hits: np.ndarray, volume: float) -> MCEstimate:
    p = float(hits.mean())
    return MCEstimate(p * volume, volume * math.sqrt(p * (1.0 - p) / hits.size))


def mc_volume(region: RegionPredicate, samples: int, rng: np.random.Generator) -> MCEstimate:
    """Hit-fraction estimate of the region's volume, with binomial stderr."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    X = _uniform_box(region.lower, region.upper, samples, rng)
    volume = float(np.prod(np.asarray(region.upper) - np.asarray(region.lower)))
    return _proportion(region(X), volume)


class IndependenceReport(NamedTuple):
    lhs: float
    rhs: float
    z_score: float


def check_error_target_independence(d_alpha_star: RegionPredicate, d_alpha_t: RegionPredicate,
                                    d_h: RegionPredicate, samples: int,
                                    rng: np.random.Generator) -> IndependenceReport:
    """Compare ``|T & E|`` with ``|T| |E|`` where ``E = D_alpha_t ^ D_h``.

    Both sides are estimated on one common uniform sample; the z-score uses
    the delta-method variance of ``mean(TE) - mean(T) mean(E)``.
    """
    d_alpha_star._same_box(d_alpha_t)
    d_alpha_star._same_box(d_h)
    X = _uniform_box(d_alpha_star.lower, d_alpha_star.upper, samples, rng)
    target = d_alpha_star(X).astype(float)
    err = (d_alpha_t(X) ^ d_h(X)).astype(float)
    p_t, p_e = target.mean(), err.mean()
    lhs = float((target * err).mean())
    rhs = float(p_t * p_e)
    influence = target * err - p_t * err - p_e * target
    se = float(influence.std() / math.sqrt(samples))
    diff = lhs - rhs
    if se == 0.0:
        z = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    else:
        z = diff / se
    return IndependenceReport(lhs, rhs, z)


def check_one_side_error(d_alpha_t: RegionPredicate, d_h: RegionPredicate, samples: int,
                         rng: np.random.Generator) -> MCEstimate:
    """Estimated volume of ``D_h \\ D_alpha_t`` (false-positive region)."""
    return mc_volume(d_h - d_alpha_t, samples, rng)


# -- minimum enclosing ball ---------------------------------------------------

_REL_TOL = 1e-12


def _circumball(support: list[tuple[float, ...]]):
    """Smallest ball having every support point on its boundary."""
    p0 = np.asarray(support[0])
    if len(support) == 1:
        return p0, 0.0
    A = np.asarray(support[1:]) - p0
    G = A @ A.T
    rhs = 0.5 * np.diag(G)
    try:
        lam = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(G, rhs, rcond=None)[0]
    center = p0 + lam @ A
    return center, float(((center - p0) ** 2).sum())


def _welzl(points: list[tuple[float, ...]], end: int, support: list, n: int):
    if support:
        c, r2 = _circumball(support)
        cl = c.tolist()
    else:
        cl, r2 = None, -1.0
    if len(support) == n + 1:
        return cl, r2
    for i in range(end):
        p = points[i]
        if cl is None or sum((a - b) * (a - b) for a, b in zip(p, cl)) > r2 * (1.0 + _REL_TOL) + 1e-300:
            cl, r2 = _welzl(points, i, support + [p], n)
    return cl, r2


def _welzl_center(P: np.ndarray) -> np.ndarray:
    n = P.shape[1]
    order = np.random.default_rng(0x5EED).permutation(P.shape[0])
    pts = [tuple(row) for row in P[order].tolist()]
    c, _ = _welzl(pts, len(pts), [], n)
    return np.asarray(c, dtype=float)


def minimum_enclosing_ball(points, exact_limit: int = 1000, eps: float = 1e-6) -> Ball:
    """Smallest ball containing every row of ``points``.

    Up to ``exact_limit`` points this is Welzl's randomised recursion (with a
    fixed internal shuffle, so results are deterministic). Larger inputs use
    a working-set iteration: solve exactly on a subset, add the worst
    violators, and stop once every point lies within ``(1 + eps)`` of the
    subset's radius. The returned radius is always the largest distance from
    the center to an input point, so containment holds exactly.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[0] == 0:
        raise ValueError("need at least one point")
    if P.shape[0] == 1:
        return Ball(P[0].copy(), 0.0)
    if P.shape[0] <= exact_limit:
        c = _welzl_center(P)
    else:
        n = P.shape[1]
        rng = np.random.default_rng(0x5EED)
        working = rng.choice(P.shape[0], size=min(P.shape[0], 16 * (n + 1)), replace=False)
        while True:
            c = _welzl_center(P[working])
            r = float(distances(P[working], c).max())
            d = distances(P, c)
            outside = np.flatnonzero(d > r * (1.0 + eps))
            if outside.size == 0:
                break
            worst = outside[np.argsort(d[outside])[::-1][: 4 * (n + 1)]]
            working = np.concatenate([working, worst])
    return Ball(c, float(distances(P, c).max()))
