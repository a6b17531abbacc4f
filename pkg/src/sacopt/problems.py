"""Benchmark minimization problems on unit-volume boxes.

Two families are provided, both normalised so that the box has volume 1 and
the objective takes values in [0, 1] with minimum 0 at ``x_star``:

* :class:`SphereProblem` -- scaled squared distance on ``[0, 1]^n``.
* :class:`SpikeProblem` -- a piecewise-linear "spiky" radial profile on
  ``[-1/2, 1/2]^n`` with concentric local minima.

Objectives are vectorised: they accept a single point of shape ``(n,)`` or a
batch of shape ``(k, n)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np


class DomainError(ValueError):
    """Raised when an objective is evaluated outside its box."""


def _as_batch(x, n: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != n:
        raise DomainError(f"expected points of dimension {n}, got shape {np.shape(x)}")
    return arr, single


@dataclass(frozen=True)
class ProblemSpec:
    """A box solution space with a bounded objective.

    ``objective`` maps a ``(k, n)`` batch of in-box points to ``k`` values in
    [0, 1]. Calling the spec checks the box and accepts single points too.
    """

    n: int
    lower: np.ndarray
    upper: np.ndarray
    objective: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).reshape(-1)
        upper = np.asarray(self.upper, dtype=float).reshape(-1)
        if self.n < 1 or lower.shape != (self.n,) or upper.shape != (self.n,):
            raise ValueError("box bounds must have one entry per dimension")
        if np.any(upper <= lower):
            raise ValueError("box must have positive width in every coordinate")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))

    def contains(self, x) -> np.ndarray:
        arr, _ = _as_batch(x, self.n)
        return np.all((arr >= self.lower) & (arr <= self.upper), axis=1)

    def __call__(self, x):
        arr, single = _as_batch(x, self.n)
        if not np.all(self.contains(arr)):
            raise DomainError(f"point outside the box of problem {self.name!r}")
        values = np.asarray(self.objective(arr), dtype=float)
        return float(values[0]) if single else values


@dataclass(frozen=True)
class SphereProblem:
    """``f(x) = ||x - x_star||^2 / n`` on ``[0, 1]^n``."""

    n: int
    x_star: np.ndarray
    spec: ProblemSpec = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x_star = np.asarray(self.x_star, dtype=float).reshape(-1)
        if self.n < 1 or x_star.shape != (self.n,):
            raise ValueError("x_star must be an n-vector")
        if np.any((x_star < 0.0) | (x_star > 1.0)):
            raise ValueError("x_star must lie in [0, 1]^n")
        x_star.setflags(write=False)
        object.__setattr__(self, "x_star", x_star)
        spec = ProblemSpec(self.n, np.zeros(self.n), np.ones(self.n), self._objective, "sphere")
        object.__setattr__(self, "spec", spec)

    def _objective(self, X: np.ndarray) -> np.ndarray:
        return ((X - self.x_star) ** 2).sum(axis=1) / self.n

    def __call__(self, x):
        return sphere_eval(self, x)

    def sublevel_radius(self, alpha: float) -> float:
        """Euclidean radius of ``{f <= alpha}`` before clipping to the box."""
        return math.sqrt(self.n * alpha)


@dataclass(frozen=True)
class SpikeProblem:
    """``f(x) = g(||x - x_star|| / sqrt(n))`` on ``[-1/2, 1/2]^n``."""

    n: int
    x_star: np.ndarray
    spec: ProblemSpec = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x_star = np.asarray(self.x_star, dtype=float).reshape(-1)
        if self.n < 1 or x_star.shape != (self.n,):
            raise ValueError("x_star must be an n-vector")
        if np.any((x_star < -0.5) | (x_star > 0.5)):
            raise ValueError("x_star must lie in [-1/2, 1/2]^n")
        x_star.setflags(write=False)
        object.__setattr__(self, "x_star", x_star)
        half = np.full(self.n, 0.5)
        spec = ProblemSpec(self.n, -half, half, self._objective, "spike")
        object.__setattr__(self, "spec", spec)

    def _objective(self, X: np.ndarray) -> np.ndarray:
        r = np.sqrt(((X - self.x_star) ** 2).sum(axis=1)) / math.sqrt(self.n)
        # opposite corners give r == 1 up to rounding
        return spike_profile(np.minimum(r, 1.0))

    def __call__(self, x):
        return spike_eval(self, x)


def sphere_eval(p: SphereProblem, x):
    return p.spec(x)


def spike_eval(p: SpikeProblem, x):
    return p.spec(x)


def spike_piece(r: float) -> tuple[int, int]:
    """Return ``(family, k)`` of the piece owning ``r`` in [0, 1].

    Family 1 pieces are the closed intervals ``[3k/20, (3k+2)/20]`` for
    ``k = 0..6``; family 2 pieces are the open gaps ``((3k-1)/20, 3k/20)`` for
    ``k = 1..6``. A shared endpoint belongs to the closed family-1 piece.
    """
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"radius {r} outside [0, 1]")
    s = 20.0 * r
    k = min(int(math.floor(s / 3.0)), 6)
    if s - 3 * k <= 2.0:
        return 1, k
    return 2, k + 1


def spike_profile(r) -> np.ndarray:
    """The radial profile ``g`` evaluated elementwise on radii in [0, 1]."""
    r = np.asarray(r, dtype=float)
    if np.any((r < 0.0) | (r > 1.0)):
        raise DomainError("radius outside [0, 1]")
    s = 20.0 * r
    k = np.minimum(np.floor(s / 3.0), 6.0)
    closed = s - 3.0 * k <= 2.0
    return np.where(closed, r - k / 10.0, -r + (k + 1.0) / 5.0)


class Measure(NamedTuple):
    value: float
    stderr: float
    exact: bool


def sublevel_measure_sphere(p: SphereProblem, alpha: float, samples: int = 100_000, rng=None) -> Measure:
    """Volume of ``{x in box : f(x) <= alpha}``.

    Closed form when the ball of radius ``sqrt(n * alpha)`` lies inside the
    box (or swallows it entirely); a Monte Carlo estimate otherwise.
    """
    from . import geometry

    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    radius = p.sublevel_radius(alpha)
    ball = geometry.Ball(p.x_star, radius)
    lower, upper = p.spec.lower, p.spec.upper
    if geometry.ball_inside_box(ball, lower, upper):
        return Measure(geometry.ball_volume(p.n, radius), 0.0, True)
    if geometry.box_inside_ball(ball, lower, upper):
        return Measure(p.spec.volume, 0.0, True)
    if rng is None:
        rng = np.random.default_rng(0)
    est = geometry.mc_volume(geometry.ball_region(ball, lower, upper), samples, rng)
    return Measure(est.value, est.stderr, False)


def make_problem(name: str, n: int, x_star=None, seed: int | None = None):
    """Build a benchmark problem by family name.

    Either ``x_star`` is given explicitly, or it is drawn uniformly in the box
    from ``seed``.
    """
    families = {"sphere": (SphereProblem, 0.0, 1.0), "spike": (SpikeProblem, -0.5, 0.5)}
    if name not in families:
        raise ValueError(f"unknown problem family {name!r}")
    cls, lo, hi = families[name]
    if x_star is None:
        if seed is None:
            raise ValueError("either x_star or seed is required")
        x_star = np.random.default_rng(seed).uniform(lo, hi, size=n)
    return cls(n, np.asarray(x_star, dtype=float))
