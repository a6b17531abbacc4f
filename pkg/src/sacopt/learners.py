"""Threshold labelling and ball-shaped classifiers.

A training batch is labelled ``+1`` where the objective is at most the
current threshold. Two learners are provided:

``fit_sphere``
    The minimum enclosing ball of the positive points.
``fit_sphere_oneside``
    The same ball shrunk until no training negative is inside it, so that
    the only training errors are false negatives.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Ball, distances, minimum_enclosing_ball


class NoPositives(ValueError):
    """The labelled batch has no positive example to learn from."""


@dataclass(frozen=True)
class SampleBatch:
    """Points ``x`` (shape ``(m, n)``) with their objective values ``y``."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.shape[0] != y.shape[0]:
            raise ValueError("x and y must have the same number of rows")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.y.shape[0]


@dataclass(frozen=True)
class LabeledBatch:
    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        z = np.asarray(self.z).astype(np.int8).reshape(-1)
        if x.shape[0] != z.shape[0]:
            raise ValueError("x and z must have the same number of rows")
        if not np.all((z == 1) | (z == -1)):
            raise ValueError("labels must be +1 or -1")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    def __len__(self):
        return self.z.shape[0]

    @property
    def positives(self) -> np.ndarray:
        return self.x[self.z == 1]

    @property
    def negatives(self) -> np.ndarray:
        return self.x[self.z == -1]


@dataclass(frozen=True)
class SphereHypothesis:
    ball: Ball
    learner: str = "sphere"
    iteration: int | None = None

    def predict(self, X) -> np.ndarray:
        """``+1`` inside the (closed) ball, ``-1`` outside."""
        return np.where(self.ball.contains(X), 1, -1).astype(np.int8)


def label(T: SampleBatch, alpha_t: float) -> LabeledBatch:
    # sign[alpha_t - y] with sign[0] = +1
    if len(T) == 0:
        raise ValueError("cannot label an empty batch")
    return LabeledBatch(T.x, np.where(alpha_t - T.y >= 0.0, 1, -1))


def fit_sphere(B: LabeledBatch, exact_limit: int = 1000, eps: float = 1e-6,
               iteration: int | None = None) -> SphereHypothesis:
    pos = B.positives
    if pos.shape[0] == 0:
        raise NoPositives("no positive samples in batch")
    return SphereHypothesis(minimum_enclosing_ball(pos, exact_limit, eps), "sphere", iteration)


def fit_sphere_oneside(B: LabeledBatch, margin: float = 1e-9, exact_limit: int = 1000,
                       eps: float = 1e-6, iteration: int | None = None) -> SphereHypothesis:
    """Enclosing ball of the positives, shrunk below the nearest negative.

    The radius becomes ``min(enclosing radius, (1 - margin) * d_neg)`` where
    ``d_neg`` is the distance from the center to the closest negative. This
    can drop positives; only false negatives are allowed on training data.
    """
    ball = fit_sphere(B, exact_limit, eps).ball
    neg = B.negatives
    radius = ball.radius
    if neg.shape[0]:
        radius = min(radius, (1.0 - margin) * float(distances(neg, ball.center).min()))
    return SphereHypothesis(Ball(ball.center, radius), "sphere_oneside", iteration)


def training_error(h: SphereHypothesis, B: LabeledBatch) -> float:
    if len(B) == 0:
        raise ValueError("cannot score an empty batch")
    return float(np.mean(h.predict(B.x) != B.z))


LEARNERS = {"sphere": fit_sphere, "sphere_oneside": fit_sphere_oneside}
