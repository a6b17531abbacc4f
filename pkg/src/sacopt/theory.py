"""Closed-form query-complexity and success-probability bounds.

All logarithms are natural. Degenerate inputs are signalled explicitly:
``math.inf`` for an infinite query bound, :class:`UndefinedBound` where a
denominator vanishes, and a ``vacuous``/``clamped`` flag on lower bounds that
fall outside [0, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence


class UndefinedBound(ValueError):
    """The requested bound has a non-positive denominator."""


class Bound(NamedTuple):
    value: float
    flagged: bool


@dataclass(frozen=True)
class IterationRecord:
    m: int
    d_alpha: float
    train_err: float = 0.0
    kl_mixture: float = 0.0
    kl_sampler: float = 0.0


@dataclass(frozen=True)
class BoundInputs:
    pr_u: float
    pr_h_bar: float = 0.0
    lam: float = 0.0
    delta: float = 0.1
    eta: float = 0.5
    m0: int = 0
    d: int = 1
    iterations: Sequence[IterationRecord] = field(default_factory=tuple)


def theorem1_bound(inp: BoundInputs) -> float:
    """``m0 + max(ln(1/delta) / ((1-lam) Pr_u + lam Pr_h), sum m_t)``."""
    rate = (1.0 - inp.lam) * inp.pr_u + inp.lam * inp.pr_h_bar
    if rate <= 0.0:
        return math.inf
    total = sum(rec.m for rec in inp.iterations)
    return inp.m0 + max(math.log(1.0 / inp.delta) / rate, total)


def _vc_complexity(m: int, d: int) -> float:
    return d * math.log(2.0 * math.e * m / d)


def vc_bound(m: int, d: int, eta: float, train_err: float) -> float:
    """Generalization error bound for a class of VC dimension ``d``.

    Uses the faster ``O(1/m)`` form when the training error is zero.
    """
    if not (m >= d >= 1 and 0.0 < eta < 1.0 and 0.0 <= train_err <= 1.0):
        raise ValueError("need m >= d >= 1, eta in (0, 1), train_err in [0, 1]")
    if train_err == 0.0:
        value = 2.0 / m * (_vc_complexity(m, d) + math.log(2.0 / eta))
    else:
        value = train_err + math.sqrt(8.0 / m * (_vc_complexity(m, d) + math.log(4.0 / eta)))
    return min(value, 1.0)


def vc_bound_general(m: int, d: int, eta: float, train_err: float) -> float:
    """The square-root branch, uncapped, for any training error."""
    if not (m >= d >= 1 and 0.0 < eta < 1.0 and 0.0 <= train_err <= 1.0):
        raise ValueError("need m >= d >= 1, eta in (0, 1), train_err in [0, 1]")
    return train_err + math.sqrt(8.0 / m * (_vc_complexity(m, d) + math.log(4.0 / eta)))


def psi(train_err: float, d: int, m: int, eta: float, kl_sampling: float) -> float:
    """Uniform-distribution error bound after a change of sampling measure."""
    if kl_sampling < 0.0 or kl_sampling >= 2.0:
        raise UndefinedBound(f"KL divergence {kl_sampling} leaves no valid bound")
    denom = 1.0 - math.sqrt(kl_sampling / 2.0)
    return vc_bound_general(m, d, eta, train_err) / denom


def theorem4_from_psi(eta: float, d_alpha_star: float, ms: Sequence[int], d_alphas: Sequence[float],
                      psis: Sequence[float], kl_samplers: Sequence[float]) -> Bound:
    """Average success-probability lower bound from per-iteration ``psi`` values."""
    if not (len(ms) == len(d_alphas) == len(psis) == len(kl_samplers)) or not ms:
        raise ValueError("per-iteration records are incomplete")
    total = sum(ms)
    acc = 0.0
    for m, d_a, p, kl in zip(ms, d_alphas, psis, kl_samplers):
        acc += m * ((d_alpha_star - 2.0 * p) / (d_a + p) - d_alpha_star * math.sqrt(kl / 2.0))
    raw = (1.0 - eta) / total * acc
    clamped = min(max(raw, 0.0), 1.0)
    return Bound(clamped, clamped != raw)


def theorem4_lower_bound(inp: BoundInputs, d_alpha_star: float) -> Bound:
    recs = list(inp.iterations)
    psis = [psi(r.train_err, inp.d, r.m, inp.eta, r.kl_mixture) for r in recs]
    return theorem4_from_psi(inp.eta, d_alpha_star, [r.m for r in recs], [r.d_alpha for r in recs],
                             psis, [r.kl_sampler for r in recs])


def lemma2_lower_bound(d_star_cap_h: float, d_h: float, kl_th: float) -> Bound:
    """Success probability of a sampler on ``D_h`` that is ``kl_th`` from uniform.

    The raw value is returned even when negative; the flag marks it vacuous.
    """
    if d_h <= 0.0:
        raise ValueError("|D_h| must be positive")
    if d_star_cap_h < 0.0 or kl_th < 0.0:
        raise ValueError("measures and KL must be non-negative")
    value = d_star_cap_h / d_h - d_star_cap_h * math.sqrt(kl_th / 2.0)
    return Bound(value, value <= 0.0 and d_star_cap_h > 0.0)


def uniform_error_from_mixture(eps_mixture: float, lam: float) -> float:
    if not 0.0 <= lam < 1.0:
        raise UndefinedBound("lambda must lie in [0, 1)")
    return min(eps_mixture / (1.0 - lam), 1.0)


class UniformComplexity(NamedTuple):
    asymptotic: float
    exact_quantile: int


def uniform_paa_complexity(pr_u: float, delta: float) -> UniformComplexity:
    """``ln(1/delta) / Pr_u`` and the exact geometric ``(1-delta)``-quantile."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if pr_u <= 0.0:
        return UniformComplexity(math.inf, -1)
    if pr_u > 1.0:
        raise ValueError("Pr_u must lie in (0, 1]")
    asym = math.log(1.0 / delta) / pr_u
    if pr_u == 1.0:
        return UniformComplexity(asym, 1)
    return UniformComplexity(asym, max(1, math.ceil(math.log(delta) / math.log1p(-pr_u))))


def invert_zero_error_bound(target: float, d: int, eta: float = 0.5) -> int:
    """Smallest ``m >= d`` whose zero-training-error bound is at most ``target``."""
    if not 0.0 < target <= 1.0:
        raise ValueError("target error must lie in (0, 1]")

    def ok(m):
        return 2.0 / m * (_vc_complexity(m, d) + math.log(2.0 / eta)) <= target

    lo, hi = d, d
    while not ok(hi):
        lo, hi = hi, hi * 2
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return hi
