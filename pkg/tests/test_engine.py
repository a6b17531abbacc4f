import math

import numpy as np
import pytest

from sacopt.engine import SacConfig, default_schedule, run_sac, run_uniform
from sacopt.geometry import Ball, ball_volume
from sacopt.harness.paa import trial_seed
from sacopt.learners import SphereHypothesis
from sacopt.problems import ProblemSpec, SphereProblem, SpikeProblem


def sphere2():
    return SphereProblem(2, np.array([0.5, 0.5]))


def halving(T):
    return tuple(2.0**-t for t in range(1, T + 1))


class CountingProblem:
    """Wraps a problem and counts every objective evaluation."""

    def __init__(self, inner):
        self.calls = 0
        inner_spec = inner.spec

        def objective(X):
            self.calls += len(X)
            return inner_spec.objective(X)

        self.spec = ProblemSpec(inner_spec.n, inner_spec.lower, inner_spec.upper, objective)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SacConfig(0.01, 2, (10, 10), 0.5, halving(2))
        with pytest.raises(ValueError):
            SacConfig(0.01, 2, (10, 10, 10), 0.5, (0.25, 0.5))
        with pytest.raises(ValueError):
            SacConfig(0.01, 1, (10, 10), 1.5, halving(1))
        with pytest.raises(ValueError):
            SacConfig(0.01, 1, (10, 10), 0.5, halving(1), learner="svm")

    def test_total(self):
        assert SacConfig(0.01, 2, (5, 7, 9), 0.5, halving(2)).total_queries == 21


class TestSchedule:
    def test_sac1_levels(self):
        s = default_schedule(1 / 16, 2, "sac1")
        assert s.T == 2 and s.alphas == (0.5, 0.25) and s.lam == 0.5 and s.learner == "sphere"

    def test_sac2_levels(self):
        s = default_schedule(1 / 16, 2, "sac2")
        assert s.T == 4 and s.learner == "sphere_oneside" and s.lam == pytest.approx(1 / 3)

    def test_sac1_sizes_follow_bound_inversion(self):
        # d = 3: target 1/4 -> 145, 1/32 -> 1623 (independent oracle)
        assert default_schedule(1 / 16, 2, "sac1").m == (63, 145, 145)
        assert default_schedule(2.0**-10, 2, "sac1").m[1:] == (1623,) * 5

    def test_sac1_growth_shape(self):
        # m_t / ((n / sqrt(a)) log(1 / sqrt(a))) stays within a constant band
        n = 2
        ratios = []
        for k in range(8, 21, 2):
            a = 2.0**-k
            m = default_schedule(a, n, "sac1").m[1]
            ratios.append(m / (n / math.sqrt(a) * math.log(1 / math.sqrt(a))))
        assert max(ratios) / min(ratios) < 2.0
        assert default_schedule(2.0**-20, n, "sac1").m[1] > default_schedule(2.0**-10, n, "sac1").m[1] * 20

    def test_scale(self):
        s = default_schedule(1 / 64, 2, "sac1", sample_scale=0.1)
        assert s.m[1] == math.ceil(0.1 * default_schedule(1 / 64, 2, "sac1").m[1])

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            default_schedule(0.1, 2, "sac3")


class TestUniform:
    def test_stub_zero_objective(self):
        spec = ProblemSpec(2, np.zeros(2), np.ones(2), lambda X: np.zeros(len(X)))
        r = run_uniform(spec, 100, 0.01, np.random.default_rng(0))
        assert r.first_hit == 1 and r.total_queries == 1

    def test_budget_exhausted(self):
        spec = ProblemSpec(1, np.zeros(1), np.ones(1), lambda X: np.ones(len(X)))
        r = run_uniform(spec, 500, 0.1, np.random.default_rng(0), chunk=64)
        assert r.first_hit is None and r.total_queries == 500 and len(r.best_values) == 500

    def test_geometric_mean(self):
        p = SphereProblem(1, np.array([0.5]))
        hits = np.array([run_uniform(p, 10_000, 0.04, np.random.default_rng(s), chunk=32).first_hit
                         for s in range(10_000)])
        sd = math.sqrt(0.6) / 0.4
        assert abs(hits.mean() - 2.5) <= 3 * sd / math.sqrt(hits.size)

    def test_completion_mode_counts_everything(self):
        r = run_uniform(sphere2(), 1000, 0.5, np.random.default_rng(1), stop_on_hit=False)
        assert r.total_queries == 1000 and r.first_hit is not None


class TestSac:
    def test_lambda_zero_matches_uniform(self):
        cfg = SacConfig(0.001, 3, (40, 30, 20, 10), 0.0, halving(3))
        a = run_sac(sphere2(), cfg, np.random.default_rng(9))
        b = run_uniform(sphere2(), cfg.total_queries, 0.001, np.random.default_rng(9), stop_on_hit=False)
        assert np.array_equal(a.best_values, b.best_values)
        assert a.first_hit == b.first_hit
        assert np.array_equal(a.best_x, b.best_x)

    def test_lambda_zero_matches_uniform_stop_mode(self):
        cfg = SacConfig(0.01, 3, (40, 30, 20, 10), 0.0, halving(3))
        for s in range(20):
            a = run_sac(sphere2(), cfg, np.random.default_rng(s), stop_on_hit=True)
            b = run_uniform(sphere2(), cfg.total_queries, 0.01, np.random.default_rng(s))
            assert a.first_hit == b.first_hit and a.total_queries == b.total_queries

    def test_t_zero(self):
        cfg = SacConfig(0.001, 0, (25,), 0.5, ())
        r = run_sac(sphere2(), cfg, np.random.default_rng(0))
        assert r.total_queries == 25 and r.iterations == ()

    @pytest.mark.parametrize("mode", ["sac1", "sac2"])
    def test_query_accounting(self, mode):
        p = CountingProblem(sphere2())
        cfg = default_schedule(2.0**-8, 2, mode)
        r = run_sac(p, cfg, np.random.default_rng(3))
        assert p.calls == r.total_queries == len(r.best_values) == cfg.total_queries
        assert sum(it.queries for it in r.iterations) + cfg.m[0] == r.total_queries

    def test_stop_mode_counts_up_to_hit(self):
        p = CountingProblem(sphere2())
        cfg = default_schedule(2.0**-6, 2, "sac1")
        r = run_sac(p, cfg, np.random.default_rng(3), stop_on_hit=True)
        assert r.first_hit == r.total_queries == len(r.best_values)
        assert r.best_value <= 2.0**-6

    def test_determinism(self):
        cfg = default_schedule(2.0**-8, 2, "sac2")
        a = run_sac(sphere2(), cfg, np.random.default_rng(77))
        b = run_sac(sphere2(), cfg, np.random.default_rng(77))
        assert np.array_equal(a.best_values, b.best_values) and np.array_equal(a.best_x, b.best_x)
        assert [it.hypothesis.ball.radius for it in a.iterations] == \
               [it.hypothesis.ball.radius for it in b.iterations]

    def test_monotone_trace(self):
        r = run_sac(SpikeProblem(2, np.zeros(2)), default_schedule(2.0**-6, 2, "sac1"), np.random.default_rng(0))
        assert np.all(np.diff(r.best_values) <= 0)
        assert r.best_value == pytest.approx(r.best_values.min())

    def test_no_positives_falls_back(self):
        spec = ProblemSpec(2, np.zeros(2), np.ones(2), lambda X: np.ones(len(X)))
        r = run_sac(spec, SacConfig(0.01, 2, (20, 20, 20), 0.5, halving(2)), np.random.default_rng(0))
        assert all(it.no_positives and it.hypothesis is None for it in r.iterations)
        assert r.total_queries == 60

    def test_mixture_fraction(self):
        ball = Ball(np.array([0.5, 0.5]), 0.2)
        stub = lambda B: SphereHypothesis(ball, "stub")  # noqa: E731
        lam, m = 0.4, 10_000
        cfg = SacConfig(0.001, 1, (50, m), lam, (0.5,))
        X = []

        def spy(X_batch):
            X.append(X_batch.copy())
            return sphere2().spec.objective(X_batch)

        spec = ProblemSpec(2, np.zeros(2), np.ones(2), spy)
        r = run_sac(spec, cfg, np.random.default_rng(5), learner=stub)
        pts = X[1]
        frac = np.mean(np.linalg.norm(pts - ball.center, axis=1) <= ball.radius)
        p = lam + (1 - lam) * ball_volume(2, 0.2)
        assert r.total_queries == 50 + m
        assert abs(frac - p) <= 3 * math.sqrt(p * (1 - p) / m)

    def test_fallbacks_counted(self):
        far = Ball(np.array([5.0, 5.0]), 0.1)
        stub = lambda B: SphereHypothesis(far, "stub")  # noqa: E731
        cfg = SacConfig(0.001, 1, (10, 200), 1.0, (0.5,), max_rejects=3)
        r = run_sac(sphere2(), cfg, np.random.default_rng(0), learner=stub)
        assert r.fallbacks == 200 and r.total_queries == 210

    def test_training_uses_previous_batch_only(self):
        sizes = []

        def spy(B):
            sizes.append(len(B))
            return SphereHypothesis(Ball(np.array([0.5, 0.5]), 0.3), "stub")

        run_sac(sphere2(), SacConfig(1e-6, 3, (11, 22, 33, 44), 0.5, halving(3)), np.random.default_rng(0),
                learner=spy)
        assert sizes == [11, 22, 33]

    def test_paired_median_below_uniform(self):
        # alpha_t = 2^-t, lambda = 1/2, small warm-up batch
        a, T = 0.0025, 5
        cfg = SacConfig(a, T, (10,) + (50,) * T, 0.5, halving(T))
        p = sphere2()
        uni, sac = [], []
        for i in range(200):
            seed = trial_seed(0, 0, i)
            uni.append(run_uniform(p, 10**6, a, np.random.default_rng(seed)).first_hit)
            rng, used = np.random.default_rng(seed), 0
            while True:
                r = run_sac(p, cfg, rng, stop_on_hit=True)
                if r.first_hit is not None:
                    sac.append(used + r.first_hit)
                    break
                used += r.total_queries
        assert np.median(sac) < np.median(uni)
