import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sacopt import geometry
from sacopt.problems import (DomainError, ProblemSpec, SphereProblem, SpikeProblem, make_problem,
                             spike_piece, spike_profile, sublevel_measure_sphere)


class TestSphere:
    def test_optimum_is_zero(self):
        p = SphereProblem(3, np.array([0.2, 0.5, 0.9]))
        assert p(p.x_star) == 0.0

    def test_corner(self):
        assert SphereProblem(2, np.zeros(2))(np.ones(2)) == pytest.approx(1.0)

    def test_spot_value(self):
        # independent oracle: tests/oracles/derive_values.py
        assert SphereProblem(1, np.array([0.2]))(np.array([0.5])) == pytest.approx(0.09, abs=1e-15)

    def test_batch_and_single(self, rng):
        p = SphereProblem(2, np.array([0.3, 0.4]))
        X = rng.random((5, 2))
        vals = p(X)
        assert vals.shape == (5,)
        assert all(vals[i] == p(X[i]) for i in range(5))

    def test_out_of_box_raises(self):
        p = SphereProblem(2, np.array([0.5, 0.5]))
        with pytest.raises(DomainError):
            p(np.array([1.1, 0.5]))
        with pytest.raises(DomainError):
            p(np.array([0.5, 0.5, 0.5]))

    def test_bad_optimum(self):
        with pytest.raises(ValueError):
            SphereProblem(2, np.array([1.5, 0.0]))

    def test_box_has_unit_volume(self):
        assert SphereProblem(4, np.full(4, 0.5)).spec.volume == 1.0
        assert SpikeProblem(4, np.zeros(4)).spec.volume == 1.0

    def test_sublevel_set_is_ball(self, rng):
        p = SphereProblem(3, np.array([0.3, 0.6, 0.5]))
        alpha = 0.05
        X = rng.random((10_000, 3))
        inside = np.linalg.norm(X - p.x_star, axis=1) <= math.sqrt(3 * alpha)
        assert np.array_equal(p(X) <= alpha, inside)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_values_in_unit_interval(self, n, seed):
        r = np.random.default_rng(seed)
        p = SphereProblem(n, r.random(n))
        v = p(r.random((50, n)))
        assert np.all((v >= 0) & (v <= 1))


class TestSublevelMeasure:
    def test_interval(self):
        m = sublevel_measure_sphere(SphereProblem(1, np.array([0.5])), 0.04)
        assert m.exact and m.value == pytest.approx(0.4)

    def test_disc(self, rng):
        p = SphereProblem(2, np.array([0.5, 0.5]))
        alpha = 0.05
        m = sublevel_measure_sphere(p, alpha)
        assert m.exact and m.value == pytest.approx(math.pi * 2 * alpha)
        mc = geometry.mc_volume(geometry.sublevel_region(p, alpha), 100_000, rng)
        assert abs(mc.value - m.value) <= 3 * mc.stderr

    def test_ball_covers_box(self):
        assert sublevel_measure_sphere(SphereProblem(2, np.array([0.5, 0.5])), 1.0).value == 1.0

    def test_clipped_falls_back_to_mc(self, rng):
        p = SphereProblem(2, np.array([0.0, 0.0]))
        m = sublevel_measure_sphere(p, 0.02, 100_000, rng)
        assert not m.exact
        # quarter disc of radius 0.2
        assert abs(m.value - math.pi * 0.04 / 4) <= 4 * m.stderr


class TestSpike:
    def test_spot_values(self):
        assert spike_profile(0.05) == pytest.approx(0.05)
        assert spike_profile(0.12) == pytest.approx(0.08)
        assert SpikeProblem(2, np.zeros(2))(np.zeros(2)) == 0.0

    def test_boundary_ownership(self):
        # shared endpoints belong to the closed family-1 pieces
        assert spike_piece(0.1) == (1, 0)
        assert spike_piece(0.15) == (1, 1)
        assert spike_piece(0.12) == (2, 1)
        assert spike_piece(1.0) == (1, 6)
        assert spike_piece(0.0) == (1, 0)

    def test_domain(self):
        with pytest.raises(DomainError):
            spike_piece(1.2)
        with pytest.raises(DomainError):
            spike_profile(np.array([-0.1]))

    def test_pieces_partition(self):
        r = np.linspace(0, 1, 20_001)
        pieces = [spike_piece(float(v)) for v in r]
        for v, (fam, k) in zip(r, pieces):
            if fam == 1:
                assert 3 * k / 20 - 1e-12 <= v <= (3 * k + 2) / 20 + 1e-12
            else:
                assert (3 * k - 1) / 20 < v < 3 * k / 20

    def test_profile_below_radius_and_nonnegative(self):
        r = np.linspace(0, 1, 100_001)
        g = spike_profile(r)
        assert np.all(g <= r + 1e-15)
        assert np.all(g >= -1e-15)

    def test_profile_matches_piece_formulas(self):
        for v in np.linspace(0, 1, 997):
            fam, k = spike_piece(float(v))
            want = v - k / 10 if fam == 1 else -v + k / 5
            assert spike_profile(v) == pytest.approx(want, abs=1e-14)

    def test_jumps_are_small(self):
        r = np.linspace(0, 1, 200_001)
        assert np.max(np.abs(np.diff(spike_profile(r)))) <= 0.05 + 1e-9

    def test_sublevel_contains_inner_ball(self, rng):
        n, alpha = 2, 0.03
        p = SpikeProblem(n, np.array([0.1, -0.05]))
        b = geometry.Ball(p.x_star, math.sqrt(n) * alpha)
        X = geometry.sample_ball_batch(b, 5000, rng)
        X = X[p.spec.contains(X)]
        assert np.all(p(X) <= alpha + 1e-12)

    def test_far_corner_does_not_overflow(self):
        p = SpikeProblem(3, np.full(3, -0.5))
        assert 0.0 <= p(np.full(3, 0.5)) <= 1.0


class TestProblemSpec:
    def test_custom_objective(self):
        spec = ProblemSpec(2, np.zeros(2), np.ones(2), lambda X: np.zeros(len(X)))
        assert spec(np.array([0.5, 0.5])) == 0.0

    def test_bad_box(self):
        with pytest.raises(ValueError):
            ProblemSpec(2, np.ones(2), np.zeros(2), lambda X: X[:, 0])

    def test_make_problem(self):
        p = make_problem("sphere", 3, seed=7)
        q = make_problem("sphere", 3, seed=7)
        assert np.array_equal(p.x_star, q.x_star)
        assert isinstance(make_problem("spike", 2, [0.0, 0.0]), SpikeProblem)
        with pytest.raises(ValueError):
            make_problem("rastrigin", 2, [0.0, 0.0])
        with pytest.raises(ValueError):
            make_problem("sphere", 2)
