import math

import numpy as np
import pytest

from pearlkit.pareto import Solution
from pearlkit.rewards import (
    CurriculumConstrained,
    PearlEnvelope,
    PearlEpsilon,
    PearlNds,
    constraint_violation,
    cosine_uniformity,
    epsilon_fitness,
    kl_uniformity,
    make_solution,
    pearl_e_reward,
    sample_preferences,
)


def sol(obj, g=None, limits=None, weights=None):
    # objectives given directly in maximization sense
    return make_solution(np.zeros(2), -np.asarray(obj, dtype=float),
                         constraints=g if g is not None else (),
                         limits=limits, weights=weights)


class TestSamplePreferences:
    def test_uniform_dirichlet_mean(self):
        rng = np.random.default_rng(0)
        rays = sample_preferences((1, 1, 1), 10_000, rng)
        assert rays.shape == (10_000, 3)
        assert np.allclose(rays.sum(axis=1), 1.0, atol=1e-9)
        assert np.all(rays >= 0)
        assert np.allclose(rays.mean(axis=0), 1 / 3, atol=0.02)

    def test_concentration_reduces_variance(self):
        rng = np.random.default_rng(1)
        wide = sample_preferences((1, 1, 1), 10_000, rng)
        tight = sample_preferences((10, 10, 10), 10_000, rng)
        # componentwise variance per the Dirichlet formula a(a0-a)/(a0^2 (a0+1))
        assert np.allclose(wide.var(axis=0), 2 / 36, rtol=0.2)
        assert np.allclose(tight.var(axis=0), 200 / 27900, rtol=0.2)
        assert np.all(tight.var(axis=0) < wide.var(axis=0))

    def test_zero_count(self):
        rays = sample_preferences((1, 1), 0, np.random.default_rng(2))
        assert rays.shape == (0, 2)

    def test_nonpositive_alpha_rejected(self):
        with pytest.raises(ValueError):
            sample_preferences((1.0, 0.0), 4, np.random.default_rng(3))


class TestEnvelopeReward:
    def test_linear_scalarization_when_lambda_zero(self):
        assert pearl_e_reward((2, 4), [(0.5, 0.5)], 0.0) == pytest.approx(3.0)

    def test_single_ray_lambda_zero_is_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            r = rng.normal(size=3)
            w = sample_preferences((1, 1, 1), 1, rng)
            assert pearl_e_reward(r, w, 0.0) == pytest.approx(float(w[0] @ r), abs=1e-12)

    def test_kl_term_zero_for_uniform_profile(self):
        assert pearl_e_reward((1, 1), [(0.5, 0.5)], 1.0, "kl") == pytest.approx(1.0)

    def test_cosine_parallel_vectors(self):
        assert pearl_e_reward((1, 0), [(1, 0)], 1.0, "cos") == pytest.approx(2.0)

    def test_cosine_term_equals_lambda_along_ray(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            w = sample_preferences((2, 1, 1), 1, rng)[0]
            r = 3.7 * w
            lam = 2.5
            expected = float(w @ r) + lam
            assert pearl_e_reward(r, [w], lam, "cos") == pytest.approx(expected)

    def test_max_over_rays(self):
        rays = [(1.0, 0.0), (0.0, 1.0)]
        assert pearl_e_reward((2.0, 5.0), rays, 0.0) == pytest.approx(5.0)

    def test_zero_norm_reward_vector_cosine(self):
        assert pearl_e_reward((0.0, 0.0), [(0.5, 0.5)], 1.0, "cos") == pytest.approx(0.0)

    def test_empty_rays_rejected(self):
        with pytest.raises(ValueError):
            pearl_e_reward((1, 1), np.empty((0, 2)), 0.0)


class TestUniformityTerms:
    def test_kl_nonpositive_and_zero_only_at_uniform(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            w = rng.random(3) + 0.05
            r = rng.random(3) + 0.05
            u = kl_uniformity(w, r)
            assert u <= 1e-12
            profile = w * r / np.sum(w * r)
            if np.allclose(profile, 1 / 3, atol=1e-12):
                assert u == pytest.approx(0.0)
        assert kl_uniformity(np.array([0.5, 0.5]), np.array([1.0, 1.0])) == pytest.approx(0.0)

    def test_kl_invalid_profile_neutral(self):
        assert kl_uniformity(np.array([0.5, 0.5]), np.array([-1.0, 0.5])) == 0.0

    def test_cosine_bounds(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            w, r = rng.normal(size=(2, 3))
            assert -1.0 - 1e-12 <= cosine_uniformity(w, r) <= 1.0 + 1e-12


class TestEpsilonEngine:
    def test_empty_archive_rank_zero(self):
        engine = PearlEpsilon(kappa=8, nu=0.05)
        out = engine.score(sol((1, 2)))
        assert out.reward == 0.0
        assert out.archived

    def test_dominated_gets_full_penalty(self):
        engine = PearlEpsilon(kappa=8, nu=0.05)
        engine.score(sol((2, 2)))
        out = engine.score(sol((1, 1)))
        assert out.reward == -8.0
        assert not out.archived
        assert len(engine.archive) == 1

    def test_two_member_fitness_tie_breaks_lexicographically(self):
        engine = PearlEpsilon(kappa=8, nu=0.05)
        engine.score(sol((0, 1)))
        out = engine.score(sol((1, 0)))
        # pairwise indicator is 1 on the normalized scale in both directions,
        # fitness ties at -exp(-20); (0,1) precedes (1,0) lexicographically
        assert out.reward == -1.0
        assert out.archived
        fit = epsilon_fitness(np.array([[0.0, 1.0], [1.0, 0.0]]), 0.05)
        assert fit[0] == pytest.approx(-math.exp(-20.0))
        assert fit[1] == pytest.approx(-math.exp(-20.0))

    def test_rewards_stay_in_range(self):
        rng = np.random.default_rng(17)
        engine = PearlEpsilon(kappa=6, nu=0.05)
        for _ in range(300):
            out = engine.score(sol(rng.random(3) * 5))
            assert -6.0 <= out.reward <= 0.0
            assert float(out.reward).is_integer() or out.reward == -6.0
            assert len(engine.archive) <= 6


class TestNdsEngine:
    def test_empty_archive(self):
        engine = PearlNds(kappa=4, ranker="crowding")
        assert engine.score(sol((1, 1))).reward == 0.0

    def test_dominating_candidate_gets_rank_zero(self):
        engine = PearlNds(kappa=4, ranker="crowding")
        engine.score(sol((1, 1)))
        engine.score(sol((0, 2)))
        out = engine.score(sol((3, 3)))
        assert out.reward == 0.0
        assert len(engine.archive) == 1

    def test_interior_point_behind_boundaries(self):
        engine = PearlNds(kappa=4, ranker="crowding")
        engine.score(sol((0, 2)))
        engine.score(sol((2, 0)))
        out = engine.score(sol((1, 1)))
        assert out.reward == -2.0

    def test_rewards_in_allowed_set(self):
        rng = np.random.default_rng(19)
        for ranker in ("crowding", "niching"):
            engine = PearlNds(kappa=5, ranker=ranker, n_obj=3)
            for _ in range(300):
                size_before = len(engine.archive)
                out = engine.score(sol(rng.random(3) * 4))
                assert out.reward in {-5.0} | {-float(k) for k in range(size_before + 1)}

    def test_monotone_in_dominance_crowding_two_objectives(self):
        rng = np.random.default_rng(23)
        for _ in range(400):
            base = [sol(v) for v in rng.random((4, 2)) * 4]
            s2 = rng.random(2) * 4
            s1 = s2 + rng.random(2) * 0.5 + 1e-6  # strictly dominates s2
            rewards = []
            for candidate in (s1, s2):
                engine = PearlNds(kappa=4, ranker="crowding")
                for b in base:
                    engine.score(b)
                rewards.append(engine.score(sol(candidate)).reward)
            assert rewards[0] >= rewards[1]

    def test_dominance_monotonicity_can_fail_beyond_two_objectives(self):
        # With three or more objectives a dominated candidate can become the
        # extreme (hence infinite-crowding) point of some objective while the
        # dominating one stays interior; crowding then ranks the dominated
        # candidate higher.  This pins that known behavior of the NSGA-style
        # density measure rather than hiding it.
        base = [sol((3.0, 2.9, 3.8)), sol((3.7, 0.4, 1.4))]
        s1, s2 = (3.2, 1.4, 1.45), (3.1, 1.3, 1.2)  # s1 dominates s2
        rewards = []
        for candidate in (s1, s2):
            engine = PearlNds(kappa=4, ranker="crowding")
            for b in base:
                engine.score(b)
            rewards.append(engine.score(sol(candidate)).reward)
        assert rewards == [-2.0, -1.0]


class TestConstraintViolation:
    def test_all_satisfied(self):
        assert constraint_violation([-1.0, -0.5]) == 0.0
        assert constraint_violation([1000.0], limits=[1200.0]) == 0.0

    def test_relative_scaling(self):
        assert constraint_violation([1320.0], limits=[1200.0]) == pytest.approx(0.01)

    def test_benchmark_convention(self):
        assert constraint_violation([0.5, 0.2]) == pytest.approx(0.29)
        assert constraint_violation([0.5, -0.2]) == pytest.approx(0.25)

    def test_zero_limit_falls_back_to_absolute(self):
        assert constraint_violation([0.3], limits=[0.0]) == pytest.approx(0.09)

    def test_weights(self):
        assert constraint_violation([0.5, 0.2], weights=[2.0, 1.0]) == pytest.approx(0.54)
        with pytest.raises(ValueError):
            constraint_violation([0.5], weights=[-1.0])

    def test_tolerance_boundary(self):
        assert constraint_violation([1e-13]) == 0.0


class TestCurriculumConstrained:
    def test_feasible_empty_archive(self):
        engine = CurriculumConstrained(PearlNds(kappa=4, ranker="crowding"))
        out = engine.score(sol((1, 1)))
        assert out.reward == 0.0 and out.feasible and out.archived

    def test_infeasible_penalty(self):
        engine = CurriculumConstrained(PearlNds(kappa=64, ranker="crowding"))
        out = engine.score(sol((1, 1), g=[0.5, 0.2]))
        assert out.reward == pytest.approx(-64.29)
        assert not out.feasible and not out.archived
        assert len(engine.archive) == 0

    def test_archive_only_holds_feasible(self):
        rng = np.random.default_rng(29)
        engine = CurriculumConstrained(PearlNds(kappa=8, ranker="crowding"))
        for _ in range(200):
            g = [rng.normal()]
            engine.score(sol(rng.random(2), g=g))
        assert all(m.feasible for m in engine.archive.members)

    def test_infeasible_strictly_below_feasible_when_bonus_matches_kappa(self):
        rng = np.random.default_rng(31)
        engine = CurriculumConstrained(PearlNds(kappa=4, ranker="crowding"))
        feasible_rewards, infeasible_rewards = [], []
        for _ in range(300):
            g = [rng.normal(loc=-0.2, scale=0.6)]
            out = engine.score(sol(rng.random(2) * 3, g=g))
            (feasible_rewards if out.feasible else infeasible_rewards).append(out.reward)
        assert feasible_rewards and infeasible_rewards
        assert max(infeasible_rewards) < min(feasible_rewards)

    def test_rank2_infeasible_vs_feasible_archive(self):
        engine = PearlNds(kappa=4, ranker="crowding", constrained=True)
        engine.score(sol((1, 1)))
        out = engine.score(sol((5, 5), g=[0.4]))
        assert out.reward == -4.0
        assert not out.archived

    def test_rank2_tracks_least_violating_before_feasibility(self):
        engine = PearlNds(kappa=4, ranker="crowding", constrained=True)
        assert engine.score(sol((1, 1), g=[0.9])).reward == 0.0
        assert engine.score(sol((0, 0), g=[0.5])).reward == 0.0
        assert len(engine.archive) == 1
        assert engine.archive.members[0].cv == pytest.approx(0.25)


class TestEnvelopeEngine:
    def test_requires_resample_before_scoring(self):
        engine = PearlEnvelope(n_obj=2, lambda_=0.0)
        with pytest.raises(RuntimeError):
            engine.score(sol((1, 1)))

    def test_archive_unbounded_and_reward_ignores_it(self):
        rng = np.random.default_rng(37)
        engine = PearlEnvelope(n_obj=2, lambda_=0.0, n_rays=1)
        engine.resample(rng)
        w = engine.rays[0].copy()
        rewards = [engine.score(sol(rng.random(2) * 3)).reward for _ in range(100)]
        assert len(engine.archive) > 1
        # every reward is exactly the scalarization, independent of archive state
        engine2 = PearlEnvelope(n_obj=2, lambda_=0.0, n_rays=1)
        engine2.rays = w[None, :]
        rng2 = np.random.default_rng(37)
        rng2.gamma(shape=np.ones(2), size=(1, 2))  # consume the resample draw
        for r in rewards:
            assert math.isfinite(r)

    def test_normalized_objectives(self):
        engine = PearlEnvelope(n_obj=2, lambda_=0.0, normalized_obj=True)
        engine.rays = np.array([[0.5, 0.5]])
        engine.score(sol((0, 0)))
        engine.score(sol((4, 2)))
        out = engine.score(sol((2, 1)))
        assert out.reward == pytest.approx(0.5)  # normalized profile (0.5, 0.5)

    def test_observation_is_ray_vector(self):
        engine = PearlEnvelope(n_obj=3, n_rays=2)
        engine.resample(np.random.default_rng(41))
        assert engine.observation().shape == (6,)


class TestMakeSolution:
    def test_negates_objectives(self):
        s = make_solution([0.1, 0.2], [1.0, -2.0])
        assert s.obj.tolist() == [-1.0, 2.0]

    def test_limit_based_constraints_store_excess(self):
        s = make_solution([0.1], [1.0, 2.0], constraints=[1320.0], limits=[1200.0])
        assert s.g.tolist() == [120.0]
        assert s.cv == pytest.approx(0.01)
        assert not s.feasible
        t = make_solution([0.1], [1.0, 2.0], constraints=[1100.0], limits=[1200.0])
        assert t.feasible
