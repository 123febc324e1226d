import numpy as np
import pytest

from pearlkit.pareto import dominates
from pearlkit.problems import get_problem
from pearlkit.rewards import PearlEnvelope, PearlEpsilon, PearlNds
from pearlkit.trainer import (
    PolicyState,
    TrainerConfig,
    Worker,
    gaussian_log_prob,
    loss_and_grad,
    merged_front,
    rollout,
    squash,
    train,
    update,
)

from oracles import finite_difference_gradient


def toy_batch(rng, obs_dim, act_dim, n):
    obs = rng.normal(size=(n, obs_dim))
    z = rng.normal(size=(n, act_dim))
    logp_old = rng.normal(scale=0.2, size=n)
    adv = rng.normal(size=n)
    returns = rng.normal(size=n)
    return obs, z, logp_old, adv, returns


class TestGradients:
    def test_backprop_matches_central_differences(self):
        cfg = TrainerConfig(hidden=6, clip_ratio=0.2, entropy_coef=0.01,
                            value_coef=0.5)
        rng = np.random.default_rng(0)
        for trial in range(20):
            policy = PolicyState(obs_dim=3, act_dim=2, cfg=cfg, rng=rng)
            # keep parameters away from the clip kinks for differentiability
            obs, z, logp_old, adv, returns = toy_batch(rng, 3, 2, 6)
            mean, log_std = policy.policy_heads(obs)
            logp_old = gaussian_log_prob(z, mean, log_std) + rng.uniform(
                0.05, 0.1, size=6) * rng.choice([-1.0, 1.0], size=6)
            loss, grads, _ = loss_and_grad(policy, obs, z, logp_old, adv, returns, cfg)

            def loss_fn(params):
                saved = policy.params
                policy.params = params
                value = loss_and_grad(policy, obs, z, logp_old, adv, returns, cfg)[0]
                policy.params = saved
                return value

            fd = finite_difference_gradient(loss_fn, policy.params, h=1e-6)
            for key in policy.params:
                scale = max(np.max(np.abs(fd[key])), 1e-8)
                err = np.max(np.abs(grads[key] - fd[key])) / scale
                assert err < 1e-4, f"trial {trial} param {key}: rel err {err:.2e}"

    def test_zero_advantage_leaves_policy_untouched_without_entropy(self):
        cfg = TrainerConfig(hidden=8, entropy_coef=0.0)
        rng = np.random.default_rng(1)
        policy = PolicyState(obs_dim=2, act_dim=3, cfg=cfg, rng=rng)
        obs, z, _, _, returns = toy_batch(rng, 2, 3, 8)
        mean, log_std = policy.policy_heads(obs)
        logp = gaussian_log_prob(z, mean, log_std)
        adv = np.zeros(8)
        _, grads, _ = loss_and_grad(policy, obs, z, logp, adv, returns, cfg)
        for key in ("pW1", "pb1", "pW2", "pb2", "pW3", "pb3", "log_std"):
            assert np.allclose(grads[key], 0.0), key
        assert np.any(grads["vW3"] != 0.0)

    def test_zero_clip_ratio_gives_zero_policy_gradient_on_policy(self):
        cfg = TrainerConfig(hidden=8, clip_ratio=0.0, entropy_coef=0.0)
        rng = np.random.default_rng(2)
        policy = PolicyState(obs_dim=2, act_dim=2, cfg=cfg, rng=rng)
        obs, z, _, adv, returns = toy_batch(rng, 2, 2, 8)
        mean, log_std = policy.policy_heads(obs)
        logp = gaussian_log_prob(z, mean, log_std)  # ratio is exactly 1
        _, grads, _ = loss_and_grad(policy, obs, z, logp, adv, returns, cfg)
        for key in ("pW1", "pb1", "pW2", "pb2", "pW3", "pb3", "log_std"):
            assert np.allclose(grads[key], 0.0), key


class TestRollout:
    def make_workers(self, n, kappa=8, seed=0):
        streams = np.random.SeedSequence(seed).spawn(n)
        return [
            Worker(i, PearlNds(kappa=kappa, ranker="crowding"),
                   np.random.Generator(np.random.PCG64(streams[i])))
            for i in range(n)
        ]

    def test_batch_size_is_steps_times_cores(self):
        cfg = TrainerConfig(n_steps=32, ncores=8, hidden=8)
        problem = get_problem("dtlz2")
        workers = self.make_workers(8)
        policy = PolicyState(obs_dim=12, act_dim=12, cfg=cfg,
                             rng=np.random.default_rng(0))
        from pearlkit.rewards import make_solution

        batch = rollout(policy, workers, problem, cfg,
                        lambda r: make_solution(r.x, r.objectives, r.constraints))
        assert len(batch.rewards) == 256
        assert batch.observations.shape == (256, 12)
        assert np.all((batch.actions >= 0) & (batch.actions <= 1))
        assert np.all(batch.rewards >= -1.0) and np.all(batch.rewards <= 0.0)

    def test_token_observation_mode(self):
        cfg = TrainerConfig(n_steps=4, ncores=2, hidden=8, observation="token")
        problem = get_problem("dtlz2")
        workers = self.make_workers(2)
        policy = PolicyState(obs_dim=1, act_dim=12, cfg=cfg,
                             rng=np.random.default_rng(0))
        from pearlkit.rewards import make_solution

        batch = rollout(policy, workers, problem, cfg,
                        lambda r: make_solution(r.x, r.objectives, r.constraints))
        assert batch.observations.shape == (8, 1)
        assert np.all(batch.observations == 1.0)

    def test_evaluation_failure_flagged_not_fatal(self):
        cfg = TrainerConfig(n_steps=4, ncores=1, hidden=8)
        problem = get_problem("dtlz2")
        workers = self.make_workers(1, kappa=8)
        policy = PolicyState(obs_dim=12, act_dim=12, cfg=cfg,
                             rng=np.random.default_rng(0))
        calls = {"n": 0}

        def exploding_builder(record):
            calls["n"] += 1
            if calls["n"] == 2:
                raise RuntimeError("synthetic failure")
            from pearlkit.rewards import make_solution

            return make_solution(record.x, record.objectives, record.constraints)

        log = []
        batch = rollout(policy, workers, problem, cfg, exploding_builder, log=log)
        assert len(batch.rewards) == 4
        assert batch.raw_rewards[1] == -8.0  # full archive penalty
        assert np.isnan(log[1].f).all()

    def test_envelope_rays_constant_within_batch_resampled_across(self):
        cfg = TrainerConfig(n_steps=8, ncores=2, hidden=8)
        problem = get_problem("dtlz2")
        streams = np.random.SeedSequence(3).spawn(2)
        workers = [
            Worker(i, PearlEnvelope(n_obj=3, lambda_=0.0, n_rays=1),
                   np.random.Generator(np.random.PCG64(streams[i])))
            for i in range(2)
        ]
        policy = PolicyState(obs_dim=15, act_dim=12, cfg=cfg,
                             rng=np.random.default_rng(0))
        from pearlkit.rewards import make_solution

        builder = lambda r: make_solution(r.x, r.objectives, r.constraints)  # noqa: E731
        first = rollout(policy, workers, problem, cfg, builder)
        second = rollout(policy, workers, problem, cfg, builder)
        for batch in (first, second):
            rays = batch.observations[:, 12:].reshape(2, 8, 3)
            for w in range(2):
                assert np.all(rays[w] == rays[w, 0])
        # ray part of the observation resamples across batches
        assert not np.allclose(first.observations[0, 12:], second.observations[0, 12:])
        # latent part differs per episode within a batch
        assert not np.allclose(first.observations[0, :12], first.observations[1, :12])


class TestUpdate:
    def test_value_head_converges_on_constant_reward(self):
        cfg = TrainerConfig(n_steps=8, ncores=2, hidden=16, learning_rate=1e-2,
                            entropy_coef=0.0)
        rng = np.random.default_rng(5)
        policy = PolicyState(obs_dim=1, act_dim=2, cfg=cfg, rng=rng)
        constant = 0.25
        obs = np.ones((16, 1))
        for step in range(50):
            z = rng.normal(size=(16, 2))
            mean, log_std = policy.policy_heads(obs)
            logp = gaussian_log_prob(z, mean, log_std)
            from pearlkit.trainer import RolloutBatch

            batch = RolloutBatch(
                observations=obs, actions=squash(z), pre_squash=z,
                rewards=np.full(16, constant), raw_rewards=np.full(16, constant),
                log_probs=logp, gauss_log_probs=logp,
                values=policy.value(obs),
            )
            update(policy, batch, cfg, rng)
        assert abs(float(policy.value(obs[:1])[0]) - constant) < 1e-2

    def test_nan_guard_halves_learning_rate(self):
        cfg = TrainerConfig(hidden=8, n_steps=4, ncores=1)
        rng = np.random.default_rng(6)
        policy = PolicyState(obs_dim=1, act_dim=2, cfg=cfg, rng=rng)
        from pearlkit.trainer import RolloutBatch

        z = rng.normal(size=(4, 2))
        obs = np.ones((4, 1))
        mean, log_std = policy.policy_heads(obs)
        logp = gaussian_log_prob(z, mean, log_std)
        batch = RolloutBatch(
            observations=obs, actions=squash(z), pre_squash=z,
            rewards=np.array([np.nan, 0.0, 0.0, 0.0]),
            raw_rewards=np.zeros(4), log_probs=logp, gauss_log_probs=logp,
            values=np.zeros(4),
        )
        before = policy.learning_rate
        update(policy, batch, cfg, rng)
        assert policy.learning_rate < before
        policy.check_finite()


class TestTrain:
    def test_budget_smaller_than_batch_is_usage_error(self):
        cfg = TrainerConfig(n_steps=32, ncores=8, budget=100)
        with pytest.raises(ValueError):
            train(get_problem("dtlz2"), lambda: PearlNds(kappa=8), cfg)

    def test_update_round_count_and_budget(self):
        cfg = TrainerConfig(n_steps=8, ncores=2, budget=100, hidden=8, seed=1)
        result = train(get_problem("ctp1"),
                       lambda: PearlNds(kappa=8, ranker="crowding", constrained=True),
                       cfg)
        # 100 // 16 = 6 rounds of 16 evaluations
        assert result.n_evaluations == 96
        assert result.n_evaluations <= cfg.budget

    def test_fixed_seed_reproduces_evaluation_log(self):
        cfg = TrainerConfig(n_steps=8, ncores=3, budget=96, hidden=8, seed=7)
        runs = []
        for _ in range(2):
            result = train(get_problem("dtlz2"),
                           lambda: PearlNds(kappa=8, ranker="crowding"), cfg)
            runs.append(result)
        for a, b in zip(runs[0].log, runs[1].log):
            assert a.step == b.step and a.worker == b.worker
            assert np.array_equal(a.x, b.x)
            assert np.array_equal(a.f, b.f)
            assert a.reward == b.reward

    def test_merged_front_mutually_non_dominated(self):
        cfg = TrainerConfig(n_steps=8, ncores=2, budget=160, hidden=8, seed=3)
        result = train(get_problem("dtlz2"),
                       lambda: PearlNds(kappa=8, ranker="crowding"), cfg)
        assert result.front
        for a in result.front:
            for b in result.front:
                if a is not b:
                    assert not dominates(a.obj, b.obj)

    def test_epsilon_engine_trains(self):
        cfg = TrainerConfig(n_steps=8, ncores=2, budget=96, hidden=8, seed=4)
        result = train(get_problem("dtlz2"), lambda: PearlEpsilon(kappa=8, nu=0.05), cfg)
        assert result.n_evaluations == 96


class TestMergedFront:
    def test_feasible_members_shadow_infeasible(self):
        from pearlkit.rewards import make_solution

        streams = np.random.SeedSequence(0).spawn(2)
        w1 = Worker(0, PearlNds(kappa=4, ranker="crowding", constrained=True),
                    np.random.Generator(np.random.PCG64(streams[0])))
        w2 = Worker(1, PearlNds(kappa=4, ranker="crowding", constrained=True),
                    np.random.Generator(np.random.PCG64(streams[1])))
        w1.engine.score(make_solution(np.zeros(2), [1.0, 1.0], [0.5]))
        w2.engine.score(make_solution(np.zeros(2), [2.0, 2.0], [-1.0]))
        front = merged_front([w1, w2])
        assert len(front) == 1
        assert front[0].feasible
