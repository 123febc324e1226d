"""Clipped-surrogate policy-gradient trainer for single-step problems.

The training problem is a continuous bandit: one action per episode, the
action is the decision vector, and the reward comes from a per-worker
engine that scores the evaluated objectives.  The policy is a small
feed-forward network emitting a diagonal Gaussian that is squashed onto
the unit box (clipped linear map by default, logistic optionally); a
separate network of the same shape provides the value baseline.
Everything runs in float64 numpy so that gradients can be checked against
finite differences exactly.

Workers are independent-state objects: each owns its reward engine, its
archive, its RNG stream, and its evaluation counter.  They are stepped
inside the rollout loop (problem evaluation is pure, so this matches the
fork-join model without the process overhead) and parameters are published
to them immutably between batches.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .pareto import Solution, best_front
from .problems import ProblemSpec, evaluate
from .rewards import RewardOutcome, make_solution

logger = logging.getLogger(__name__)

LOG_STD_MIN, LOG_STD_MAX = -5.0, 2.0
_ADAM_BETA1, _ADAM_BETA2, _ADAM_EPS = 0.9, 0.999, 1e-8
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


@dataclass
class TrainerConfig:
    """Optimization hyperparameters; defaults are the conventional clipped
    surrogate settings with batches of n_steps x ncores transitions.

    Each single-step episode observes a fresh uniform latent vector (the
    reset state of the one-step environment).  Conditioning the policy on
    that latent lets a single network cover a whole front instead of
    collapsing to one Gaussian mode; preference-conditioned engines append
    their active rays to the observation.  ``observation="token"`` falls
    back to a constant scalar input.
    """

    n_steps: int = 32
    ncores: int = 8
    budget: int = 10_000
    learning_rate: float = 3e-4
    clip_ratio: float = 0.2
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    epochs: int = 4
    minibatches: int = 4
    seed: int = 0
    hidden: int = 64
    # None: use the reward engine's preferred exploration width
    init_log_std: Optional[float] = None
    normalize_advantages: bool = True
    observation: str = "latent"
    latent_dim: Optional[int] = None  # None: use the decision dimension
    # box map for the Gaussian sample: "clip" reaches the box boundary
    # exactly (linear map of [-1, 1] with clamping), "logistic" is smooth
    # but only approaches the boundary asymptotically
    squash: str = "clip"

    def batch_size(self) -> int:
        return self.n_steps * self.ncores

    def resolved_latent_dim(self, problem: ProblemSpec) -> int:
        if self.observation == "token":
            return 1
        if self.observation != "latent":
            raise ValueError("observation must be 'latent' or 'token'")
        return self.latent_dim if self.latent_dim is not None else problem.n_x


class PolicyState:
    """Network parameters plus optimizer moments and a step counter."""

    def __init__(self, obs_dim: int, act_dim: int, cfg: TrainerConfig,
                 rng: np.random.Generator, init_log_std: Optional[float] = None):
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        h = cfg.hidden
        def dense(n_in, n_out, scale=1.0):
            return rng.normal(0.0, scale / np.sqrt(n_in), size=(n_in, n_out))

        self.params = {
            "pW1": dense(obs_dim, h), "pb1": np.zeros(h),
            "pW2": dense(h, h), "pb2": np.zeros(h),
            "pW3": dense(h, act_dim, scale=0.01), "pb3": np.zeros(act_dim),
            "log_std": np.full(act_dim, float(
                init_log_std if init_log_std is not None
                else (cfg.init_log_std if cfg.init_log_std is not None else -0.75))),
            "vW1": dense(obs_dim, h), "vb1": np.zeros(h),
            "vW2": dense(h, h), "vb2": np.zeros(h),
            "vW3": dense(h, 1, scale=0.01), "vb3": np.zeros(1),
        }
        self.m = {k: np.zeros_like(v) for k, v in self.params.items()}
        self.v = {k: np.zeros_like(v) for k, v in self.params.items()}
        self.adam_steps = 0
        self.updates = 0
        self.learning_rate = cfg.learning_rate

    def policy_heads(self, obs: np.ndarray):
        """Action mean (pre-squash) and clamped per-dimension log-std."""
        p = self.params
        h1 = np.tanh(obs @ p["pW1"] + p["pb1"])
        h2 = np.tanh(h1 @ p["pW2"] + p["pb2"])
        mean = h2 @ p["pW3"] + p["pb3"]
        log_std = np.clip(p["log_std"], LOG_STD_MIN, LOG_STD_MAX)
        return mean, log_std

    def value(self, obs: np.ndarray) -> np.ndarray:
        p = self.params
        h1 = np.tanh(obs @ p["vW1"] + p["vb1"])
        h2 = np.tanh(h1 @ p["vW2"] + p["vb2"])
        return (h2 @ p["vW3"] + p["vb3"])[:, 0]

    def adam_step(self, grads: dict):
        self.adam_steps += 1
        t = self.adam_steps
        lr = self.learning_rate
        for key, g in grads.items():
            self.m[key] = _ADAM_BETA1 * self.m[key] + (1 - _ADAM_BETA1) * g
            self.v[key] = _ADAM_BETA2 * self.v[key] + (1 - _ADAM_BETA2) * g * g
            m_hat = self.m[key] / (1 - _ADAM_BETA1**t)
            v_hat = self.v[key] / (1 - _ADAM_BETA2**t)
            self.params[key] -= lr * m_hat / (np.sqrt(v_hat) + _ADAM_EPS)

    def check_finite(self):
        for key, value in self.params.items():
            if not np.all(np.isfinite(value)):
                raise FloatingPointError(f"non-finite parameter {key}")


def gaussian_log_prob(z: np.ndarray, mean: np.ndarray, log_std: np.ndarray) -> np.ndarray:
    std = np.exp(log_std)
    return np.sum(-0.5 * ((z - mean) / std) ** 2 - log_std - _HALF_LOG_2PI, axis=1)


def squash(z: np.ndarray, kind: str = "logistic") -> np.ndarray:
    """Map Gaussian samples onto the unit box.

    ``logistic`` is the smooth open-box map; ``clip`` maps [-1, 1] linearly
    onto the box and clamps, so boundary values are reachable exactly.
    """
    if kind == "logistic":
        return 1.0 / (1.0 + np.exp(-z))
    if kind == "clip":
        return np.clip(0.5 * (z + 1.0), 0.0, 1.0)
    raise ValueError(f"unknown squash kind: {kind!r}")


def squash_log_jacobian(actions: np.ndarray, kind: str = "logistic") -> np.ndarray:
    """Log-density correction of the box map (probability ratios in the
    update use the pre-squash Gaussian densities, which is exact because the
    correction does not depend on the policy parameters)."""
    if kind == "logistic":
        return np.sum(np.log(actions * (1.0 - actions)), axis=1)
    if kind == "clip":
        return np.full(len(actions), actions.shape[1] * np.log(2.0))
    raise ValueError(f"unknown squash kind: {kind!r}")


@dataclass
class RolloutBatch:
    """One batch of transitions: n_steps x ncores single-step episodes."""

    observations: np.ndarray   # (B, obs_dim)
    actions: np.ndarray        # (B, act) decision vectors in the unit box
    pre_squash: np.ndarray     # (B, act) Gaussian samples before squashing
    rewards: np.ndarray        # (B,) scaled rewards used for the update
    raw_rewards: np.ndarray    # (B,) engine rewards as logged
    log_probs: np.ndarray      # (B,) action log-probabilities (with jacobian)
    gauss_log_probs: np.ndarray  # (B,) pre-squash Gaussian log-densities
    values: np.ndarray         # (B,) value predictions at collection time


@dataclass
class EvalLogRow:
    step: int
    worker: int
    x: np.ndarray
    f: np.ndarray
    g: np.ndarray
    cv: float
    reward: float


@dataclass
class RunResult:
    """Merged outcome of one training or baseline run."""

    front: list[Solution]
    log: list[EvalLogRow]
    config: dict
    wall_time: float
    n_evaluations: int


class Worker:
    """One rollout worker: engine + RNG stream + evaluation counter."""

    def __init__(self, index: int, engine, rng: np.random.Generator):
        self.index = index
        self.engine = engine
        self.rng = rng
        self.eval_count = 0


def loss_and_grad(policy: PolicyState, obs, z, gauss_logp_old, adv, returns,
                  cfg: TrainerConfig):
    """Total loss (clip surrogate + value MSE - entropy bonus) and gradients.

    Advantages and returns are collection-time constants.  The squash
    jacobian is policy-independent given the action, so probability ratios
    are formed from the pre-squash Gaussian densities alone.
    """
    p = policy.params
    B = obs.shape[0]
    grads = {k: np.zeros_like(v) for k, v in p.items()}

    # policy network forward
    a1 = obs @ p["pW1"] + p["pb1"]; h1 = np.tanh(a1)
    a2 = h1 @ p["pW2"] + p["pb2"]; h2 = np.tanh(a2)
    mean = h2 @ p["pW3"] + p["pb3"]
    log_std = np.clip(p["log_std"], LOG_STD_MIN, LOG_STD_MAX)
    inv_var = np.exp(-2.0 * log_std)

    delta = z - mean
    # the same expression rollout uses, so the on-policy ratio is exactly 1
    logp = gaussian_log_prob(z, mean, log_std)
    ratio = np.exp(logp - gauss_logp_old)
    surr_raw = ratio * adv
    clipped_ratio = np.clip(ratio, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio)
    surr_clip = clipped_ratio * adv
    policy_loss = -float(np.mean(np.minimum(surr_raw, surr_clip)))

    # d policy_loss / d ratio; ties fall to the clipped branch so a zero
    # clip range yields an exactly zero gradient at the on-policy point
    use_raw = surr_raw < surr_clip
    inside = (ratio > 1.0 - cfg.clip_ratio) & (ratio < 1.0 + cfg.clip_ratio)
    d_ratio = np.where(use_raw | inside, -adv / B, 0.0)
    d_logp = d_ratio * ratio

    d_mean = d_logp[:, None] * (delta * inv_var)
    std_mask = (p["log_std"] > LOG_STD_MIN) & (p["log_std"] < LOG_STD_MAX)
    d_log_std = np.sum(d_logp[:, None] * (delta**2 * inv_var - 1.0), axis=0)

    # entropy bonus: H = sum_d (log_std_d + (1 + log 2 pi) / 2)
    entropy = float(np.sum(log_std) + policy.act_dim * 0.5 * (1.0 + np.log(2 * np.pi)))
    d_log_std -= cfg.entropy_coef
    grads["log_std"] = np.where(std_mask, d_log_std, 0.0)

    # backprop the policy trunk
    grads["pW3"] = h2.T @ d_mean
    grads["pb3"] = d_mean.sum(axis=0)
    dh2 = d_mean @ p["pW3"].T * (1.0 - h2**2)
    grads["pW2"] = h1.T @ dh2
    grads["pb2"] = dh2.sum(axis=0)
    dh1 = dh2 @ p["pW2"].T * (1.0 - h1**2)
    grads["pW1"] = obs.T @ dh1
    grads["pb1"] = dh1.sum(axis=0)

    # value network
    va1 = obs @ p["vW1"] + p["vb1"]; vh1 = np.tanh(va1)
    va2 = vh1 @ p["vW2"] + p["vb2"]; vh2 = np.tanh(va2)
    values = (vh2 @ p["vW3"] + p["vb3"])[:, 0]
    err = values - returns
    value_loss = float(np.mean(err**2))
    dv = (2.0 * cfg.value_coef / B) * err
    grads["vW3"] = vh2.T @ dv[:, None]
    grads["vb3"] = np.array([dv.sum()])
    dvh2 = dv[:, None] @ p["vW3"].T.reshape(1, -1) * (1.0 - vh2**2)
    grads["vW2"] = vh1.T @ dvh2
    grads["vb2"] = dvh2.sum(axis=0)
    dvh1 = dvh2 @ p["vW2"].T * (1.0 - vh1**2)
    grads["vW1"] = obs.T @ dvh1
    grads["vb1"] = dvh1.sum(axis=0)

    loss = policy_loss + cfg.value_coef * value_loss - cfg.entropy_coef * entropy
    info = {"policy_loss": policy_loss, "value_loss": value_loss, "entropy": entropy}
    return loss, grads, info


def _worker_observations(worker: Worker, n: int, latent_dim: int,
                         cfg: TrainerConfig) -> np.ndarray:
    """Per-episode observations: fresh latents plus the engine's conditioning.

    The engine suffix (preference rays, when the engine has them) is constant
    within a batch; the latent part resamples every episode.
    """
    suffix = worker.engine.observation()
    if cfg.observation == "latent":
        latent = worker.rng.uniform(0.0, 1.0, size=(n, latent_dim))
    else:
        latent = np.ones((n, 1))
    if suffix.size == 0:
        return latent
    return np.hstack([latent, np.repeat(suffix[None, :], n, axis=0)])


def rollout(policy: PolicyState, workers: list[Worker], problem: ProblemSpec,
            cfg: TrainerConfig, solution_builder: Callable[[np.ndarray], Solution],
            log: Optional[list] = None, step_offset: int = 0) -> RolloutBatch:
    """Collect one batch: every worker draws n_steps actions and scores them.

    A failed problem evaluation never aborts the batch: the sample is paid
    the full archive penalty and flagged in the log with NaN objectives.
    """
    n = cfg.n_steps
    latent_dim = cfg.resolved_latent_dim(problem)
    obs_rows, act_rows, z_rows = [], [], []
    raw_rewards, logp_rows, gauss_rows, value_rows = [], [], [], []
    scales = []
    step = step_offset
    for worker in workers:
        worker.engine.resample(worker.rng)
        obs = _worker_observations(worker, n, latent_dim, cfg)
        mean, log_std = policy.policy_heads(obs)
        std = np.exp(log_std)
        z = mean + std * worker.rng.standard_normal((n, policy.act_dim))
        actions = squash(z, cfg.squash)
        assert np.all((actions >= 0.0) & (actions <= 1.0)), "action left the unit box"
        gauss_logp = gaussian_log_prob(z, mean, log_std)
        logp = gauss_logp + squash_log_jacobian(actions, cfg.squash)
        values = policy.value(obs)
        scale = float(getattr(worker.engine, "reward_scale", 1.0))
        for t in range(n):
            x = actions[t]
            try:
                record = evaluate(problem, x, index=worker.eval_count)
                sol = solution_builder(record)
                outcome = worker.engine.score(sol)
                f, g, cv = record.objectives, record.constraints, sol.cv
            except Exception:  # noqa: BLE001 - flagged, never aborts the batch
                logger.warning("evaluation failed at worker %d step %d",
                               worker.index, worker.eval_count, exc_info=True)
                outcome = RewardOutcome(reward=-scale, feasible=False, archived=False)
                f = np.full(problem.n_obj, np.nan)
                g = np.full(problem.n_constraints, np.nan)
                cv = np.nan
            worker.eval_count += 1
            raw_rewards.append(outcome.reward)
            if log is not None:
                log.append(EvalLogRow(step=step, worker=worker.index, x=x.copy(),
                                      f=f, g=g, cv=cv, reward=outcome.reward))
            step += 1
        obs_rows.append(obs)
        act_rows.append(actions)
        z_rows.append(z)
        logp_rows.append(logp)
        gauss_rows.append(gauss_logp)
        value_rows.append(values)
        scales.append(np.full(n, scale))
    raw = np.asarray(raw_rewards)
    return RolloutBatch(
        observations=np.vstack(obs_rows),
        actions=np.vstack(act_rows),
        pre_squash=np.vstack(z_rows),
        rewards=raw / np.concatenate(scales),
        raw_rewards=raw,
        log_probs=np.concatenate(logp_rows),
        gauss_log_probs=np.concatenate(gauss_rows),
        values=np.concatenate(value_rows),
    )


def update(policy: PolicyState, batch: RolloutBatch, cfg: TrainerConfig,
           rng: np.random.Generator) -> PolicyState:
    """Several epochs of minibatch clipped-surrogate steps on one batch.

    A non-finite loss skips that minibatch, halves the learning rate, and
    logs a warning; parameters are verified finite after the update.
    """
    B = len(batch.rewards)
    returns = batch.rewards
    adv = returns - batch.values
    if cfg.normalize_advantages:
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)
    n_mb = max(1, cfg.minibatches)
    for _ in range(cfg.epochs):
        perm = rng.permutation(B)
        for chunk in np.array_split(perm, n_mb):
            if len(chunk) == 0:
                continue
            loss, grads, _ = loss_and_grad(
                policy, batch.observations[chunk], batch.pre_squash[chunk],
                batch.gauss_log_probs[chunk], adv[chunk], returns[chunk], cfg)
            if not np.isfinite(loss):
                policy.learning_rate *= 0.5
                logger.warning("non-finite loss; skipping minibatch and halving "
                               "learning rate to %g", policy.learning_rate)
                continue
            policy.adam_step(grads)
    policy.check_finite()
    policy.updates += 1
    return policy


def merged_front(workers: list[Worker]) -> list[Solution]:
    """Non-dominated union of the worker archives (feasibility first)."""
    members = [m for w in workers for m in w.engine.archive.members]
    return best_front(members)


def train(problem: ProblemSpec, engine_factory: Callable[[], object],
          cfg: TrainerConfig,
          solution_builder: Optional[Callable] = None) -> RunResult:
    """Alternate rollout and update until the evaluation budget is spent.

    ``engine_factory`` builds one fresh reward engine per worker.  Returns
    the merged non-dominated front across the worker archives together with
    the complete evaluation history.
    """
    if cfg.budget < cfg.batch_size():
        raise ValueError("budget must cover at least one batch of evaluations")
    start = time.perf_counter()
    seed_seq = np.random.SeedSequence(cfg.seed)
    streams = seed_seq.spawn(cfg.ncores + 2)
    init_rng = np.random.Generator(np.random.PCG64(streams[0]))
    shuffle_rng = np.random.Generator(np.random.PCG64(streams[1]))
    workers = [
        Worker(index=i, engine=engine_factory(),
               rng=np.random.Generator(np.random.PCG64(streams[2 + i])))
        for i in range(cfg.ncores)
    ]
    if solution_builder is None:
        solution_builder = lambda rec: make_solution(  # noqa: E731
            rec.x, rec.objectives, rec.constraints)
    # ray-conditioned engines know their observation suffix only after the
    # first resample; probe with a throwaway stream
    probe = engine_factory()
    probe.resample(np.random.Generator(np.random.PCG64(seed_seq.spawn(1)[0])))
    obs_dim = cfg.resolved_latent_dim(problem) + len(probe.observation())
    init_log_std = cfg.init_log_std
    if init_log_std is None:
        init_log_std = getattr(probe, "default_log_std", -0.75)
    policy = PolicyState(obs_dim=obs_dim, act_dim=problem.n_x, cfg=cfg,
                         rng=init_rng, init_log_std=init_log_std)

    log: list[EvalLogRow] = []
    n_updates = cfg.budget // cfg.batch_size()
    for round_index in range(n_updates):
        batch = rollout(policy, workers, problem, cfg, solution_builder,
                        log=log, step_offset=round_index * cfg.batch_size())
        update(policy, batch, cfg, shuffle_rng)
    return RunResult(
        front=merged_front(workers),
        log=log,
        config=asdict(cfg),
        wall_time=time.perf_counter() - start,
        n_evaluations=len(log),
    )
