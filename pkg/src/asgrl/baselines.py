"""The four comparison methods.

plan-hrl      one tabular policy per operator of the shortest symbolic
              plan; an operator terminates when its add effects all
              hold and its delete effects all fail under the fluent
              detectors.  Flawed operators (unsatisfiable effect
              conjunctions, preconditions met by unreachable states)
              stall the chain, which is the point of the comparison.
landmark-hrl  the ablation with a single skill per landmark and no
              diversity bonus; literally the main method at k=1,
              alpha_h=0, so it delegates to the same training loop.
landmark-shaping  a flat Q-learner on the potential-based reward
              gamma*phi(s') - phi(s), phi counting currently-true
              landmark fluents, plus the sparse goal reward.
goal-q        a flat Q-learner on the sparse goal reward alone.

Flat agents anneal epsilon once per episode by 0.995 (not on success)
and use a fixed learning rate.
"""

import numpy as np

from .envs import kernels
from .meta import TrainLog, train as train_asgrl
from .model import find_plan, ground
from .rng import rand_double, rand_range
from .skills import HyperParams

FLAT_EPS_DECAY = 0.995
FLAT_EPS_FLOOR = 0.05
FLAT_LR = 0.1
FLAT_GOAL_REWARD = 1.0


class OperatorPolicy:
    """One tabular policy for one ground operator of the plan."""

    def __init__(self, action, env, hp):
        self.action = action
        self.q = np.zeros((env.n_states, env.n_actions), dtype=np.float64)
        self.add_fids = np.array(
            sorted(env.fluent_ids[f] for f in action.add), dtype=np.int64
        )
        self.del_fids = np.array(
            sorted(env.fluent_ids[f] for f in action.delete), dtype=np.int64
        )
        self.eps = hp.eps_start
        self.lr = hp.lr_start


class PlanAgent:
    """Plan-HRL: execute the symbolic plan, one learned policy per step."""

    def __init__(self, plan, policies):
        self.plan = plan
        self.policies = policies


class FlatAgent:
    """A single tabular policy over primitive actions."""

    def __init__(self, env, hp, shaping_fids=()):
        self.q = np.zeros((env.n_states, env.n_actions), dtype=np.float64)
        self.eps = hp.eps_start
        self.lr = FLAT_LR
        self.shaping_fids = np.array(sorted(shaping_fids), dtype=np.int64)


def _run_operator(env, pol, s, max_steps, hp, rng, update, eps):
    """One operator attempt; returns (reached, steps, end state vector)."""
    s = np.array(s, dtype=np.int64)
    trace_enc = np.zeros(max_steps + 1, dtype=np.int64)
    trace_act = np.zeros(max(max_steps, 1), dtype=np.int64)
    status, steps = kernels.conj_rollout_kernel(
        env.domain_id,
        env.consts,
        env.walls,
        env.dims,
        pol.q,
        s,
        pol.add_fids,
        pol.del_fids,
        eps,
        pol.lr,
        hp.gamma,
        max_steps,
        rng,
        1 if update else 0,
        trace_enc,
        trace_act,
    )
    reached = status == 2
    if reached and update:
        if steps > 0:
            e_prev, a_prev = int(trace_enc[steps - 1]), int(trace_act[steps - 1])
            pol.q[e_prev, a_prev] += pol.lr * (1.0 - pol.q[e_prev, a_prev])
        pol.eps = max(pol.eps * hp.eps_decay, hp.eps_floor)
        pol.lr = max(pol.lr * hp.lr_decay, hp.lr_floor)
    return reached, steps, s


def evaluate_plan_agent(agent, env, runs, eps_eval, max_steps, hp, rng):
    """Success rate of chaining the plan's operators at low epsilon."""
    if runs <= 0:
        raise ValueError("runs must be positive")
    successes = 0
    for _ in range(runs):
        s = env.reset()
        budget = max_steps
        for pol in agent.policies:
            if budget <= 0:
                break
            reached, steps, s = _run_operator(
                env, pol, s, budget, hp, rng, update=False, eps=eps_eval
            )
            budget -= steps
            if not reached:
                break
        if env.is_terminal(s):
            successes += 1
    return successes / runs


def train_plan_hrl(env, hp=None, episodes=3000, rng=None, eval_every=5, eval_runs=10, eps_eval=0.05):
    """Train per-operator policies along the shortest symbolic plan.

    :returns: (PlanAgent, TrainLog)
    """
    if hp is None:
        hp = HyperParams()
    model = ground(env.load_model())
    plan = find_plan(model)
    if plan is None:
        raise ValueError("no plan found for %s" % env.name)
    policies = [OperatorPolicy(a, env, hp) for a in plan]
    agent = PlanAgent(plan, policies)
    log = TrainLog()
    total_steps = 0

    def checkpoint(episode):
        success = evaluate_plan_agent(agent, env, eval_runs, eps_eval, env.max_steps, hp, rng)
        min_eps = min(p.eps for p in policies)
        log.append(episode, success, total_steps, "", min_eps)

    checkpoint(0)
    for episode in range(1, episodes + 1):
        s = env.reset()
        for pol in policies:
            reached, steps, s = _run_operator(
                env, pol, s, env.max_steps, hp, rng, update=True, eps=pol.eps
            )
            total_steps += steps
            if not reached:
                break
        if episode % eval_every == 0:
            checkpoint(episode)
    return agent, log


def train_landmark_hrl(env, lg, hp=None, episodes=3000, rng=None, **kw):
    """The k=1, alpha_h=0 ablation, delegated to the main training loop."""
    if hp is None:
        hp = HyperParams()
    return train_asgrl(
        env,
        lg,
        hp.replace(alpha_h=0.0),
        mode="fixed",
        k=1,
        episodes=episodes,
        rng=rng,
        **kw,
    )


def _run_flat_episode(env, agent, hp, rng, update, eps, goal_reward):
    s = env.reset()
    s = np.array(s, dtype=np.int64)
    reached, steps = kernels.flat_episode_kernel(
        env.domain_id,
        env.consts,
        env.walls,
        env.dims,
        agent.q,
        s,
        eps,
        agent.lr,
        hp.gamma,
        env.max_steps,
        rng,
        1 if update else 0,
        agent.shaping_fids,
        goal_reward,
    )
    return bool(reached), steps


def _train_flat(env, agent, hp, episodes, rng, eval_every, eval_runs, eps_eval):
    log = TrainLog()
    total_steps = 0

    def checkpoint(episode):
        wins = 0
        for _ in range(eval_runs):
            reached, _ = _run_flat_episode(
                env, agent, hp, rng, update=False, eps=eps_eval, goal_reward=FLAT_GOAL_REWARD
            )
            wins += reached
        log.append(episode, wins / eval_runs, total_steps, "", agent.eps)

    checkpoint(0)
    for episode in range(1, episodes + 1):
        _, steps = _run_flat_episode(
            env, agent, hp, rng, update=True, eps=agent.eps, goal_reward=FLAT_GOAL_REWARD
        )
        total_steps += steps
        agent.eps = max(agent.eps * FLAT_EPS_DECAY, FLAT_EPS_FLOOR)
        if episode % eval_every == 0:
            checkpoint(episode)
    return agent, log


def train_landmark_shaping(env, lg, hp=None, episodes=3000, rng=None, eval_every=5, eval_runs=10, eps_eval=0.05):
    """Flat Q-learning with the landmark-count potential shaping."""
    if hp is None:
        hp = HyperParams()
    fids = [env.fluent_ids[f] for f in lg.facts]
    agent = FlatAgent(env, hp, shaping_fids=fids)
    return _train_flat(env, agent, hp, episodes, rng, eval_every, eval_runs, eps_eval)


def train_goal_q(env, hp=None, episodes=3000, rng=None, eval_every=5, eval_runs=10, eps_eval=0.05):
    """Flat Q-learning on the sparse goal reward."""
    if hp is None:
        hp = HyperParams()
    agent = FlatAgent(env, hp)
    return _train_flat(env, agent, hp, episodes, rng, eval_every, eval_runs, eps_eval)
