"""History-state meta-controller over per-landmark skill pools.

Training (one episode): sample a linearization of the landmark graph,
then walk it, picking one skill from each landmark's pool epsilon₂-
greedily and executing it from wherever the previous skill stopped.  A
failed skill zeroes the meta value of the choice that led to it and
ends the episode; a successful one receives the assignment update

    Q(s_meta, o) <- R_meta + max_{o'} Q(s_meta + [o], o')

with no discount and learning rate 1.  R_meta is +1 per subgoal plus a
bonus when the true environment goal holds.  The meta state is the
history of executed skills (default) or the reached discrete state
(mdp mode).  Greedy evaluation ignores linearizations entirely: the
meta controller itself chains skills until the goal, a failure, or the
step budget.
"""

import json
from collections import deque

import numpy as np

from .clustering import OnlineKMeans
from .landmarks import sample_linearization
from .rng import rand_double, rand_range
from .skills import DiversityCounts, HyperParams, Skill, rollout_skill

R_GOAL = 10.0
CURRICULUM_EPS_GATE = 0.3


class SkillPool:
    """The k diverse skills of one landmark fact, plus their statistics.

    :param estimator: "count" (fixed k, count-ratio posterior) or
        "bayes" (curriculum, smoothed windowed posterior)
    """

    def __init__(self, fact, k, env, hp, estimator="count", k_max=None):
        self.fact = fact
        self.estimator = estimator
        self.k_max = k_max if k_max is not None else k
        n_states = None if env.pixel else env.n_states
        self._n_states = n_states
        self._n_actions = env.n_actions
        self._hp = hp
        self.skills = [Skill(fact, z, n_states, env.n_actions, hp) for z in range(k)]
        self.counts = DiversityCounts(k, hp.n_rollout_window)
        self.kmeans = OnlineKMeans(k) if env.pixel else None

    @property
    def k(self):
        return len(self.skills)

    def add_skill(self):
        z = len(self.skills)
        self.skills.append(Skill(self.fact, z, self._n_states, self._n_actions, self._hp))
        self.counts.add_skill()

    def min_eps(self):
        return min(s.eps for s in self.skills)


class MetaController:
    """Tabular meta Q with epsilon₂ exploration (assignment updates)."""

    def __init__(self, hp):
        self.q = {}
        self.eps2 = 1.0
        self.eps2_floor = 0.05
        self.eps2_decay = 0.9

    def value(self, s_meta, oid):
        return self.q.get((s_meta, oid), 0.0)

    def anneal(self):
        self.eps2 = max(self.eps2 * self.eps2_decay, self.eps2_floor)


class TrainedAgent:
    """Everything needed to act greedily: meta Q, pools, landmark graph."""

    def __init__(self, env_name, lg, pools, meta, hp, meta_mode):
        self.env_name = env_name
        self.lg = lg
        self.pools = pools
        self.meta = meta
        self.hp = hp
        self.meta_mode = meta_mode
        self.fact_order = tuple(sorted(pools))
        self.preds = {f: set() for f in self.fact_order}
        for fi, fj in lg.orderings:
            self.preds[fj].add(fi)

    def options(self, done_facts):
        """Canonical (fact, z) option list over runnable landmarks.

        A landmark is runnable once every predecessor in the landmark
        graph has been executed, mirroring the linearizations training
        follows.  Options for later landmarks never carry learned value
        at the current meta state, so offering them would only let a
        stretch of zeroed entries fall through to a nonsensical pick.
        """
        out = []
        for fact in self.fact_order:
            if fact in done_facts:
                continue
            if not self.preds[fact] <= done_facts:
                continue
            for z in range(self.pools[fact].k):
                out.append((fact, z))
        return out


class TrainLog:
    """Evaluation-checkpoint records of one training run."""

    COLUMNS = ("episode", "eval_success", "steps", "k_per_landmark", "min_skill_eps")

    def __init__(self):
        self.rows = []

    def append(self, episode, eval_success, steps, k_per_landmark, min_skill_eps):
        if self.rows and episode <= self.rows[-1][0]:
            raise ValueError("episode indices must increase")
        self.rows.append((episode, eval_success, steps, k_per_landmark, min_skill_eps))


def select_skill(meta, s_meta, pool, rng):
    """Epsilon₂-greedy skill index from one pool; ties to the lowest z."""
    if rand_double(rng) < meta.eps2:
        return int(rand_range(rng, pool.k))
    best_z, best_v = 0, None
    for z in range(pool.k):
        v = meta.value(s_meta, (pool.fact, z))
        if best_v is None or v > best_v:
            best_z, best_v = z, v
    return best_z


def curriculum_advance(pool):
    """Grow the pool by one skill when the gate conditions hold.

    The pool must be below its cap, its most exploratory skill must
    already exploit (min epsilon below 0.3), and the newest skill must
    have discovered at least one terminal state (otherwise adding more
    diversity cannot help).
    """
    if pool.k >= pool.k_max:
        return
    if pool.min_eps() >= CURRICULUM_EPS_GATE:
        return
    newest = pool.k - 1
    if not pool.counts.terminal_states(newest):
        return
    pool.add_skill()


def _initial_meta_state(meta_mode, env, s):
    if meta_mode == "history":
        return ()
    return env.encode(s)


def _next_meta_state(meta_mode, history, env, s):
    if meta_mode == "history":
        return history
    return env.encode(s)


def train(
    env,
    lg,
    hp=None,
    mode="fixed",
    k=4,
    k_max=None,
    episodes=3000,
    rng=None,
    meta_mode="history",
    eval_every=5,
    eval_runs=10,
    eps_eval=0.05,
    r_goal=R_GOAL,
):
    """Run the full meta-controller training loop.

    :param env: a GridEnv paired with the detectors of its model
    :param lg: LandmarkGraph extracted (and verified) from that model
    :param mode: "fixed" trains k skills per landmark with the count
        estimator; "curriculum" starts at one skill and grows toward
        k_max with the Bayes estimator
    :param rng: uint64 rng stream state (see asgrl.rng.make_stream)
    :returns: (TrainedAgent, TrainLog)
    """
    if hp is None:
        hp = HyperParams()
    if rng is None:
        raise ValueError("an explicit rng stream is required for reproducibility")
    if mode not in ("fixed", "curriculum"):
        raise ValueError("mode must be 'fixed' or 'curriculum'")
    if env.pixel and mode == "curriculum":
        raise ValueError("curriculum mode is not supported on pixel observations")
    estimator = "bayes" if mode == "curriculum" else "count"
    start_k = 1 if mode == "curriculum" else k
    cap = k_max if k_max is not None else k
    pools = {
        fact: SkillPool(fact, start_k, env, hp, estimator=estimator, k_max=cap)
        for fact in lg.facts
    }
    meta = MetaController(hp)
    agent = TrainedAgent(env.name, lg, pools, meta, hp, meta_mode)
    log = TrainLog()
    total_steps = 0

    def checkpoint(episode):
        success = evaluate(agent, env, eval_runs, eps_eval, env.max_steps, rng)
        ks = "|".join("%s=%d" % (f, pools[f].k) for f in agent.fact_order)
        min_eps = min(pools[f].min_eps() for f in agent.fact_order)
        log.append(episode, success, total_steps, ks, min_eps)

    checkpoint(0)
    for episode in range(1, episodes + 1):
        tau = sample_linearization(lg, rng)
        s = env.reset()
        history = ()
        s_meta = _initial_meta_state(meta_mode, env, s)
        goal_reached = False
        for fact in tau:
            pool = pools[fact]
            z = select_skill(meta, s_meta, pool, rng)
            skill = pool.skills[z]
            outcome = rollout_skill(
                env,
                skill,
                s,
                fact,
                env.max_steps,
                pool.counts,
                hp,
                rng,
                update=True,
                estimator=pool.estimator,
                kmeans=pool.kmeans,
            )
            total_steps += outcome.steps
            oid = (fact, z)
            if not outcome.reached:
                meta.q[(s_meta, oid)] = 0.0
                break
            s = outcome.final_env_state
            history = history + (oid,)
            next_meta = _next_meta_state(meta_mode, history, env, s)
            goal_now = env.is_terminal(s)
            r_meta = 1.0 + (r_goal if goal_now else 0.0)
            done = {f for f, _ in history}
            best_next = 0.0
            for oid2 in agent.options(done):
                v = meta.value(next_meta, oid2)
                if v > best_next:
                    best_next = v
            meta.q[(s_meta, oid)] = r_meta + best_next
            s_meta = next_meta
            if goal_now:
                goal_reached = True
                break
        if goal_reached:
            meta.anneal()
        if mode == "curriculum":
            for fact in agent.fact_order:
                curriculum_advance(pools[fact])
        if episode % eval_every == 0:
            checkpoint(episode)
    return agent, log


def evaluate(agent, env, runs, eps_eval, max_steps, rng):
    """Success rate of the learned hierarchy.

    The meta controller picks its best option greedily over its Q
    values (runnable landmarks only); each skill runs at the low
    exploration rate eps_eval.  Success means the true environment goal
    within the shared step budget.  Nothing is updated or recorded.
    """
    if runs <= 0:
        raise ValueError("runs must be positive")
    hp = agent.hp
    successes = 0
    for _ in range(runs):
        s = env.reset()
        history = ()
        done = set()
        s_meta = _initial_meta_state(agent.meta_mode, env, s)
        budget = max_steps
        if env.is_terminal(s):
            successes += 1
            continue
        while True:
            options = agent.options(done)
            if not options or budget <= 0:
                break
            oid = options[0]
            best = agent.meta.value(s_meta, oid)
            for cand in options[1:]:
                v = agent.meta.value(s_meta, cand)
                if v > best:
                    oid, best = cand, v
            fact, z = oid
            skill = agent.pools[fact].skills[z]
            outcome = rollout_skill(
                env, skill, s, fact, budget, None, hp, rng, update=False, eps=eps_eval
            )
            budget -= outcome.steps
            if not outcome.reached:
                break
            s = outcome.final_env_state
            done.add(fact)
            history = history + (oid,)
            s_meta = _next_meta_state(agent.meta_mode, history, env, s)
            if env.is_terminal(s):
                successes += 1
                break
    return successes / runs
