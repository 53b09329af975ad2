"""Per-landmark tabular Q-learning skills with diversity-augmented reward.

A skill is one member of a landmark's pool: it trains on a sparse
reward that is zero everywhere except the transition into a state where
the landmark fluent holds, where it receives

    R_f(s) = R_L + alpha_h * R_d(s, z)        (landmark satisfied)

with R_d = max(log p(z|s), rd_clip), so a skill is paid slightly less
for terminating where its siblings usually terminate.  p(z|s) comes
from visitation counts, either directly (fixed pool size) or through a
smoothed Bayes inversion of the windowed terminal distribution (growing
pool sizes).

Discrete state keys are the env's integer encodings; the pixel variant
uses image hashes for Q rows and cluster indices for counts (see
asgrl.clustering).  Hot rollouts run through asgrl.envs.kernels.
"""

import math
from collections import deque

import numpy as np

from .envs import kernels
from .rng import rand_double, rand_range


class HyperParams:
    """Shared learning constants.

    Defaults: gamma 0.95, unit landmark reward, diversity weight 0.1
    against a -9.9 clip (the weighted diversity term then stays in
    (-1, 0], keeping every terminal reward positive), Laplace smoothing
    0.01, a 50-rollout window for terminal distributions, and replay of
    32 transitions from the 16 most recent successful trajectories.

    Domains where distinct terminal classes sit several extra steps
    apart want a stronger diversity weight: splitting k ways pays
    1 + alpha_h*log(1/k) per skill while a unique terminal d steps
    farther pays gamma**d, so escaping a crowded terminal requires the
    former to be smaller.  The experiment presets raise alpha_h (and
    tighten rd_clip to keep alpha_h * rd_clip inside (-1, 0]) per
    domain.

    :param gamma: discount factor in (0, 1)
    :param r_landmark: R_L, reward for satisfying the landmark
    :param alpha_h: weight of the diversity bonus
    :param alpha_l: Laplace smoothing of the Bayes estimator
    :param rd_clip: lower clip of log p(z|s)
    """

    def __init__(
        self,
        gamma=0.95,
        r_landmark=1.0,
        alpha_h=0.1,
        alpha_l=0.01,
        rd_clip=-9.9,
        eps_start=1.0,
        eps_floor=0.05,
        eps_decay=0.95,
        lr_start=1.0,
        lr_floor=0.1,
        lr_decay=0.95,
        replay_capacity=16,
        replay_batch=32,
        n_rollout_window=50,
    ):
        if not 0.0 < gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if not -1.0 < alpha_h * rd_clip <= 0.0:
            raise ValueError("alpha_h * rd_clip must lie in (-1, 0]")
        if eps_floor > eps_start or lr_floor > lr_start:
            raise ValueError("floors must not exceed start values")
        self.gamma = gamma
        self.r_landmark = r_landmark
        self.alpha_h = alpha_h
        self.alpha_l = alpha_l
        self.rd_clip = rd_clip
        self.eps_start = eps_start
        self.eps_floor = eps_floor
        self.eps_decay = eps_decay
        self.lr_start = lr_start
        self.lr_floor = lr_floor
        self.lr_decay = lr_decay
        self.replay_capacity = replay_capacity
        self.replay_batch = replay_batch
        self.n_rollout_window = n_rollout_window

    def replace(self, **kw):
        """Copy with some fields overridden."""
        fields = dict(self.__dict__)
        fields.update(kw)
        return HyperParams(**fields)


class Skill:
    """One diverse skill: a Q table plus its annealed exploration state.

    :param fact: the landmark fluent this skill terminates on
    :param z: diversity index within the pool
    :param n_states: dense table size, or None for a lazy dict table
        (pixel observations)
    :param n_actions: action count of the owning env
    """

    def __init__(self, fact, z, n_states, n_actions, hp):
        self.fact = fact
        self.z = z
        self.n_actions = n_actions
        if n_states is None:
            self.q_table = {}
        else:
            self.q_table = np.zeros((n_states, n_actions), dtype=np.float64)
        self.eps = hp.eps_start
        self.lr = hp.lr_start
        self.success_replay = deque(maxlen=hp.replay_capacity)
        self.successes = 0

    @property
    def id(self):
        return (self.fact, self.z)

    def q_row(self, s):
        """Q row for state key s; unseen dict entries read (and stay) 0."""
        if isinstance(self.q_table, dict):
            row = self.q_table.get(s)
            if row is None:
                row = self.q_table[s] = np.zeros(self.n_actions, dtype=np.float64)
            return row
        return self.q_table[s]


class DiversityCounts:
    """Terminal-state visitation statistics for one landmark pool.

    Tracks, per skill z: the cumulative count table over terminal state
    keys (the count-ratio estimator input), the number of rollouts
    executed (the Bayes prior), and the terminal keys of the last
    `n_window` rollouts (the windowed distribution input).
    """

    def __init__(self, k, n_window):
        self.k = k
        self.n_window = n_window
        self.table = {}  # state key -> float64[k]
        self.rollouts = [0] * k
        self.windows = [deque() for _ in range(k)]

    def add_skill(self):
        """Extend every structure for a freshly added skill."""
        self.k += 1
        self.rollouts.append(0)
        self.windows.append(deque())
        for key in self.table:
            self.table[key] = np.append(self.table[key], 0.0)

    def record_rollout(self, z):
        self.rollouts[z] += 1
        self._trim(z)

    def record_terminal(self, z, key):
        row = self.table.get(key)
        if row is None:
            row = self.table[key] = np.zeros(self.k, dtype=np.float64)
        row[z] += 1.0
        self.windows[z].append((self.rollouts[z], key))
        self._trim(z)

    def _trim(self, z):
        w = self.windows[z]
        floor = self.rollouts[z] - self.n_window
        while w and w[0][0] <= floor:
            w.popleft()

    def terminal_states(self, z):
        """Keys this skill has ever terminated in."""
        return {key for key, row in self.table.items() if row[z] > 0}

    def rebuild(self, records):
        """Replace the cumulative table from (key, z) records.

        Used after a clustering refit relabels buffered observations;
        total count mass equals the number of records.
        """
        self.table = {}
        for key, z in records:
            row = self.table.get(key)
            if row is None:
                row = self.table[key] = np.zeros(self.k, dtype=np.float64)
            row[z] += 1.0


class SkillOutcome:
    """Result of one skill execution.

    :param reached: landmark fluent satisfied
    :param terminal_state: state key where it was satisfied (or None)
    :param states: state-key sequence, length steps + 1
    :param actions: action sequence, length steps
    """

    def __init__(self, reached, terminal_state, states, actions, final_env_state):
        self.reached = reached
        self.terminal_state = terminal_state
        self.states = states
        self.actions = actions
        self.final_env_state = final_env_state

    @property
    def steps(self):
        return len(self.actions)

    @property
    def trace(self):
        """Transition triples (s, a, s_next)."""
        return [
            (self.states[i], self.actions[i], self.states[i + 1])
            for i in range(len(self.actions))
        ]


def p_z_given_s_uniform(counts, s):
    """Visitation-ratio estimate of p(z|s) (fixed pool size).

    :param counts: DiversityCounts
    :param s: terminal state key with at least one recorded visit
    :returns: float64 vector over z summing to 1
    """
    row = counts.table.get(s)
    if row is None or row.sum() <= 0:
        raise KeyError("state %r has no recorded terminal visits" % (s,))
    return row / row.sum()


def p_s_given_z(counts, z):
    """Windowed terminal-state distribution of skill z.

    Counts only terminal visits within the skill's last `n_window`
    rollouts.

    :returns: dict state key -> probability, summing to 1
    """
    counts._trim(z)
    w = counts.windows[z]
    if not w:
        raise ValueError("skill %d has no terminal visits in the window" % z)
    dist = {}
    for _, key in w:
        dist[key] = dist.get(key, 0.0) + 1.0
    total = sum(dist.values())
    return {key: v / total for key, v in dist.items()}


def p_z_given_s_bayes(counts, s, alpha_l):
    """Smoothed Bayes inversion of the windowed terminal distributions.

    p(z|s) = (p(s|z) p(z) + alpha_l) / (sum_j p(s|z_j) p(z_j) + k alpha_l),
    with priors p(z) proportional to rollouts executed per skill.
    Defined for any s; an s unseen by every skill gets the uniform
    smoothing-only value.
    """
    k = counts.k
    total_rollouts = sum(counts.rollouts)
    joint = np.zeros(k, dtype=np.float64)
    for z in range(k):
        if counts.rollouts[z] == 0:
            continue
        prior = counts.rollouts[z] / total_rollouts
        counts._trim(z)
        w = counts.windows[z]
        if not w:
            continue
        hits = sum(1.0 for _, key in w if key == s)
        joint[z] = (hits / len(w)) * prior
    return (joint + alpha_l) / (joint.sum() + k * alpha_l)


def diversity_reward(dist, z, rd_clip=-9.9):
    """Clipped log-probability bonus: max(log p(z|s), rd_clip)."""
    p = dist[z]
    if p <= 0.0:
        return rd_clip
    return max(math.log(p), rd_clip)


def skill_reward(landmark_satisfied, hp, rd):
    """Terminal skill reward: landmark bonus plus scaled diversity term.

    :param landmark_satisfied: detector value at the state
    :param rd: already-clipped diversity bonus
    :returns: R_L + alpha_h * rd when satisfied, else 0
    """
    if not landmark_satisfied:
        return 0.0
    return hp.r_landmark + hp.alpha_h * rd


def q_update(skill, s, a, r, s_next, terminal, hp):
    """Standard tabular update with the skill's current learning rate."""
    row = skill.q_row(s)
    target = r
    if not terminal:
        target = r + hp.gamma * skill.q_row(s_next).max()
    row[a] += skill.lr * (target - row[a])


def select_action(skill, s, rng):
    """Epsilon-greedy action; greedy ties resolve to the lowest index."""
    if rand_double(rng) < skill.eps:
        return int(rand_range(rng, skill.n_actions))
    return int(np.argmax(skill.q_row(s)))


def anneal(skill, hp):
    """Decay exploration and learning rates after a fresh success."""
    skill.eps = max(skill.eps * hp.eps_decay, hp.eps_floor)
    skill.lr = max(skill.lr * hp.lr_decay, hp.lr_floor)


def replay_update(skill, hp, rng, counts=None, estimator="count"):
    """Re-apply `replay_batch` uniformly sampled stored transitions.

    Intermediate transitions carry reward 0.  The terminal transition's
    reward is recomputed from the current terminal-visit statistics, not
    the value recorded at success time: the diversity bonus is a
    function of the live visitation counts, so a terminal class that has
    since been claimed by a sibling skill replays at its present
    (penalized) value instead of keeping a stale full reward alive.
    """
    if not skill.success_replay:
        return
    trajs = list(skill.success_replay)
    sizes = [len(t[1]) for t in trajs]
    total = sum(sizes)
    if total == 0:
        return
    rewards = []
    for states, actions, count_key in trajs:
        if counts is None:
            rd = 0.0
        else:
            try:
                dist = _estimate_dist(counts, count_key, hp, estimator)
                rd = diversity_reward(dist, skill.z, hp.rd_clip)
            except KeyError:
                # a K-Means refit can retire a cluster key; replay such
                # a trajectory at the plain landmark reward
                rd = 0.0
        rewards.append(skill_reward(True, hp, rd))
    for _ in range(hp.replay_batch):
        pick = int(rand_range(rng, total))
        for (states, actions, _), size, r_term in zip(trajs, sizes, rewards):
            if pick < size:
                i = pick
                last = i == size - 1
                q_update(
                    skill,
                    states[i],
                    actions[i],
                    r_term if last else 0.0,
                    states[i + 1],
                    last,
                    hp,
                )
                break
            pick -= size


def _estimate_dist(counts, key, hp, estimator):
    if estimator == "bayes":
        return p_z_given_s_bayes(counts, key, hp.alpha_l)
    return p_z_given_s_uniform(counts, key)


def obs_key(env, s):
    """Observation bytes, the Q-table key in pixel mode.

    Raw bytes keep dict lookups fast and deterministic; rendering is
    injective on reachable states, so distinct states never collide.
    """
    return env.render(s).tobytes()


def rollout_skill(
    env,
    skill,
    start,
    fact,
    max_steps,
    counts,
    hp,
    rng,
    update=True,
    estimator="count",
    kmeans=None,
    eps=None,
):
    """Execute one skill attempt from `start` until the fact's detector holds.

    Intermediate transitions carry reward 0; the landmark-achieving
    transition carries the terminal skill reward computed from
    visitation counts after recording the new visit (count first, then
    evaluate).  On a fresh success the trajectory enters the replay
    buffer and the exploration/learning rates anneal.  A replay batch
    is applied after every training rollout.  With update=False nothing
    is recorded or learned (evaluation mode).

    :param start: env state vector (not mutated)
    :param counts: the pool's DiversityCounts (None for detached use)
    :param estimator: "count" for the count-ratio posterior, "bayes"
        for the smoothed windowed posterior
    :param kmeans: OnlineKMeans mapping pixel observations to count
        keys (pixel mode only)
    :param eps: exploration override (evaluation), defaults to skill.eps
    :returns: SkillOutcome
    """
    if eps is None:
        eps = skill.eps
    if update and counts is not None:
        counts.record_rollout(skill.z)

    if env.pixel:
        outcome = _rollout_python(env, skill, start, fact, max_steps, hp, rng, update, eps)
    else:
        outcome = _rollout_kernel(env, skill, start, fact, max_steps, hp, rng, update, eps)

    if not update:
        return outcome

    if outcome.reached:
        count_key = env.diversity_key(outcome.final_env_state)
        rebuilt = False
        if kmeans is not None:
            v = env.observe(outcome.final_env_state)
            count_key, refit = kmeans.observe(v, skill.z)
            if refit:
                counts.rebuild(kmeans.records())
                rebuilt = True
        if counts is not None:
            if not rebuilt:
                counts.record_terminal(skill.z, count_key)
            else:
                # the refit rebuild already includes this visit; keep the
                # rollout window in sync by recording only there
                counts.windows[skill.z].append((counts.rollouts[skill.z], count_key))
                counts._trim(skill.z)
            dist = _estimate_dist(counts, count_key, hp, estimator)
            rd = diversity_reward(dist, skill.z, hp.rd_clip)
        else:
            rd = 0.0
        r_term = skill_reward(True, hp, rd)
        if outcome.steps > 0:
            q_update(
                skill,
                outcome.states[-2],
                outcome.actions[-1],
                r_term,
                outcome.states[-1],
                True,
                hp,
            )
            skill.success_replay.append(
                (list(outcome.states), list(outcome.actions), count_key)
            )
        skill.successes += 1
        anneal(skill, hp)
    replay_update(skill, hp, rng, counts, estimator)
    return outcome


def _rollout_kernel(env, skill, start, fact, max_steps, hp, rng, update, eps):
    """Discrete-state rollout through the compiled kernel."""
    s = np.array(start, dtype=np.int64)
    fid = env.fluent_ids[fact]
    trace_enc = np.zeros(max_steps + 1, dtype=np.int64)
    trace_act = np.zeros(max(max_steps, 1), dtype=np.int64)
    status, steps = kernels.rollout_kernel(
        env.domain_id,
        env.consts,
        env.walls,
        env.dims,
        skill.q_table,
        s,
        fid,
        eps,
        skill.lr,
        hp.gamma,
        max_steps,
        rng,
        1 if update else 0,
        trace_enc,
        trace_act,
    )
    reached = status == 2
    states = [int(e) for e in trace_enc[: steps + 1]]
    actions = [int(a) for a in trace_act[:steps]]
    return SkillOutcome(
        reached=reached,
        terminal_state=states[-1] if reached else None,
        states=states,
        actions=actions,
        final_env_state=s,
    )


def _rollout_python(env, skill, start, fact, max_steps, hp, rng, update, eps):
    """Observation-keyed rollout for pixel envs (dict Q tables)."""
    s = np.array(start, dtype=np.int64)
    key = obs_key(env, s)
    states = [key]
    actions = []
    if env.eval_fluent(s, fact):
        return SkillOutcome(True, key, states, actions, s)
    saved_eps = skill.eps
    skill.eps = eps
    try:
        for t in range(max_steps):
            a = select_action(skill, key, rng)
            s2, term = env.step(s, a)
            key2 = obs_key(env, s2)
            reached = env.eval_fluent(s2, fact)
            states.append(key2)
            actions.append(a)
            if reached:
                return SkillOutcome(True, key2, states, actions, s2)
            if update:
                q_update(skill, key, a, 0.0, key2, term, hp)
            s, key = s2, key2
            if term:
                break
    finally:
        skill.eps = saved_eps
    return SkillOutcome(False, None, states, actions, s)
