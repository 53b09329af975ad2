"""Hot-path kernels shared by all gridworld domains.

Everything here operates on plain int64/float64 numpy arrays so the same
source runs under numba and under plain numpy (see asgrl.accel).  A
domain is selected by an integer id; per-domain constants (special cell
coordinates, costs, caps) arrive in an int64 vector built by the layout
loader, and walls in a uint8 grid.

State vectors (int64, padded to 8 cells):
  household: [row, col, carried_key, charged, door_open, power, 0, 0]
             carried_key: 0 none, 1 yellow, 2 green, 3 red
             power: 0 healthy; an uncharged unlock sets 3, every later
             action ticks it down, and at 1 the robot is frozen for good
  minecraft: [row, col, carried, processed, plank, stick, ladder, ws1_used]
  mario:     [row, col, vis_key, hid_key, rock_broken, ladder_used, door_open, 0]

Actions: domain verbs first, then movement (up, right, down, left):
  household: 0 toggle, 1 pickup, movement 2-5            (6 actions)
  minecraft: 0 pickup, 1 process, 2 craft, movement 3-6  (7 actions)
  mario:     0 pickup, 1 break, 2 toggle, movement 3-6   (7 actions)

Verbs sit at the low indices on purpose.  Greedy action selection
breaks ties toward index 0, so in a state whose Q row is still all
zeros the default action is a stationary interaction rather than a
step; with a single-use resource in the state (the worn mario ladder)
a movement default would march the agent over it and spend it before
exploration can correct course.  Within the verbs, the least
destructive one goes first: the household pickup commits the gripper
to whatever key the cell offers, so the default probe is the toggle,
which is a plain no-op away from the door.
"""

import numpy as np

from ..accel import maybe_njit
from ..rng import rand_double, rand_range

DOMAIN_HOUSEHOLD = 0
DOMAIN_MINECRAFT = 1
DOMAIN_MARIO = 2

# household consts layout
HH_START_R, HH_START_C = 2, 3
HH_KEY_Y_R, HH_KEY_Y_C = 4, 5
HH_KEY_G_R, HH_KEY_G_C = 6, 7
HH_KEY_R_R, HH_KEY_R_C = 8, 9
HH_DOCK_R, HH_DOCK_C = 10, 11
HH_DOOR_R, HH_DOOR_C = 12, 13
HH_DEST_R, HH_DEST_C = 14, 15

# minecraft consts layout
MC_START_R, MC_START_C = 2, 3
MC_WS1_R, MC_WS1_C = 4, 5
MC_WS2_R, MC_WS2_C = 6, 7
MC_WS3_R, MC_WS3_C = 8, 9
MC_CARRY_CAP = 10
MC_PLANK_COST = 11
MC_STICK_COST = 12
MC_N_WOOD = 13
MC_WOOD0 = 14  # then (r, c) pairs

# mario consts layout
MA_START_R, MA_START_C = 2, 3
MA_DOOR_R, MA_DOOR_C = 4, 5
MA_LAD_TOP_R, MA_LAD_TOP_C = 6, 7
MA_LAD_BOT_R, MA_LAD_BOT_C = 8, 9
MA_TUBE_TOP_R, MA_TUBE_TOP_C = 10, 11
MA_TUBE_BOT_R, MA_TUBE_BOT_C = 12, 13
MA_KEY_R, MA_KEY_C = 14, 15
MA_LADDER_USES = 16

# fluent ids, per domain (python side maps fluent names onto these)
HH_F_HAS_KEY = 0
HH_F_CHARGED = 1
HH_F_DOOR_OPEN = 2
HH_F_AT_FINAL_ROOM = 3
HH_F_AT_DESTINATION = 4
HH_F_AT_STARTING_ROOM = 5
HH_F_HOLDING_YELLOW = 6
HH_F_HOLDING_GREEN = 7
HH_F_HOLDING_RED = 8
HH_F_DOOR_AJAR = 9

MC_F_WOOD_PROCESSED = 0
MC_F_PLANK_MADE = 1
MC_F_STICK_MADE = 2
MC_F_LADDER_MADE = 3
MC_F_AT_STARTING_LOCATION = 4

MA_F_HAS_KEY = 0
MA_F_AT_UPPER = 1
MA_F_AT_BOTTOM = 2
MA_F_AT_UPPER_WITH_KEY = 3
MA_F_DOOR_OPEN = 4


@maybe_njit
def env_terminal(domain_id, consts, s):
    """1 when the true environment goal holds (absorbing)."""
    if domain_id == DOMAIN_HOUSEHOLD:
        if s[0] == consts[HH_DEST_R] and s[1] == consts[HH_DEST_C]:
            return 1
        return 0
    if domain_id == DOMAIN_MINECRAFT:
        return 1 if s[6] == 1 else 0
    # mario
    return 1 if s[6] == 1 else 0


@maybe_njit
def env_step(domain_id, consts, walls, s, a):
    """Apply one primitive action in place; returns terminal flag.

    Goal states are absorbing: once terminal, nothing changes.
    Illegal moves and inapplicable verbs are no-ops.
    """
    if env_terminal(domain_id, consts, s):
        return 1

    rows = walls.shape[0]
    cols = walls.shape[1]

    if domain_id == DOMAIN_HOUSEHOLD:
        if s[5] == 1:
            return 0  # out of power: the robot is frozen for good
        if s[5] > 1:
            s[5] = s[5] - 1  # dying gasp after an uncharged unlock
        if a >= 2:  # movement
            m = a - 2
            nr, nc = s[0], s[1]
            if m == 0:
                nr -= 1
            elif m == 1:
                nc += 1
            elif m == 2:
                nr += 1
            else:
                nc -= 1
            if nr < 0 or nr >= rows or nc < 0 or nc >= cols:
                return 0
            if nr == consts[HH_DOOR_R] and nc == consts[HH_DOOR_C]:
                if s[4] == 0:
                    return 0  # door closed
                s[0], s[1] = nr, nc
                s[4] = 0  # the door falls shut as the robot enters the doorway
                return 0
            if walls[nr, nc] == 1:
                return 0
            s[0], s[1] = nr, nc
            if nr == consts[HH_DOCK_R] and nc == consts[HH_DOCK_C]:
                s[3] = 1
            return env_terminal(domain_id, consts, s)
        if a == 1:  # pickup
            # the gripper holds one key and has no way to put it down,
            # so the first grab is a commitment: picking up the wrong
            # key leaves the door unopenable for the rest of the episode
            if s[2] != 0:
                return 0
            if s[0] == consts[HH_KEY_Y_R] and s[1] == consts[HH_KEY_Y_C]:
                s[2] = 1
            elif s[0] == consts[HH_KEY_G_R] and s[1] == consts[HH_KEY_G_C]:
                s[2] = 2
            elif s[0] == consts[HH_KEY_R_R] and s[1] == consts[HH_KEY_R_C]:
                s[2] = 3
            return 0
        # toggle (action 0): unlock only works right next to the door, on
        # its room side, holding the red key; the heavy lock finishes off
        # an uncharged battery, leaving two last moves, while a charged
        # robot shrugs it off
        if (
            s[0] == consts[HH_DOOR_R]
            and s[1] == consts[HH_DOOR_C] - 1
            and s[2] == 3
            and s[4] == 0
        ):
            s[4] = 1
            if s[3] == 0:
                s[5] = 3
        return 0

    if domain_id == DOMAIN_MINECRAFT:
        if a >= 3:  # movement
            m = a - 3
            nr, nc = s[0], s[1]
            if m == 0:
                nr -= 1
            elif m == 1:
                nc += 1
            elif m == 2:
                nr += 1
            else:
                nc -= 1
            if nr < 0 or nr >= rows or nc < 0 or nc >= cols:
                return 0
            if walls[nr, nc] == 1:
                return 0
            s[0], s[1] = nr, nc
            return 0
        if a == 0:  # pickup wood
            if s[2] >= consts[MC_CARRY_CAP]:
                return 0
            n = consts[MC_N_WOOD]
            for i in range(n):
                wr = consts[MC_WOOD0 + 2 * i]
                wc = consts[MC_WOOD0 + 2 * i + 1]
                if s[0] == wr and s[1] == wc:
                    s[2] = s[2] + 1
                    return 0
            return 0
        if a == 1:  # process all carried wood at workshop 1 (one run per episode)
            if (
                s[0] == consts[MC_WS1_R]
                and s[1] == consts[MC_WS1_C]
                and s[7] == 0
                and s[2] > 0
            ):
                s[3] = s[3] + s[2]
                if s[3] > consts[MC_CARRY_CAP]:
                    s[3] = consts[MC_CARRY_CAP]
                s[2] = 0
                s[7] = 1
            return 0
        # craft
        if s[0] == consts[MC_WS2_R] and s[1] == consts[MC_WS2_C]:
            if s[4] == 1 and s[5] == 1 and s[6] == 0:
                s[6] = 1
                return 1
            if s[4] == 0 and s[3] >= consts[MC_PLANK_COST]:
                s[4] = 1
                s[3] = s[3] - consts[MC_PLANK_COST]
            return 0
        if s[0] == consts[MC_WS3_R] and s[1] == consts[MC_WS3_C]:
            if s[5] == 0 and s[3] >= consts[MC_STICK_COST]:
                s[5] = 1
                s[3] = s[3] - consts[MC_STICK_COST]
            return 0
        return 0

    # mario
    if a >= 3:  # movement
        m = a - 3
        r, c = s[0], s[1]
        # worn-out ladder: one full crossing in either direction, ever
        if (
            m == 2
            and r == consts[MA_LAD_TOP_R]
            and c == consts[MA_LAD_TOP_C]
        ):
            if s[5] < consts[MA_LADDER_USES]:
                s[0] = consts[MA_LAD_BOT_R]
                s[1] = consts[MA_LAD_BOT_C]
                s[5] = s[5] + 1
            return 0
        if (
            m == 0
            and r == consts[MA_LAD_BOT_R]
            and c == consts[MA_LAD_BOT_C]
        ):
            if s[5] < consts[MA_LADDER_USES]:
                s[0] = consts[MA_LAD_TOP_R]
                s[1] = consts[MA_LAD_TOP_C]
                s[5] = s[5] + 1
            return 0
        # tube: down only
        if (
            m == 2
            and r == consts[MA_TUBE_TOP_R]
            and c == consts[MA_TUBE_TOP_C]
        ):
            s[0] = consts[MA_TUBE_BOT_R]
            s[1] = consts[MA_TUBE_BOT_C]
            return 0
        nr, nc = r, c
        if m == 0:
            nr -= 1
        elif m == 1:
            nc += 1
        elif m == 2:
            nr += 1
        else:
            nc -= 1
        if nr < 0 or nr >= rows or nc < 0 or nc >= cols:
            return 0
        if walls[nr, nc] == 1:
            return 0
        if nr == consts[MA_DOOR_R] and nc == consts[MA_DOOR_C]:
            return 0  # the locked door blocks its cell
        s[0], s[1] = nr, nc
        return 0
    if a == 0:  # pickup: everything grabbable on the key cell, in one go
        if s[0] == consts[MA_KEY_R] and s[1] == consts[MA_KEY_C]:
            if s[2] == 0:
                s[2] = 1
            if s[4] == 1 and s[3] == 0:
                s[3] = 1
        return 0
    if a == 1:  # break the red rock, standing on or next to the key cell
        dr = s[0] - consts[MA_KEY_R]
        dc = s[1] - consts[MA_KEY_C]
        if dr < 0:
            dr = -dr
        if dc < 0:
            dc = -dc
        if dr + dc <= 1 and s[4] == 0:
            s[4] = 1
        return 0
    # toggle: unlock needs both keys, standing next to the door
    dr = s[0] - consts[MA_DOOR_R]
    dc = s[1] - consts[MA_DOOR_C]
    if dr < 0:
        dr = -dr
    if dc < 0:
        dc = -dc
    if dr + dc == 1 and s[2] + s[3] == 2 and s[6] == 0:
        s[6] = 1
        return 1
    return 0


@maybe_njit
def eval_fluent_kernel(domain_id, consts, s, fid):
    """Programmatic fluent detectors; 1 when the fluent holds in s."""
    if domain_id == DOMAIN_HOUSEHOLD:
        if fid == HH_F_HAS_KEY:
            return 1 if s[2] != 0 else 0
        if fid == HH_F_CHARGED:
            return 1 if s[3] == 1 else 0
        if fid == HH_F_DOOR_OPEN:
            return 1 if s[4] == 1 else 0
        if fid == HH_F_AT_FINAL_ROOM:
            return 1 if s[1] > consts[HH_DOOR_C] else 0
        if fid == HH_F_AT_DESTINATION:
            if s[0] == consts[HH_DEST_R] and s[1] == consts[HH_DEST_C]:
                return 1
            return 0
        if fid == HH_F_AT_STARTING_ROOM:
            return 1 if s[1] < consts[HH_DOOR_C] else 0
        if fid == HH_F_HOLDING_YELLOW:
            return 1 if s[2] == 1 else 0
        if fid == HH_F_HOLDING_GREEN:
            return 1 if s[2] == 2 else 0
        if fid == HH_F_HOLDING_RED:
            return 1 if s[2] == 3 else 0
        if fid == HH_F_DOOR_AJAR:
            # the robot's body props the door ajar exactly while it
            # squeezes through the doorway; once it is past, the door
            # shuts, so a model effect pairing this with at-final-room
            # is a promise the world cannot keep
            if s[0] == consts[HH_DOOR_R] and s[1] == consts[HH_DOOR_C]:
                return 1
            return 0
        return 0
    if domain_id == DOMAIN_MINECRAFT:
        if fid == MC_F_WOOD_PROCESSED:
            return 1 if s[3] >= 1 else 0
        if fid == MC_F_PLANK_MADE:
            return 1 if s[4] == 1 else 0
        if fid == MC_F_STICK_MADE:
            return 1 if s[5] == 1 else 0
        if fid == MC_F_LADDER_MADE:
            return 1 if s[6] == 1 else 0
        if fid == MC_F_AT_STARTING_LOCATION:
            if s[0] == consts[MC_START_R] and s[1] == consts[MC_START_C]:
                return 1
            return 0
        return 0
    # mario
    if fid == MA_F_HAS_KEY:
        return 1 if s[2] + s[3] >= 1 else 0
    if fid == MA_F_AT_UPPER:
        return 1 if s[0] < consts[MA_LAD_TOP_R] + 1 else 0
    if fid == MA_F_AT_BOTTOM:
        return 1 if s[0] >= consts[MA_LAD_BOT_R] else 0
    if fid == MA_F_AT_UPPER_WITH_KEY:
        if s[0] < consts[MA_LAD_TOP_R] + 1 and s[2] + s[3] >= 1:
            return 1
        return 0
    if fid == MA_F_DOOR_OPEN:
        return 1 if s[6] == 1 else 0
    return 0


@maybe_njit
def encode_kernel(dims, s):
    """Mixed-radix encoding; injective on the state box."""
    e = s[0]
    for i in range(1, dims.shape[0]):
        e = e * dims[i] + s[i]
    return e


@maybe_njit
def greedy_action(qrow, n_actions):
    best = 0
    bv = qrow[0]
    for i in range(1, n_actions):
        if qrow[i] > bv:
            best = i
            bv = qrow[i]
    return best


@maybe_njit
def egreedy_action(qrow, n_actions, eps, rng):
    if rand_double(rng) < eps:
        return rand_range(rng, n_actions)
    return greedy_action(qrow, n_actions)


@maybe_njit
def max_q(qrow, n_actions):
    bv = qrow[0]
    for i in range(1, n_actions):
        if qrow[i] > bv:
            bv = qrow[i]
    return bv


@maybe_njit
def rollout_kernel(
    domain_id,
    consts,
    walls,
    dims,
    q,
    s,
    fid,
    eps,
    lr,
    gamma,
    max_steps,
    rng,
    do_update,
    trace_enc,
    trace_act,
):
    """Run one skill attempt until the landmark fluent holds or budget ends.

    Returns (status, steps): status 2 = landmark reached, 1 = stopped in
    an absorbing environment goal state that does not satisfy the
    landmark, 0 = step budget exhausted.

    Intermediate transitions get the sparse-reward update (r = 0)
    in place.  The final transition of a successful attempt is NOT
    updated here — its reward depends on the diversity bonus, which the
    caller computes from visitation counts; the caller also records the
    trace (trace_enc[0..steps], trace_act[0..steps-1]).
    """
    n_actions = q.shape[1]
    if eval_fluent_kernel(domain_id, consts, s, fid) == 1:
        trace_enc[0] = encode_kernel(dims, s)
        return 2, 0
    t = 0
    while t < max_steps:
        e = encode_kernel(dims, s)
        trace_enc[t] = e
        a = egreedy_action(q[e], n_actions, eps, rng)
        trace_act[t] = a
        term = env_step(domain_id, consts, walls, s, a)
        e2 = encode_kernel(dims, s)
        reached = eval_fluent_kernel(domain_id, consts, s, fid)
        t += 1
        if reached == 1:
            trace_enc[t] = e2
            return 2, t
        if do_update == 1:
            target = gamma * max_q(q[e2], n_actions)
            if term == 1:
                target = 0.0
            q[e, a] = q[e, a] + lr * (target - q[e, a])
        if term == 1:
            trace_enc[t] = e2
            return 1, t
    trace_enc[t] = encode_kernel(dims, s)
    return 0, t


@maybe_njit
def conj_eval_kernel(domain_id, consts, s, add_fids, del_fids):
    """1 when every add fluent holds and every delete fluent is false."""
    for i in range(add_fids.shape[0]):
        if eval_fluent_kernel(domain_id, consts, s, add_fids[i]) == 0:
            return 0
    for i in range(del_fids.shape[0]):
        if eval_fluent_kernel(domain_id, consts, s, del_fids[i]) == 1:
            return 0
    return 1


@maybe_njit
def conj_rollout_kernel(
    domain_id,
    consts,
    walls,
    dims,
    q,
    s,
    add_fids,
    del_fids,
    eps,
    lr,
    gamma,
    max_steps,
    rng,
    do_update,
    trace_enc,
    trace_act,
):
    """rollout_kernel variant terminating on an effect conjunction.

    Used by operator policies whose stop condition is "all add effects
    true and all delete effects false" rather than a single fluent.
    Same return convention and update placement as rollout_kernel.
    """
    n_actions = q.shape[1]
    if conj_eval_kernel(domain_id, consts, s, add_fids, del_fids) == 1:
        trace_enc[0] = encode_kernel(dims, s)
        return 2, 0
    t = 0
    while t < max_steps:
        e = encode_kernel(dims, s)
        trace_enc[t] = e
        a = egreedy_action(q[e], n_actions, eps, rng)
        trace_act[t] = a
        term = env_step(domain_id, consts, walls, s, a)
        e2 = encode_kernel(dims, s)
        reached = conj_eval_kernel(domain_id, consts, s, add_fids, del_fids)
        t += 1
        if reached == 1:
            trace_enc[t] = e2
            return 2, t
        if do_update == 1:
            target = gamma * max_q(q[e2], n_actions)
            if term == 1:
                target = 0.0
            q[e, a] = q[e, a] + lr * (target - q[e, a])
        if term == 1:
            trace_enc[t] = e2
            return 1, t
    trace_enc[t] = encode_kernel(dims, s)
    return 0, t


@maybe_njit
def flat_episode_kernel(
    domain_id,
    consts,
    walls,
    dims,
    q,
    s,
    eps,
    lr,
    gamma,
    max_steps,
    rng,
    do_update,
    shaping_fids,
    goal_reward,
):
    """One full episode for the flat baselines.

    Reward is `goal_reward` on reaching the environment goal, else 0.
    When shaping_fids is nonempty the potential-based term
    gamma * phi(s') - phi(s) is added, phi counting currently-true
    landmark fluents.  Returns (reached_goal, steps).
    """
    n_actions = q.shape[1]
    n_shape = shaping_fids.shape[0]
    t = 0
    while t < max_steps:
        e = encode_kernel(dims, s)
        a = egreedy_action(q[e], n_actions, eps, rng)
        phi0 = 0.0
        if n_shape > 0:
            for i in range(n_shape):
                phi0 += eval_fluent_kernel(domain_id, consts, s, shaping_fids[i])
        term = env_step(domain_id, consts, walls, s, a)
        t += 1
        e2 = encode_kernel(dims, s)
        r = 0.0
        if term == 1:
            r = goal_reward
        if n_shape > 0:
            phi1 = 0.0
            for i in range(n_shape):
                phi1 += eval_fluent_kernel(domain_id, consts, s, shaping_fids[i])
            r += gamma * phi1 - phi0
        if do_update == 1:
            target = r
            if term == 0:
                target = r + gamma * max_q(q[e2], n_actions)
            q[e, a] = q[e, a] + lr * (target - q[e, a])
        if term == 1:
            return 1, t
    return 0, t
