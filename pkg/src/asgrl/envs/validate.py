"""Exhaustive layout validation.

Each domain's difficulty rests on specific traps (one-way doors, a
single-use ladder, one processing run).  A wrong layout constant can
silently remove a trap or make the goal unreachable, so this module
enumerates the full reachable state space by breadth-first search over
the real step function and re-derives every property the experiments
rely on.  Checks are named so a failing one points at the broken
invariant, and the model-vs-trajectory conditions (goal fluent matches
the true goal; the scripted reference run instantiates a model plan)
are re-verified against the paired symbolic model.
"""

from collections import deque

import numpy as np

from . import kernels
from ..landmarks import enumerate_plans
from ..model import find_plan, ground, is_instantiation, validate_plan


class Check:
    """One named validation result.

    :param name: short identifier of the invariant
    :param ok: whether it held
    :param detail: human-oriented context (counts, offending state)
    """

    def __init__(self, name, ok, detail=""):
        self.name = name
        self.ok = ok
        self.detail = detail

    def __repr__(self):
        return "Check(%r, %s%s)" % (
            self.name,
            "ok" if self.ok else "FAIL",
            ", %r" % self.detail if self.detail else "",
        )


class LayoutInvalid(AssertionError):
    """Raised by assert_valid when any check fails."""


def explore(env):
    """Enumerate reachable states and transitions from the start.

    :param env: a GridEnv
    :returns: (states, edges) where states is a list of state tuples in
        BFS order and edges maps each state tuple to its list of
        (action, successor tuple) pairs
    """
    start = tuple(int(v) for v in env.reset())
    seen = {start}
    order = [start]
    edges = {}
    queue = deque([start])
    scratch = np.zeros(len(start), dtype=np.int64)
    while queue:
        s = queue.popleft()
        outs = []
        for a in range(env.n_actions):
            scratch[:] = s
            kernels.env_step(env.domain_id, env.consts, env.walls, scratch, a)
            s2 = tuple(int(v) for v in scratch)
            outs.append((a, s2))
            if s2 not in seen:
                seen.add(s2)
                order.append(s2)
                queue.append(s2)
        edges[s] = outs
    return order, edges


def _goal_reaching_set(env, states, edges):
    """States from which the environment goal is still reachable."""
    back = {s: [] for s in states}
    for s, outs in edges.items():
        for _, s2 in outs:
            if s2 != s:
                back[s2].append(s)
    alive = set()
    queue = deque()
    svec = np.zeros(len(states[0]), dtype=np.int64)
    for s in states:
        svec[:] = s
        if kernels.env_terminal(env.domain_id, env.consts, svec):
            alive.add(s)
            queue.append(s)
    while queue:
        s = queue.popleft()
        for p in back[s]:
            if p not in alive:
                alive.add(p)
                queue.append(p)
    return alive


def _common_checks(env, states, edges, alive, checks):
    svec = np.zeros(len(states[0]), dtype=np.int64)

    encs = {env.encode(s) for s in states}
    checks.append(
        Check(
            "encode_injective",
            len(encs) == len(states),
            "%d states, %d codes" % (len(states), len(encs)),
        )
    )

    mismatch = None
    for s in states:
        svec[:] = s
        term = bool(kernels.env_terminal(env.domain_id, env.consts, svec))
        if term != env.eval_fluent(svec, env.goal_fluent):
            mismatch = s
            break
    checks.append(
        Check(
            "goal_fluent_matches_terminal",
            mismatch is None,
            "state %r" % (mismatch,) if mismatch else "",
        )
    )

    checks.append(
        Check(
            "goal_reachable_from_start",
            states[0] in alive,
            "%d of %d states can still reach the goal" % (len(alive), len(states)),
        )
    )

    model = ground(env.load_model())
    missing = [f for f in model.fluents if f not in env.fluent_ids]
    checks.append(
        Check(
            "detector_for_every_model_fluent",
            not missing,
            ", ".join(missing),
        )
    )

    traj, term = env.run_actions(env.reference_actions())
    checks.append(
        Check(
            "reference_trace_reaches_goal",
            term,
            "%d steps" % (len(traj) - 1),
        )
    )
    if term and not missing:
        rows = [env.fluent_state(s) for s in traj]
        shortest = find_plan(model)
        instantiated = False
        if shortest is not None:
            for extra in range(3):
                for plan in enumerate_plans(model, len(shortest) + extra):
                    _, seq = validate_plan(model, plan)
                    if is_instantiation(rows, seq):
                        instantiated = True
                        break
                if instantiated:
                    break
        checks.append(
            Check(
                "reference_trace_instantiates_plan",
                instantiated,
                "shortest plan length %s" % (len(shortest) if shortest else "n/a"),
            )
        )
    else:
        checks.append(
            Check("reference_trace_instantiates_plan", False, "no goal trace")
        )


def _walk_distances(env, origin):
    """Movement-only BFS distances over open cells from origin.

    Doors count as walls here: this measures plain walking legs, which
    is all the key/dock geometry checks need.
    """
    rows, cols = env.walls.shape
    dist = {origin: 0}
    queue = deque([origin])
    while queue:
        r, q = queue.popleft()
        for dr, dq in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nq = r + dr, q + dq
            if not (0 <= nr < rows and 0 <= nq < cols):
                continue
            if env.walls[nr, nq] == 1 or (nr, nq) in dist:
                continue
            dist[(nr, nq)] = dist[(r, q)] + 1
            queue.append((nr, nq))
    return dist


def _household_checks(env, states, edges, alive, checks):
    c = env.consts
    door_c = int(c[kernels.HH_DOOR_C])

    bad = [s for s in states if s[1] >= door_c and s[4] == 1]
    checks.append(
        Check(
            "door_shuts_behind_robot",
            not bad,
            "%d open-door states at or past the doorway" % len(bad),
        )
    )

    bad = None
    for s, outs in edges.items():
        for _, s2 in outs:
            if s[4] == 0 and s2[4] == 1 and s[2] != 3:
                bad = (s, s2)
                break
        if bad:
            break
    checks.append(
        Check(
            "only_red_key_unlocks",
            bad is None,
            "transition %r" % (bad,) if bad else "",
        )
    )

    bad = None
    for s, outs in edges.items():
        if s[2] == 0:
            continue
        for _, s2 in outs:
            if s2[2] != s[2]:
                bad = (s, s2)
                break
        if bad:
            break
    checks.append(
        Check(
            "first_pickup_is_permanent",
            bad is None,
            "transition %r" % (bad,) if bad else "",
        )
    )

    # the myopic trap: a policy that just reaches the nearest key
    # commits to one that cannot open the door
    dist = _walk_distances(
        env, (int(c[kernels.HH_START_R]), int(c[kernels.HH_START_C]))
    )
    d_y = dist.get((int(c[kernels.HH_KEY_Y_R]), int(c[kernels.HH_KEY_Y_C])))
    d_g = dist.get((int(c[kernels.HH_KEY_G_R]), int(c[kernels.HH_KEY_G_C])))
    d_r = dist.get((int(c[kernels.HH_KEY_R_R]), int(c[kernels.HH_KEY_R_C])))
    checks.append(
        Check(
            "nearest_key_is_wrong",
            d_y is not None and d_r is not None and d_g is not None
            and d_y < d_r and d_y < d_g,
            "yellow=%s green=%s red=%s" % (d_y, d_g, d_r),
        )
    )

    # the drained unlock must be the shortest one, or a single
    # undiversified skill could stumble into charging on its way
    approach = (int(c[kernels.HH_DOOR_R]), door_c - 1)
    red = (int(c[kernels.HH_KEY_R_R]), int(c[kernels.HH_KEY_R_C]))
    dock = (int(c[kernels.HH_DOCK_R]), int(c[kernels.HH_DOCK_C]))
    from_red = _walk_distances(env, red)
    from_dock = _walk_distances(env, dock)
    direct_d = from_red.get(approach)
    via_dock = from_red.get(dock), from_dock.get(approach)
    checks.append(
        Check(
            "dock_detour_strictly_longer",
            direct_d is not None
            and None not in via_dock
            and via_dock[0] + via_dock[1] >= direct_d + 1,
            "direct=%s via_dock=%s" % (direct_d, via_dock),
        )
    )

    doomed = [s for s in states if s[1] > door_c and s[3] == 0 and s in alive]
    checks.append(
        Check(
            "uncharged_entry_is_doomed",
            not doomed,
            "%d alive states" % len(doomed),
        )
    )

    # a drained unlock must really be final: if the dock were within
    # the dying gasp's range, "charged after a drained unlock" would be
    # a learnable (and flaky) behaviour instead of a dead end
    bad = [s for s in states if s[3] == 1 and s[5] > 0]
    checks.append(
        Check(
            "drained_unlock_cannot_recharge",
            not bad,
            "%d charged-while-drained states" % len(bad),
        )
    )

    bad = None
    for s, outs in edges.items():
        if s[5] != 1:
            continue
        for _, s2 in outs:
            if s2 != s:
                bad = (s, s2)
                break
        if bad:
            break
    checks.append(
        Check(
            "frozen_is_absorbing",
            bad is None,
            "transition %r" % (bad,) if bad else "",
        )
    )

    # the scripted no-dock run: straight to the red key, then the door;
    # the dying gasp gets the robot into the final room, where it must
    # freeze one step short of the destination with no way back
    from .household import PICKUP, RIGHT, TOGGLE

    direct = [
        RIGHT, RIGHT, RIGHT, PICKUP,
        RIGHT, RIGHT, RIGHT, RIGHT, TOGGLE,
        RIGHT, RIGHT,
    ]
    traj, term = env.run_actions(direct)
    end = tuple(int(v) for v in traj[-1])
    svec = np.array(end, dtype=np.int64)
    checks.append(
        Check(
            "direct_route_enters_but_is_doomed",
            (not term)
            and end[1] > door_c
            and end[5] == 1
            and bool(env.eval_fluent(svec, "at-final-room"))
            and end not in alive,
            "end state %r" % (end,),
        )
    )


def _minecraft_checks(env, states, edges, alive, checks):
    bad = None
    for s, outs in edges.items():
        for a, s2 in outs:
            if s2[3] > s[3] and s[7] == 1:
                bad = (s, a, s2)
                break
        if bad:
            break
    checks.append(
        Check(
            "processing_is_one_shot",
            bad is None,
            "transition %r" % (bad,) if bad else "",
        )
    )

    doomed = [
        s
        for s in states
        if s[7] == 1 and s[6] == 0 and (s[3] + 2 * s[4] + s[5]) < 3 and s in alive
    ]
    checks.append(
        Check(
            "processing_fewer_than_three_is_fatal",
            not doomed,
            "%d alive states" % len(doomed),
        )
    )

    # greedy trap replay: grab the nearest wood, process it immediately
    from .minecraft import DOWN, PICKUP, PROCESS, RIGHT, UP

    trap = [
        UP, UP, UP, PICKUP,
        DOWN, DOWN, DOWN, RIGHT, RIGHT, RIGHT, RIGHT, RIGHT, PROCESS,
    ]
    traj, term = env.run_actions(trap)
    end = tuple(int(v) for v in traj[-1])
    checks.append(
        Check(
            "greedy_first_processing_is_dead_end",
            end[3] == 1 and end[7] == 1 and end not in alive,
            "end state %r" % (end,),
        )
    )


def _mario_checks(env, states, edges, alive, checks):
    from .mario import DOWN, UP

    c = env.consts
    max_uses = int(c[kernels.MA_LADDER_USES])

    checks.append(
        Check("ladder_survives_one_crossing", max_uses == 1, "uses=%d" % max_uses)
    )

    lad_top = (int(c[kernels.MA_LAD_TOP_R]), int(c[kernels.MA_LAD_TOP_C]))
    lad_bot = (int(c[kernels.MA_LAD_BOT_R]), int(c[kernels.MA_LAD_BOT_C]))
    bad = None
    for s, outs in edges.items():
        if s[5] < max_uses:
            continue
        pos = (s[0], s[1])
        if pos != lad_top and pos != lad_bot:
            continue
        for a, s2 in outs:
            took_ladder = (pos == lad_top and a == DOWN and (s2[0], s2[1]) == lad_bot) or (
                pos == lad_bot and a == UP and (s2[0], s2[1]) == lad_top
            )
            if took_ladder:
                bad = (s, a, s2)
                break
        if bad:
            break
    checks.append(
        Check(
            "worn_ladder_never_crosses",
            bad is None,
            "transition %r" % (bad,) if bad else "",
        )
    )

    tube_bot = (int(c[kernels.MA_TUBE_BOT_R]), int(c[kernels.MA_TUBE_BOT_C]))
    bad = None
    for s, outs in edges.items():
        if (s[0], s[1]) != tube_bot:
            continue
        for a, s2 in outs:
            if a == UP and s2[0] < s[0]:
                bad = (s, s2)
                break
        if bad:
            break
    checks.append(
        Check(
            "tube_is_one_way",
            bad is None,
            "transition %r" % (bad,) if bad else "",
        )
    )

    bad = None
    for s, outs in edges.items():
        for _, s2 in outs:
            if s[6] == 0 and s2[6] == 1 and (s[2] + s[3]) < 2:
                bad = (s, s2)
                break
        if bad:
            break
    checks.append(
        Check(
            "door_needs_both_keys",
            bad is None,
            "transition %r" % (bad,) if bad else "",
        )
    )

    bad = [s for s in states if s[3] == 1 and s[4] == 0]
    checks.append(
        Check(
            "hidden_key_requires_broken_rock",
            not bad,
            "%d states" % len(bad),
        )
    )

    lad_bot_r = int(c[kernels.MA_LAD_BOT_R])
    doomed = [
        s
        for s in states
        if s[0] >= lad_bot_r and s[5] >= max_uses and s[6] == 0 and s in alive
    ]
    checks.append(
        Check(
            "bottom_after_worn_ladder_is_dead",
            not doomed,
            "%d alive states" % len(doomed),
        )
    )


def validate_layout(env):
    """Run every named invariant check for env's domain.

    :returns: list of Check results (all domains share the common
        block; domain-specific trap checks follow)
    """
    states, edges = explore(env)
    alive = _goal_reaching_set(env, states, edges)
    checks = []
    _common_checks(env, states, edges, alive, checks)
    if env.domain_id == kernels.DOMAIN_HOUSEHOLD:
        _household_checks(env, states, edges, alive, checks)
    elif env.domain_id == kernels.DOMAIN_MINECRAFT:
        _minecraft_checks(env, states, edges, alive, checks)
    elif env.domain_id == kernels.DOMAIN_MARIO:
        _mario_checks(env, states, edges, alive, checks)
    return checks


def assert_valid(env):
    """Raise LayoutInvalid listing every failed check."""
    checks = validate_layout(env)
    bad = [c for c in checks if not c.ok]
    if bad:
        raise LayoutInvalid(
            "%s: %s" % (env.name, "; ".join("%s (%s)" % (c.name, c.detail) for c in bad))
        )
    return checks
