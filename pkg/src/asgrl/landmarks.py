"""Fact landmarks: extraction, brute-force verification, linearizations.

Extraction backward-chains over the delete relaxation: starting from the
goal facts, the candidate predecessors of a fact f are the intersection
of the preconditions of f's first achievers (actions adding f whose
preconditions are relaxed-reachable without any f-adding action).  This
is sound but not complete; the verification oracle below certifies the
output per model against exhaustive plan enumeration.

Reported orderings are the transitive reduction of the chaining orders —
the immediate orderings, matching how the bundled models document them.
"""

from dataclasses import dataclass

from .model import find_plan, relative_orderings


class UnsolvableModel(Exception):
    pass


class BudgetExceeded(Exception):
    pass


class CyclicOrderings(Exception):
    pass


@dataclass(frozen=True)
class LandmarkGraph:
    facts: frozenset
    orderings: frozenset  # (f_i, f_j) pairs meaning f_i ≺ f_j, reduced
    goal_facts: frozenset

    def __post_init__(self):
        for fi, fj in self.orderings:
            if fi == fj:
                raise CyclicOrderings(f"reflexive ordering on '{fi}'")


@dataclass
class VerificationReport:
    plans_checked: int
    violated_orderings: list  # (plan index, (f_i, f_j))
    missing_facts: list  # (plan index, fact)

    @property
    def ok(self):
        return not self.violated_orderings and not self.missing_facts


def _relaxed_fixpoint(model, excluded):
    """Fluent mask reachable from I ignoring deletes, skipping excluded actions."""
    reached = model._init_mask
    changed = True
    while changed:
        changed = False
        for idx in range(len(model.actions)):
            if idx in excluded:
                continue
            prec = model._prec_mask[idx]
            if reached & prec == prec:
                nxt = reached | model._add_mask[idx]
                if nxt != reached:
                    reached = nxt
                    changed = True
    return reached


def _first_achievers(model, fact):
    """Actions adding fact whose preconditions are relaxed-reachable
    without any fact-adding action."""
    bit = 1 << model.fluent_index[fact]
    adders = [i for i in range(len(model.actions)) if model._add_mask[i] & bit]
    reachable = _relaxed_fixpoint(model, excluded=set(adders))
    return [i for i in adders if reachable & model._prec_mask[i] == model._prec_mask[i]]


def _transitive_reduction(pairs):
    """Unique reduction of a DAG given as a set of (a, b) edges."""
    succ = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)

    def reachable(src, dst, skip_direct):
        # is dst reachable from src by a path of length >= 2?
        stack = [(src, 0)]
        seen = set()
        while stack:
            node, depth = stack.pop()
            for nxt in succ.get(node, ()):
                if depth == 0 and skip_direct and nxt == dst:
                    continue
                if nxt == dst and depth >= 1:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append((nxt, depth + 1))
        return False

    reduced = set()
    for a, b in pairs:
        if not reachable(a, b, skip_direct=True):
            reduced.add((a, b))
    return reduced


def _check_acyclic(pairs):
    succ = {}
    nodes = set()
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
        nodes.add(a)
        nodes.add(b)
    color = {}

    def visit(n):
        color[n] = 1
        for m in succ.get(n, ()):
            c = color.get(m, 0)
            if c == 1:
                raise CyclicOrderings(f"ordering cycle through '{m}'")
            if c == 0:
                visit(m)
        color[n] = 2

    for n in nodes:
        if color.get(n, 0) == 0:
            visit(n)


def extract_landmarks(model):
    """Backward-chain landmark facts and immediate orderings from the goal.

    Facts already true in I are kept as landmarks but not chained
    further.  Non-goal facts are precondition facts by construction.
    """
    if find_plan(model) is None:
        raise UnsolvableModel("model has no valid plan")

    facts = set(model.goal)
    raw_orderings = set()
    worklist = sorted(model.goal)
    processed = set()
    while worklist:
        fact = worklist.pop()
        if fact in processed:
            continue
        processed.add(fact)
        if fact in model.init:
            continue
        achievers = _first_achievers(model, fact)
        if not achievers:
            continue
        common = set(model.actions[achievers[0]].prec)
        for idx in achievers[1:]:
            common &= model.actions[idx].prec
        for pre in sorted(common):
            raw_orderings.add((pre, fact))
            if pre not in facts:
                facts.add(pre)
                worklist.append(pre)

    _check_acyclic(raw_orderings)
    reduced = _transitive_reduction(raw_orderings)

    # sanity: non-goal facts must appear in some action precondition
    precondition_facts = set()
    for a in model.actions:
        precondition_facts |= a.prec
    for f in facts:
        if f not in model.goal and f not in precondition_facts:
            raise AssertionError(f"landmark '{f}' is not a precondition fact")

    return LandmarkGraph(
        facts=frozenset(facts),
        orderings=frozenset(reduced),
        goal_facts=frozenset(model.goal),
    )


def enumerate_plans(model, max_len, budget=1_000_000):
    """All valid plans of length <= max_len, depth-first, deterministic.

    A plan is a sequence of applicable actions whose final state
    satisfies the goal.  Raises BudgetExceeded past `budget` plans.
    """
    if max_len > 12:
        raise ValueError("max_len > 12 would blow up enumeration")
    n = len(model.actions)
    goal = model._goal_mask
    plans = []
    prefix = []

    def dfs(state, depth):
        if state & goal == goal:
            plans.append([model.actions[i] for i in prefix])
            if len(plans) > budget:
                raise BudgetExceeded(f"more than {budget} plans")
        if depth == max_len:
            return
        for idx in range(n):
            prec = model._prec_mask[idx]
            if state & prec != prec:
                continue
            nxt = (state & ~model._del_mask[idx]) | model._add_mask[idx]
            prefix.append(idx)
            dfs(nxt, depth + 1)
            prefix.pop()

    dfs(model._init_mask, 0)
    return plans


def verify_landmarks(model, lg, max_len):
    """Check every enumerated plan achieves all facts and every ordering.

    An ordering (f_i, f_j) holds in a plan's state sequence when the
    first state where f_j is true is preceded by one where f_i is true.
    """
    plans = enumerate_plans(model, max_len)
    violated = []
    missing = []
    for pidx, plan in enumerate(plans):
        state = model.init
        first = {}
        for f in state:
            first.setdefault(f, 0)
        step = 0
        for action in plan:
            step += 1
            state = frozenset((state - action.delete) | action.add)
            for f in state:
                first.setdefault(f, step)
        for f in sorted(lg.facts):
            if f not in first:
                missing.append((pidx, f))
        for fi, fj in sorted(lg.orderings):
            if fj not in first or fi not in first or not first[fi] < first[fj]:
                violated.append((pidx, (fi, fj)))
    return VerificationReport(
        plans_checked=len(plans),
        violated_orderings=violated,
        missing_facts=missing,
    )


def all_linearizations(lg):
    """Every topological order of the graph with goal facts placed last."""
    facts = sorted(lg.facts)
    preds = {f: set() for f in facts}
    for fi, fj in lg.orderings:
        preds[fj].add(fi)
    goal_set = set(lg.goal_facts) & lg.facts
    non_goal = [f for f in facts if f not in goal_set]

    orders = []
    chosen = []

    def backtrack(remaining):
        if not remaining:
            orders.append(list(chosen))
            return
        placed = set(chosen)
        for f in remaining:
            if preds[f] <= placed:
                # goal facts may only go after every non-goal fact
                if f in goal_set and any(g not in placed for g in non_goal):
                    continue
                chosen.append(f)
                backtrack([g for g in remaining if g != f])
                chosen.pop()

    backtrack(facts)
    if not orders:
        raise CyclicOrderings("no linearization exists")
    return orders


def sample_linearization(lg, rng, _cache={}):
    """Uniform choice among valid linearizations; deterministic per seed.

    rng is a one-cell uint64 stream from asgrl.rng.make_stream.
    """
    from .rng import rand_range

    if lg not in _cache:
        _cache[lg] = all_linearizations(lg)
    orders = _cache[lg]
    return list(orders[rand_range(rng, len(orders))])
