"""Propositional STRIPS model: grounding, application, validation, search.

A symbolic state is a frozenset of fluent strings.  Internally the model
also keeps bitmask forms of every action for the BFS planner; the fluent
list is sorted lexicographically so masks, Q-table keys and plans are
stable across runs.
"""

from dataclasses import dataclass
from collections import deque
from itertools import product


@dataclass(frozen=True)
class GroundAction:
    """name is 'schema(obj1,obj2)' for bound schemas, plain 'schema' otherwise."""

    name: str
    prec: frozenset
    add: frozenset
    delete: frozenset


class GroundingError(Exception):
    pass


class SymbolicModel:
    """Grounded task ⟨F, A, I, G⟩ over propositional fluents."""

    def __init__(self, fluents, actions, init, goal):
        if len(set(fluents)) != len(fluents):
            raise GroundingError("duplicate fluents")
        self.fluents = tuple(fluents)
        self.fluent_index = {f: i for i, f in enumerate(self.fluents)}
        self.actions = tuple(actions)
        self.init = frozenset(init)
        self.goal = frozenset(goal)
        if not self.goal:
            raise GroundingError("goal must contain at least one fluent")
        for fset in (self.init, self.goal):
            if not fset <= set(self.fluents):
                raise GroundingError("init/goal fluent outside fluent universe")
        for a in self.actions:
            for fset in (a.prec, a.add, a.delete):
                if not fset <= set(self.fluents):
                    raise GroundingError(f"action '{a.name}' uses unknown fluent")
            if a.add & a.delete:
                raise GroundingError(f"action '{a.name}' adds and deletes a fluent")
        # bitmask mirrors for the planner
        self._prec_mask = [self._mask(a.prec) for a in self.actions]
        self._add_mask = [self._mask(a.add) for a in self.actions]
        self._del_mask = [self._mask(a.delete) for a in self.actions]
        self._init_mask = self._mask(self.init)
        self._goal_mask = self._mask(self.goal)
        self._action_index = {a.name: i for i, a in enumerate(self.actions)}

    def _mask(self, fluent_set):
        m = 0
        for f in fluent_set:
            m |= 1 << self.fluent_index[f]
        return m

    def mask_to_state(self, mask):
        return frozenset(
            f for i, f in enumerate(self.fluents) if mask & (1 << i)
        )


def _atom_text(atom, binding):
    args = tuple(binding.get(a, a) if a.startswith("?") else a for a in atom.args)
    if args:
        return atom.pred + " " + " ".join(args)
    return atom.pred


def ground(task):
    """Ground a LiftedTask to a SymbolicModel.

    One GroundAction per schema and consistent typed binding, in
    declaration order; parameterless schemas yield exactly one action.
    The fluent universe is every ground atom mentioned in init, goal or
    any instantiated schema, sorted lexicographically.
    """
    objects_by_type = {}
    for name, tname in task.objects.items():
        objects_by_type.setdefault(tname, []).append(name)

    def candidates(tname):
        if tname == "object":
            return list(task.objects.keys())
        return objects_by_type.get(tname, [])

    actions = []
    atom_texts = set()
    for atom in task.init:
        atom_texts.add(_atom_text(atom, {}))
    for atom in task.goal:
        atom_texts.add(_atom_text(atom, {}))

    for schema in task.action_schemas:
        pools = [candidates(tname) for _, tname in schema.params]
        for combo in product(*pools):
            binding = {var: obj for (var, _), obj in zip(schema.params, combo)}
            prec = frozenset(_atom_text(a, binding) for a in schema.precondition)
            add = frozenset(_atom_text(a, binding) for a in schema.add)
            dele = frozenset(_atom_text(a, binding) for a in schema.delete)
            if combo:
                name = f"{schema.name}({','.join(combo)})"
            else:
                name = schema.name
            actions.append(GroundAction(name, prec, add, dele))
            atom_texts |= prec | add | dele

    fluents = sorted(atom_texts)
    init = frozenset(_atom_text(a, {}) for a in task.init)
    goal = frozenset(_atom_text(a, {}) for a in task.goal)
    return SymbolicModel(fluents, actions, init, goal)


def apply_action(model, state, action):
    """(s \\ del) ∪ add when prec ⊆ s, else None."""
    if not action.prec <= state:
        return None
    return frozenset((state - action.delete) | action.add)


def validate_plan(model, plan):
    """Check sequential applicability and goal satisfaction.

    Returns (valid, state_sequence).  The sequence starts at I and stops
    at the first inapplicable step.
    """
    state = model.init
    seq = [state]
    for action in plan:
        nxt = apply_action(model, state, action)
        if nxt is None:
            return False, seq
        state = nxt
        seq.append(state)
    return model.goal <= state, seq


def relative_orderings(state_sequence):
    """Pairs (f_i, f_j): f_j's first true state is preceded by one with f_i.

    Fluents first achieved at the same step are not ordered.
    """
    if not state_sequence:
        raise ValueError("empty state sequence")
    first = {}
    for idx, state in enumerate(state_sequence):
        for f in state:
            if f not in first:
                first[f] = idx
    pairs = set()
    for fi, mi in first.items():
        for fj, mj in first.items():
            if mi < mj:
                pairs.add((fi, fj))
    return pairs


def is_instantiation(trace_fluent_rows, plan_state_sequence):
    """True iff the trace's fluent rows respect every plan ordering.

    For each ordered pair f_i ≺ f_j of the plan's state sequence, the
    first row where f_j holds must be preceded by a row where f_i holds.
    """
    orderings = relative_orderings(plan_state_sequence)
    first = {}
    for idx, row in enumerate(trace_fluent_rows):
        for f in row:
            if f not in first:
                first[f] = idx
    for fi, fj in orderings:
        if fj not in first or fi not in first:
            return False
        if not first[fi] < first[fj]:
            return False
    return True


def find_plan(model):
    """Shortest valid plan by breadth-first search, or None.

    Deterministic: actions are tried in grounding order, so ties resolve
    to the lexicographically-first shortest plan under that order.
    """
    init = model._init_mask
    goal = model._goal_mask
    if init & goal == goal:
        return []
    seen = {init: None}
    queue = deque([init])
    while queue:
        state = queue.popleft()
        for idx in range(len(model.actions)):
            prec = model._prec_mask[idx]
            if state & prec != prec:
                continue
            nxt = (state & ~model._del_mask[idx]) | model._add_mask[idx]
            if nxt in seen:
                continue
            seen[nxt] = (state, idx)
            if nxt & goal == goal:
                plan = []
                cur = nxt
                while seen[cur] is not None:
                    prev, aidx = seen[cur]
                    plan.append(model.actions[aidx])
                    cur = prev
                plan.reverse()
                return plan
            queue.append(nxt)
    return None
