"""Common environment surface shared by the gridworld domains.

The hot path lives in asgrl.envs.kernels; a GridEnv instance is mostly
a bundle of the constant arrays those kernels take, plus friendly
python wrappers (functional step, fluent queries by name, state
field access) used by tests, validation and the CLI.
"""

import numpy as np

from . import kernels
from ..pddl import parse
from .layouts import read_asset


class GridEnv:
    """Deterministic gridworld with programmatic fluent detectors.

    Subclasses fill in the class attributes and the constant vectors in
    __init__.  States are int64 vectors (see kernels module docstring
    for the per-domain field layout); `fields` names those positions.
    """

    name = ""
    domain_id = -1
    n_actions = 0
    max_steps = 0
    fields = ()
    fluent_ids = {}
    goal_fluent = ""
    model_asset = ""
    action_names = ()
    pixel = False

    def __init__(self):
        self.consts = None
        self.walls = None
        self.dims = None
        self.start = None

    @property
    def rows(self):
        return int(self.walls.shape[0])

    @property
    def cols(self):
        return int(self.walls.shape[1])

    @property
    def n_states(self):
        n = 1
        for d in self.dims:
            n *= int(d)
        return n

    def reset(self):
        """Initial state vector (fresh copy)."""
        return self.start.copy()

    def step(self, s, a):
        """Apply action a to state s without mutating it.

        :param s: int64 state vector
        :param a: action index
        :returns: (next state vector, terminal flag)
        """
        s2 = np.array(s, dtype=np.int64)
        term = kernels.env_step(self.domain_id, self.consts, self.walls, s2, a)
        return s2, bool(term)

    def encode(self, s):
        """Mixed-radix integer id of s, unique per state."""
        return int(kernels.encode_kernel(self.dims, np.asarray(s, dtype=np.int64)))

    def diversity_key(self, s):
        """Terminal-class key used by the diversity visitation counts.

        Defaults to the full state id.  Domains whose state carries a
        per-step resource counter override this to drop it: otherwise
        every rollout length mints a fresh terminal state, each skill
        claims a private copy of the same physical outcome, and the
        diversity penalty never binds.
        """
        return self.encode(s)

    def is_terminal(self, s):
        return bool(
            kernels.env_terminal(self.domain_id, self.consts, np.asarray(s, dtype=np.int64))
        )

    def eval_fluent(self, s, fluent):
        """True when the named fluent's detector fires in state s."""
        fid = self.fluent_ids[fluent]
        return bool(
            kernels.eval_fluent_kernel(
                self.domain_id, self.consts, np.asarray(s, dtype=np.int64), fid
            )
        )

    def fluent_state(self, s):
        """Set of detector names true in s (a trace row for plan checks)."""
        out = set()
        for name in self.fluent_ids:
            if self.eval_fluent(s, name):
                out.add(name)
        return frozenset(out)

    def describe(self, s):
        """Dict view of a state vector, keyed by field name."""
        return {f: int(v) for f, v in zip(self.fields, s)}

    def model_texts(self):
        """(domain text, problem text) of the paired symbolic model."""
        domain = read_asset("models/%s.domain.pddl" % self.model_asset)
        problem = read_asset("models/%s.problem.pddl" % self.model_asset)
        return domain, problem

    def load_model(self, strict=False):
        domain, problem = self.model_texts()
        return parse(domain, problem, strict=strict)

    def reference_actions(self):
        """A scripted action sequence that reaches the environment goal."""
        raise NotImplementedError

    def run_actions(self, actions, s=None):
        """Roll a scripted action list; returns (states, terminal flag).

        states[0] is the start, states[i] the state after actions[i-1].
        """
        if s is None:
            s = self.reset()
        states = [np.array(s, dtype=np.int64)]
        term = self.is_terminal(s)
        for a in actions:
            s, term = self.step(states[-1], a)
            states.append(s)
        return states, term
