"""Household robot domain.

A vacuum robot must fetch the red key, charge at the dock, unlock the
heavy door, and cross into the right-hand room to reach the
destination.  Only the red key fits the lock, but the yellow one is
strictly nearest the start, and the gripper never lets go: the first
key picked up is the key for the rest of the episode.  Turning the
heavy lock without a dock charge drains the battery outright: the door
still opens, but the robot gets two last moves, enough to stagger into
the final room and freeze there, one step short of the destination, and
one move too few to limp back to the dock instead.
The straight run from the red key to the door is strictly shorter than
any route that touches the dock, so the drained variant is also the
easy one to learn.  The door falls shut again the moment the robot
moves into the doorway, so the right-hand room is one-way.

The same dynamics ship with three symbolic models: a hand-written one
with two flawed action descriptions (v1), a minimal one whose plans are
almost empty (v2), and an accurate one.
"""

import numpy as np

from . import kernels
from .base import GridEnv
from .layouts import parse_grid, read_asset, require_one

TOGGLE, PICKUP, UP, RIGHT, DOWN, LEFT = range(6)

_FLUENT_IDS = {
    "has-key": kernels.HH_F_HAS_KEY,
    "charged": kernels.HH_F_CHARGED,
    "door-open": kernels.HH_F_DOOR_OPEN,
    "at-final-room": kernels.HH_F_AT_FINAL_ROOM,
    "at-destination": kernels.HH_F_AT_DESTINATION,
    "at-starting-room": kernels.HH_F_AT_STARTING_ROOM,
    "holding yellow": kernels.HH_F_HOLDING_YELLOW,
    "holding green": kernels.HH_F_HOLDING_GREEN,
    "holding red": kernels.HH_F_HOLDING_RED,
    "holding-red": kernels.HH_F_HOLDING_RED,
    "door-ajar": kernels.HH_F_DOOR_AJAR,
}

# which detector names each model variant talks about
_VOCAB = {
    "v1": (
        "at-starting-room",
        "has-key",
        "holding yellow",
        "holding green",
        "holding red",
        "charged",
        "door-open",
        "door-ajar",
        "at-final-room",
        "at-destination",
    ),
    "v2": (
        "at-starting-room",
        "door-ajar",
        "at-final-room",
        "at-destination",
    ),
    "accurate": (
        "at-starting-room",
        "holding-red",
        "charged",
        "door-open",
        "at-final-room",
        "at-destination",
    ),
}

class HouseholdEnv(GridEnv):
    domain_id = kernels.DOMAIN_HOUSEHOLD
    n_actions = 6
    max_steps = 100
    fields = ("row", "col", "carried_key", "charged", "door_open", "power")
    goal_fluent = "at-destination"
    action_names = ("toggle", "pickup", "up", "right", "down", "left")

    def __init__(self, variant="v1"):
        """:param variant: which paired model to expose (v1, v2, accurate)"""
        super().__init__()
        if variant not in _VOCAB:
            raise ValueError("unknown household variant %r" % (variant,))
        self.variant = variant
        self.name = "household-%s" % variant
        self.model_asset = "household_%s" % variant
        self.fluent_ids = {f: _FLUENT_IDS[f] for f in _VOCAB[variant]}

        rows, cols, walls, markers = parse_grid(
            read_asset("layouts/household.txt"), legend="SYGRCDT"
        )
        start = require_one(markers, "S", "start")
        key_y = require_one(markers, "Y", "yellow key")
        key_g = require_one(markers, "G", "green key")
        key_r = require_one(markers, "R", "red key")
        dock = require_one(markers, "C", "charging dock")
        door = require_one(markers, "D", "door")
        dest = require_one(markers, "T", "destination")
        self.walls = walls
        consts = np.zeros(16, dtype=np.int64)
        consts[0], consts[1] = rows, cols
        consts[kernels.HH_START_R], consts[kernels.HH_START_C] = start
        consts[kernels.HH_KEY_Y_R], consts[kernels.HH_KEY_Y_C] = key_y
        consts[kernels.HH_KEY_G_R], consts[kernels.HH_KEY_G_C] = key_g
        consts[kernels.HH_KEY_R_R], consts[kernels.HH_KEY_R_C] = key_r
        consts[kernels.HH_DOCK_R], consts[kernels.HH_DOCK_C] = dock
        consts[kernels.HH_DOOR_R], consts[kernels.HH_DOOR_C] = door
        consts[kernels.HH_DEST_R], consts[kernels.HH_DEST_C] = dest
        self.consts = consts
        self.dims = np.array([rows, cols, 4, 2, 2, 4], dtype=np.int64)
        self.start = np.array([start[0], start[1], 0, 0, 0, 0], dtype=np.int64)

    def reference_actions(self):
        """Scripted solution: red key, dock detour, unlock, cross, destination."""
        return [
            RIGHT, RIGHT, RIGHT,                      # along the corridor to the red key
            PICKUP,
            UP, UP,                                   # leave the corridor for the dock row
            RIGHT, RIGHT, RIGHT,                      # onto the dock, charge latches
            DOWN, DOWN, RIGHT,                        # back down to the cell left of the door
            TOGGLE,                                   # unlock, charge holds
            RIGHT,                                    # into the doorway, door shuts
            RIGHT,                                    # into the final room
            UP,                                       # to the destination
        ]
