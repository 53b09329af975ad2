"""MineCraft-style crafting domain.

The agent gathers raw wood (up to 4 carried), processes everything it
carries in a single visit to workshop-1 (the machine breaks after one
run per episode), then crafts at the other two workshops: a plank costs
2 processed wood, a stick costs 1, and the goal ladder needs one of
each.  Processing fewer than 3 wood is therefore a dead end, which is
exactly what a greedy "achieve wood-processed as fast as possible"
skill runs into.
"""

import numpy as np

from . import kernels
from .base import GridEnv
from .layouts import parse_grid, read_asset, require_one

PICKUP, PROCESS, CRAFT, UP, RIGHT, DOWN, LEFT = range(7)

CARRY_CAP = 4
PLANK_COST = 2
STICK_COST = 1


class MineCraftEnv(GridEnv):
    domain_id = kernels.DOMAIN_MINECRAFT
    name = "minecraft"
    model_asset = "minecraft"
    n_actions = 7
    max_steps = 100
    fields = (
        "row",
        "col",
        "carried_wood",
        "processed_wood",
        "plank",
        "stick",
        "ladder",
        "ws1_used",
    )
    goal_fluent = "ladder_made"
    action_names = ("pickup", "process", "craft", "up", "right", "down", "left")
    fluent_ids = {
        "wood-processed": kernels.MC_F_WOOD_PROCESSED,
        "plank_made": kernels.MC_F_PLANK_MADE,
        "stick_made": kernels.MC_F_STICK_MADE,
        "ladder_made": kernels.MC_F_LADDER_MADE,
        "at-starting-location": kernels.MC_F_AT_STARTING_LOCATION,
    }

    def __init__(self):
        super().__init__()
        rows, cols, walls, markers = parse_grid(
            read_asset("layouts/minecraft.txt"), legend="SW123"
        )
        start = require_one(markers, "S", "start")
        ws1 = require_one(markers, "1", "workshop-1")
        ws2 = require_one(markers, "2", "workshop-2")
        ws3 = require_one(markers, "3", "workshop-3")
        woods = markers.get("W", [])
        if not woods:
            raise ValueError("minecraft layout needs at least one wood tile")
        self.walls = walls
        consts = np.zeros(kernels.MC_WOOD0 + 2 * len(woods), dtype=np.int64)
        consts[0], consts[1] = rows, cols
        consts[kernels.MC_START_R], consts[kernels.MC_START_C] = start
        consts[kernels.MC_WS1_R], consts[kernels.MC_WS1_C] = ws1
        consts[kernels.MC_WS2_R], consts[kernels.MC_WS2_C] = ws2
        consts[kernels.MC_WS3_R], consts[kernels.MC_WS3_C] = ws3
        consts[kernels.MC_CARRY_CAP] = CARRY_CAP
        consts[kernels.MC_PLANK_COST] = PLANK_COST
        consts[kernels.MC_STICK_COST] = STICK_COST
        consts[kernels.MC_N_WOOD] = len(woods)
        for i, (r, c) in enumerate(woods):
            consts[kernels.MC_WOOD0 + 2 * i] = r
            consts[kernels.MC_WOOD0 + 2 * i + 1] = c
        self.consts = consts
        self.dims = np.array(
            [rows, cols, CARRY_CAP + 1, CARRY_CAP + 1, 2, 2, 2, 2], dtype=np.int64
        )
        self.start = np.array(
            [start[0], start[1], 0, 0, 0, 0, 0, 0], dtype=np.int64
        )

    def reference_actions(self):
        """Scripted solution: three wood, process, stick, plank, ladder."""
        return [
            DOWN, DOWN, PICKUP,                       # wood at (6,1)
            UP, UP, UP, UP, UP, PICKUP,               # wood at (1,1)
            DOWN, DOWN, RIGHT, RIGHT, PICKUP,         # wood at (3,3)
            DOWN, RIGHT, RIGHT, RIGHT, PROCESS,       # workshop-1, 3 processed
            DOWN, DOWN, DOWN, DOWN, LEFT, CRAFT,      # workshop-3: stick
            UP, UP, RIGHT, RIGHT, RIGHT, CRAFT,       # workshop-2: plank
            CRAFT,                                    # workshop-2: ladder
        ]
