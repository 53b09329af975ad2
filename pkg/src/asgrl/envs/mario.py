"""Mario-style platform domain (symbolic and pixel observations).

Two platforms separated by a floor: a one-way tube drops the agent from
the upper platform to the bottom, and a worn ladder supports exactly
one crossing ever (either direction).  At the bottom the visible key
rests on a red rock that hides the second key: pickup on that cell
grabs whatever is grabbable, so breaking the rock first (from the cell
or next to it) yields both keys in one grab.  The locked door at the
top needs both keys, so the single ladder crossing has to happen after
both keys are collected; going down by ladder, or coming back up with
one key, are dead ends the symbolic model knows nothing about.

MarioEnv.render turns a state into a small RGB pixel grid (4x4 cells).
Every state field is visible: the agent is a 2x2 white block inside its
cell, so markers underneath stay identifiable.
"""

import numpy as np

from . import kernels
from .base import GridEnv
from .layouts import parse_grid, read_asset, require_one

PICKUP, BREAK, TOGGLE, UP, RIGHT, DOWN, LEFT = range(7)

CELL = 4  # pixels per grid cell

_COLORS = {
    "empty": (0, 0, 0),
    "wall": (120, 120, 120),
    "door_closed": (140, 70, 20),
    "door_open": (40, 200, 40),
    "key": (230, 200, 30),
    "hidden_key": (250, 240, 150),
    "rock": (180, 40, 40),
    "rock_broken": (90, 30, 30),
    "ladder": (200, 160, 60),
    "ladder_used": (80, 60, 30),
    "tube": (60, 120, 220),
    "agent": (255, 255, 255),
}


class MarioEnv(GridEnv):
    domain_id = kernels.DOMAIN_MARIO
    name = "mario"
    model_asset = "mario"
    n_actions = 7
    max_steps = 150
    fields = (
        "row",
        "col",
        "visible_key",
        "hidden_key",
        "rock_broken",
        "ladder_used",
        "door_open",
    )
    goal_fluent = "door-open"
    action_names = ("pickup", "break", "toggle", "up", "right", "down", "left")
    fluent_ids = {
        "has-key": kernels.MA_F_HAS_KEY,
        "at-upper-platform": kernels.MA_F_AT_UPPER,
        "at-bottom": kernels.MA_F_AT_BOTTOM,
        "at-upper-platform-with-key": kernels.MA_F_AT_UPPER_WITH_KEY,
        "door-open": kernels.MA_F_DOOR_OPEN,
    }

    def __init__(self, ladder_uses=1):
        """:param ladder_uses: crossings the ladder survives (1 in the
            real task; other values exist for layout validation tests)"""
        super().__init__()
        rows, cols, walls, markers = parse_grid(
            read_asset("layouts/mario.txt"), legend="SDLUV", solid="LU"
        )
        start = require_one(markers, "S", "start")
        door = require_one(markers, "D", "door")
        ladder = require_one(markers, "L", "ladder")
        tube = require_one(markers, "U", "tube")
        key = require_one(markers, "V", "key cell")
        self.walls = walls
        consts = np.zeros(17, dtype=np.int64)
        consts[0], consts[1] = rows, cols
        consts[kernels.MA_START_R], consts[kernels.MA_START_C] = start
        consts[kernels.MA_DOOR_R], consts[kernels.MA_DOOR_C] = door
        consts[kernels.MA_LAD_TOP_R] = ladder[0] - 1
        consts[kernels.MA_LAD_TOP_C] = ladder[1]
        consts[kernels.MA_LAD_BOT_R] = ladder[0] + 1
        consts[kernels.MA_LAD_BOT_C] = ladder[1]
        consts[kernels.MA_TUBE_TOP_R] = tube[0] - 1
        consts[kernels.MA_TUBE_TOP_C] = tube[1]
        consts[kernels.MA_TUBE_BOT_R] = tube[0] + 1
        consts[kernels.MA_TUBE_BOT_C] = tube[1]
        consts[kernels.MA_KEY_R], consts[kernels.MA_KEY_C] = key
        consts[kernels.MA_LADDER_USES] = ladder_uses
        self.consts = consts
        self._ladder_cell = ladder
        self._tube_cell = tube
        self._key_cell = key
        self.dims = np.array(
            [rows, cols, 2, 2, 2, ladder_uses + 1, 2], dtype=np.int64
        )
        self.start = np.array(
            [start[0], start[1], 0, 0, 0, 0, 0], dtype=np.int64
        )

    def reference_actions(self):
        """Scripted solution: tube down, break rock, both keys, ladder up."""
        return [
            DOWN, RIGHT, RIGHT, RIGHT,                 # to the tube
            DOWN,                                      # drop to the bottom
            DOWN, DOWN, RIGHT, RIGHT, RIGHT,           # to the key cell
            BREAK,                                     # crack the rock open
            PICKUP,                                    # both keys in one grab
            UP, UP,                                    # off the bottom row
            LEFT, LEFT, LEFT, LEFT, LEFT,              # across to the ladder
            LEFT, LEFT, LEFT, LEFT,
            UP,                                        # the one crossing
            LEFT, LEFT,                                # next to the door
            TOGGLE,                                    # unlock: goal
        ]

    def render(self, s):
        """RGB uint8 image of state s, (rows*4, cols*4, 3).

        The mapping is injective on reachable states: agent position is
        the white 2x2 block, and key/rock/ladder/door cells change color
        with their state bits.
        """
        img = np.zeros((self.rows * CELL, self.cols * CELL, 3), dtype=np.uint8)
        c = self.consts

        def fill(cell, color):
            r0, c0 = cell[0] * CELL, cell[1] * CELL
            img[r0 : r0 + CELL, c0 : c0 + CELL] = color

        def quarter(cell, dr, dc, color):
            r0, c0 = cell[0] * CELL + dr, cell[1] * CELL + dc
            img[r0 : r0 + 2, c0 : c0 + 2] = color

        for r in range(self.rows):
            for cc in range(self.cols):
                if self.walls[r, cc]:
                    fill((r, cc), _COLORS["wall"])
        fill(
            self._ladder_cell,
            _COLORS["ladder_used"] if s[5] >= c[kernels.MA_LADDER_USES] else _COLORS["ladder"],
        )
        fill(self._tube_cell, _COLORS["tube"])
        fill(
            (c[kernels.MA_DOOR_R], c[kernels.MA_DOOR_C]),
            _COLORS["door_open"] if s[6] else _COLORS["door_closed"],
        )
        # key cell quarters: visible key top right, rock bottom right,
        # hidden key (once revealed) bottom left; top left stays free so
        # the agent block never hides a state bit
        if s[2] == 0:
            quarter(self._key_cell, 0, 2, _COLORS["key"])
        quarter(
            self._key_cell, 2, 2,
            _COLORS["rock_broken"] if s[4] else _COLORS["rock"],
        )
        if s[4] == 1 and s[3] == 0:
            quarter(self._key_cell, 2, 0, _COLORS["hidden_key"])
        r0, c0 = int(s[0]) * CELL, int(s[1]) * CELL
        img[r0 : r0 + 2, c0 : c0 + 2] = _COLORS["agent"]
        return img


class PixelMarioEnv(MarioEnv):
    """Mario with pixel observations.

    Same dynamics and symbolic model; agents that honour the `pixel`
    flag must index experience by rendered image instead of the integer
    state id, and measure skill diversity through online clustering of
    terminal images rather than state counts.
    """

    name = "mario-pixel"
    pixel = True

    def observe(self, s):
        """Observation for state s: flattened float64 pixel vector."""
        return self.render(s).astype(np.float64).ravel()
