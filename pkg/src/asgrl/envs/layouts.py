"""Grid layout parsing.

Layouts ship as small text files (see asgrl/assets/layouts): `;` lines
are comments, every other line is one grid row.  Each domain has its own
legend; the parser just locates marker cells and hands back coordinates
plus the wall grid, and the env modules turn those into the int64
constant vectors the kernels consume.
"""

from importlib import resources

import numpy as np


class LayoutError(ValueError):
    """Raised for malformed or inconsistent layout text."""


def read_asset(name):
    """Return the text of a packaged layout or model asset.

    :param name: path below asgrl/assets, e.g. "layouts/mario.txt"
    """
    parts = name.split("/")
    node = resources.files("asgrl").joinpath("assets")
    for p in parts:
        node = node.joinpath(p)
    return node.read_text()


def parse_grid(text, legend, wall_chars="#", solid=""):
    """Parse layout text into (rows, cols, walls, markers).

    :param text: layout file contents
    :param legend: string of marker characters that may appear, besides
        '.' and wall characters
    :param wall_chars: characters treated as impassable cells
    :param solid: legend markers whose cell is also impassable
    :returns: (rows, cols, walls uint8 array, markers dict
        char -> list of (r, c) in reading order)
    """
    lines = []
    for raw in text.splitlines():
        line = raw.rstrip()
        if not line or line.lstrip().startswith(";"):
            continue
        lines.append(line)
    if not lines:
        raise LayoutError("layout has no grid rows")
    cols = len(lines[0])
    for i, line in enumerate(lines):
        if len(line) != cols:
            raise LayoutError(
                "row %d has %d cells, expected %d" % (i, len(line), cols)
            )
    rows = len(lines)
    walls = np.zeros((rows, cols), dtype=np.uint8)
    markers = {}
    for r, line in enumerate(lines):
        for c, ch in enumerate(line):
            if ch == ".":
                continue
            if ch in legend:
                markers.setdefault(ch, []).append((r, c))
                if ch in solid:
                    walls[r, c] = 1
                continue
            if ch in wall_chars:
                walls[r, c] = 1
                continue
            raise LayoutError("unknown cell '%s' at (%d, %d)" % (ch, r, c))
    return rows, cols, walls, markers


def require_one(markers, ch, what):
    """Fetch the single (r, c) for marker `ch`, or raise."""
    cells = markers.get(ch, [])
    if len(cells) != 1:
        raise LayoutError(
            "expected exactly one '%s' (%s), found %d" % (ch, what, len(cells))
        )
    return cells[0]
