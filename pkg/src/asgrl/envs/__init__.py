"""Deterministic gridworld domains with paired symbolic models."""

from .base import GridEnv
from .household import HouseholdEnv
from .mario import MarioEnv, PixelMarioEnv
from .minecraft import MineCraftEnv

ENV_NAMES = (
    "household-v1",
    "household-v2",
    "household-accurate",
    "minecraft",
    "mario",
    "mario-pixel",
)


def make_env(name):
    """Build an environment by registry name.

    :param name: one of ENV_NAMES
    """
    if name.startswith("household-"):
        return HouseholdEnv(variant=name[len("household-") :])
    if name == "minecraft":
        return MineCraftEnv()
    if name == "mario":
        return MarioEnv()
    if name == "mario-pixel":
        return PixelMarioEnv()
    raise ValueError("unknown environment %r (known: %s)" % (name, ", ".join(ENV_NAMES)))


__all__ = [
    "ENV_NAMES",
    "GridEnv",
    "HouseholdEnv",
    "MarioEnv",
    "MineCraftEnv",
    "PixelMarioEnv",
    "make_env",
]
