"""Seeded random streams shared by the Python and kernel code.

One root seed drives a whole experiment.  Child streams are derived per
(component name, seed index) so that e.g. skill exploration, linearization
sampling and evaluation never share a sequence.  The derivation uses
FNV-1a over the component string mixed with splitmix64 (plain Python ints,
cold path).  The per-draw generator is xorshift64 operating on a one-cell
uint64 array: shift/xor only, so the numba path and the plain-numpy path
produce identical bits with no overflow warnings.
"""

import numpy as np

from .accel import maybe_njit

U64 = np.uint64
_MASK = (1 << 64) - 1

# 1/2^53, for converting the top 53 bits of a draw to a double in [0, 1)
_INV53 = 1.0 / 9007199254740992.0


def fnv1a64(text):
    """FNV-1a hash of a string, as a Python int in [0, 2^64)."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & _MASK
    return h


def _splitmix64(x):
    """One splitmix64 step on a Python int; returns the mixed value."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def make_stream(root_seed, component, seed=0):
    """Derive an independent xorshift64 state for (component, seed).

    Returns a one-cell uint64 array usable by the kernel-side draw
    functions below.  The state is never zero.
    """
    x = fnv1a64(component)
    x ^= _splitmix64(root_seed & _MASK)
    x = _splitmix64(x ^ ((seed & _MASK) << 1))
    x = _splitmix64(x)
    if x == 0:
        x = 0x9E3779B97F4A7C15
    return np.array([x], dtype=np.uint64)


@maybe_njit
def next_u64(state):
    """Advance the xorshift64 state in place and return the new value."""
    x = state[0]
    x ^= x << U64(13)
    x ^= x >> U64(7)
    x ^= x << U64(17)
    state[0] = x
    return x


@maybe_njit
def rand_double(state):
    """Uniform double in [0, 1) from the top 53 bits of the next draw."""
    return (next_u64(state) >> U64(11)) * _INV53


@maybe_njit
def rand_range(state, n):
    """Uniform integer in [0, n).  n must be positive and small (< 2^26)."""
    return int(rand_double(state) * n)
