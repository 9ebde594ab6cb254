"""Deterministic seed derivation.

Every randomized routine takes an integer root seed.  Child seeds (restarts,
sweep instances) are drawn from a splitmix64 stream so that the i-th child is
the same no matter how many children are requested or how work is scheduled.
"""

from __future__ import annotations

import os

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; return ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def child_seeds(root: int, count: int) -> list[int]:
    state = root & _MASK
    out = []
    for _ in range(count):
        state, z = splitmix64(state)
        out.append(z)
    return out


def child_seed(root: int, index: int) -> int:
    return child_seeds(root, index + 1)[index]


def generator(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed & _MASK)


def default_seed() -> int:
    return int(os.environ.get("NLSG_SEED", "0"))
