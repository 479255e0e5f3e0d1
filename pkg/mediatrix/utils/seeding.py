"""Seed derivation utilities.

All randomness is driven by explicit seeds. Campaigns spawn one child seed per
instance from the master seed, so results do not depend on execution order.
"""

import numpy as np

SeedLike = int | np.random.Generator

UINT64_MAX = 2**64 - 1


def get_generator(seed: SeedLike) -> np.random.Generator:
    """Obtain a generator from a seed, or pass a generator through.

    Args:
        seed: Non-negative integer seed or an existing generator

    Returns:
        np.random.Generator: PCG64-backed generator
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer or numpy Generator, got {type(seed).__name__}")
    if seed < 0 or seed > UINT64_MAX:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return np.random.default_rng(int(seed))


def spawn_subseeds(seed: int, count: int) -> list[int]:
    """Derive `count` independent 64-bit sub-seeds from a master seed.

    The i-th sub-seed does not depend on `count`, so prefixes of a campaign
    reproduce exactly.
    """
    if count <= 0:
        return []
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def draw_seed(rng: np.random.Generator) -> int:
    """Draw a 63-bit integer seed from a generator."""
    return int(rng.integers(0, 2**63 - 1, dtype=np.int64))
