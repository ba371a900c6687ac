"""Seeded random streams.

All randomness flows through :func:`make_rng`, a Philox-4x64 counter-based
generator keyed by ``numpy.random.SeedSequence(seed)``; the stream for a
given integer seed is identical on every platform. Sub-tasks get their own
stream through :func:`derive_seed`, which hashes the master seed together
with a task label (BLAKE2b, 8-byte digest), so adding or reordering tasks
never shifts another task's draws.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_seed", "make_rng", "check_random_state"]


def derive_seed(master_seed: int, *labels) -> int:
    """Stable 63-bit seed for the sub-task named by ``labels``."""
    text = "/".join([str(int(master_seed))] + [str(lab) for lab in labels])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def check_random_state(seed) -> np.random.Generator:
    """Pass generators through; turn ``None`` or an int into a Philox stream."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        seed = 0
    return make_rng(seed)
