"""
Seeded random streams.

All randomness flows through ``numpy.random.Generator`` backed by PCG64.
Trial ``k`` of a run seeded with ``seed`` draws from the child stream that
``SeedSequence(seed).spawn`` would hand out at position ``k``; streams for
different trials are therefore independent and can be regenerated in any
order.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import DomainError

SEED_ENV = "HYBRIDLAB_SEED"
SEED_MAX = 2**64 - 1


def check_seed(seed) -> int:
    try:
        seed = int(seed)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"seed must be an integer, got {seed!r}") from exc
    if not 0 <= seed <= SEED_MAX:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(check_seed(seed))))


def trial_rng(seed, k: int) -> np.random.Generator:
    """Independent stream for trial ``k``; equal to the ``k``-th spawned child."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(k),))
    return np.random.Generator(np.random.PCG64(ss))


def seed_from_env(default: int = 0) -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return default
    return check_seed(raw.strip())
