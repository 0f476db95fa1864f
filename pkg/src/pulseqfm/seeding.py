"""Deterministic, collision-resistant seed derivation for experiment tasks.

Child seeds are stable hashes of (master seed, task label), so any task can
be recomputed in isolation and parallel schedules cannot change results.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master_seed: int, task_label: str) -> int:
    """64-bit child seed for a named task under a master seed."""
    payload = f"{int(master_seed)}::{task_label}".encode()
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "little")


def rng_for(master_seed: int, task_label: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, task_label))
