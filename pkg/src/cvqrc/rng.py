"""Seed derivation for named random streams.

Every stochastic component draws from its own generator, seeded by hashing
the master seed together with a component name.  Adding a new component
therefore never perturbs the draws of existing ones, and results do not
depend on the order in which components happen to consume randomness.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master: int, name: str) -> int:
    """Return a 64-bit seed for the stream ``name`` under ``master``."""
    digest = hashlib.sha256(f"{master}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def stream(master: int, name: str) -> np.random.Generator:
    """Return a PCG64 generator dedicated to the stream ``name``."""
    return np.random.default_rng(derive_seed(master, name))
