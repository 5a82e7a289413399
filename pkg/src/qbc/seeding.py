"""Stable seed derivation for reproducible experiments.

Per-run generators are derived as ``hash(master_seed, label, index)`` so
that adding runs, reordering execution, or parallelizing never perturbs
the stream any earlier run sees.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master_seed: int, label: str, index: int = 0) -> int:
    """A 64-bit seed determined only by (master_seed, label, index)."""
    digest = hashlib.sha256(f"{master_seed}:{label}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def derived_rng(master_seed: int, label: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, label, index))


def run_seeds(master_seed: int, label: str, count: int) -> list[int]:
    return [derive_seed(master_seed, label, i) for i in range(count)]
