"""Deterministic derivation of independent random streams from one master seed.

Every stochastic component takes a seed and derives its generator through
:func:`derive_rng`, so a run is reproducible for any fixed worker count: each
(condition, replicate, role) tuple names its own counter-based Philox stream,
independent of scheduling order.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_rng", "derive_seed_sequence"]


def _component_key(part: int | str) -> int:
    """Map a path component to a stable 64-bit integer."""
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("seed path components must be non-negative")
        return int(part)
    digest = hashlib.sha256(str(part).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_seed_sequence(master_seed: int, *path: int | str) -> np.random.SeedSequence:
    """Derive a child SeedSequence for the stream named by ``path``."""
    spawn_key = tuple(_component_key(p) for p in path)
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=spawn_key)


def derive_rng(master_seed: int, *path: int | str) -> np.random.Generator:
    """Return a Philox generator for the stream named by ``path``.

    Streams for distinct paths are statistically independent; the same
    (master_seed, path) always yields the same byte stream.
    """
    return np.random.Generator(np.random.Philox(derive_seed_sequence(master_seed, *path)))
