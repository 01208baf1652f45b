"""Seed derivation: every random stream in a run flows from one 64-bit master seed.

Each subsystem draws from an independent stream identified by a string tag
(plus optional integer qualifiers such as a task index).  The derivation is
``SeedSequence((master_seed, crc32(tag), *qualifiers))``, so streams are
reproducible across runs and do not collide between subsystems.

Tags in use:

==================  ==========================================
``"roots"``         initial root-vertex draw (master task)
``"init"``          per-task label adoption during initialization
``"fallback"``      per-task random labels for unreached vertices
``"dist"``          random-hash vertex ownership
``"baseline"``      random baseline partitioner
``"gen-rmat"``      recursive-quadrant generator stream
``"gen-er"``        uniform-pair generator stream
``"gen-randhd"``    windowed-pair generator stream
``"diameter"``      sweep restarts in the diameter estimator
==================  ==========================================
"""

from __future__ import annotations

import zlib

import numpy as np


def derive_seed(master_seed: int, tag: str, *qualifiers: int) -> tuple[int, ...]:
    """Entropy tuple for ``SeedSequence``; stable across processes."""
    return (int(master_seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(tag.encode()), *qualifiers)


def rng_for(master_seed: int, tag: str, *qualifiers: int) -> np.random.Generator:
    """Generator for one subsystem stream."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(derive_seed(master_seed, tag, *qualifiers))))


def subsystem_seed(master_seed: int, tag: str, *qualifiers: int) -> int:
    """A 63-bit integer seed for subsystems that take a plain seed."""
    return int(rng_for(master_seed, tag, *qualifiers).integers(0, 1 << 63))


_SPLIT_INC = np.uint64(0x9E3779B97F4A7C15)
_SPLIT_M1 = np.uint64(0xBF58476D1CE4E5B9)
_SPLIT_M2 = np.uint64(0x94D049BB133111EB)


def mix64(values: np.ndarray | int, seed: int = 0) -> np.ndarray:
    """SplitMix64 finalizer over ``values`` combined with ``seed``.

    Pure function used for O(1) hashed vertex ownership; wraps modulo 2**64.
    """
    x = np.asarray(values, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = x + (np.uint64(seed & 0xFFFFFFFFFFFFFFFF) * _SPLIT_INC + _SPLIT_INC)
        z = (z ^ (z >> np.uint64(30))) * _SPLIT_M1
        z = (z ^ (z >> np.uint64(27))) * _SPLIT_M2
        z = z ^ (z >> np.uint64(31))
    return z
