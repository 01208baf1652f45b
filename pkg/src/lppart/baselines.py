"""Reference partitioners: random, contiguous vertex blocks, contiguous edge blocks.

All three return a total assignment of [0, n) onto [0, p) with every part
nonempty.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .graph import GlobalGraph, block_cuts
from .seeds import rng_for


def random_partition(num_vertices: int, num_parts: int, seed: int = 0) -> np.ndarray:
    """Uniform i.i.d. parts; the first p vertices are assigned cyclically so
    no part can come out empty at small n."""
    if num_parts < 1:
        raise ConfigError(f"part count must be >= 1, got {num_parts}")
    if num_parts > num_vertices:
        raise ConfigError(f"part count {num_parts} exceeds vertex count {num_vertices}")
    rng = rng_for(seed, "baseline")
    parts = rng.integers(0, num_parts, size=num_vertices, dtype=np.int64)
    parts[:num_parts] = np.arange(num_parts)
    return parts


def vertex_block_partition(num_vertices: int, num_parts: int) -> np.ndarray:
    """Contiguous id ranges with sizes differing by at most one."""
    if num_parts < 1:
        raise ConfigError(f"part count must be >= 1, got {num_parts}")
    if num_parts > num_vertices:
        raise ConfigError(f"part count {num_parts} exceeds vertex count {num_vertices}")
    cuts = block_cuts(num_vertices, num_parts)
    return (np.searchsorted(cuts, np.arange(num_vertices), side="right") - 1).astype(np.int64)


def edge_block_partition(g: GlobalGraph, num_parts: int) -> np.ndarray:
    """Contiguous ranges balancing incident-edge mass.

    Greedy sweep in id order: a part closes once its cumulative degree mass
    reaches its share of 2m, provided enough vertices remain to keep every
    later part nonempty.
    """
    n, p = g.num_vertices, num_parts
    if p < 1:
        raise ConfigError(f"part count must be >= 1, got {p}")
    if p > n:
        raise ConfigError(f"part count {p} exceeds vertex count {n}")
    target = 2.0 * g.num_edges / p
    degrees = g.degrees
    parts = np.empty(n, dtype=np.int64)
    cur = 0
    mass = 0
    for v in range(n):
        parts[v] = cur
        mass += degrees[v]
        remaining = n - v - 1
        if cur < p - 1 and mass >= (cur + 1) * target and remaining >= p - 1 - cur:
            cur += 1
    if cur < p - 1:
        # degree mass ran short; force the trailing vertices into the open parts
        parts[n - (p - 1 - cur) :] = np.arange(cur + 1, p)
    return parts
