"""Whole-graph CSR storage, vertex-to-task distributions, and per-task local graphs.

The whole graph is an undirected multigraph in compressed sparse row form:
every undirected edge appears in both endpoints' neighbor lists.  Self-loops
are dropped at construction; duplicate edges are kept (deduplication is a
caller decision).  A ``Distribution`` assigns every vertex to exactly one
owning task; ``distribute`` then builds one ``LocalGraph`` per task holding
the owned vertices, their adjacency re-indexed to task-local slots, and ghost
entries for one-hop neighbors owned elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InputError
from .seeds import mix64

BLOCK = "block"
RANDOM_HASH = "random-hash"


@dataclass(frozen=True)
class GlobalGraph:
    """Symmetric CSR over dense vertex ids [0, n)."""

    num_vertices: int
    num_edges: int  # undirected edge count; neighbor list has 2 * num_edges entries
    offsets: np.ndarray  # int64, length num_vertices + 1, nondecreasing
    nbrs: np.ndarray  # int64, length 2 * num_edges

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def neighbors(self, v: int) -> np.ndarray:
        return self.nbrs[self.offsets[v] : self.offsets[v + 1]]


def build_csr(pairs, num_vertices: int) -> GlobalGraph:
    """Build a symmetric CSR from (u, v) pairs.

    Self-loops are dropped; duplicate pairs are retained with multiplicity.
    Raises ``InputError`` naming the first offending pair if an endpoint is
    outside [0, num_vertices).
    """
    n = int(num_vertices)
    if n < 0:
        raise InputError(f"vertex count must be nonnegative, got {n}")
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InputError("edge list must be a sequence of (u, v) pairs")

    bad = (arr < 0) | (arr >= n)
    if bad.any():
        idx = int(np.nonzero(bad.any(axis=1))[0][0])
        u, v = arr[idx]
        raise InputError(f"edge {idx}: endpoint out of range [0, {n}) in pair ({u}, {v})")

    keep = arr[:, 0] != arr[:, 1]
    arr = arr[keep]
    m = arr.shape[0]

    src = np.concatenate([arr[:, 0], arr[:, 1]])
    dst = np.concatenate([arr[:, 1], arr[:, 0]])
    order = np.argsort(src, kind="stable")
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
    return GlobalGraph(num_vertices=n, num_edges=m, offsets=offsets, nbrs=dst[order])


@dataclass(frozen=True)
class Distribution:
    """Pure vertex -> owning-task function.

    ``block`` owns contiguous id ranges whose sizes differ by at most one
    (the ``cuts`` array holds range starts); ``random-hash`` owns
    ``mix64(v, seed) % num_tasks``.
    """

    kind: str
    num_tasks: int
    cuts: np.ndarray | None = None  # block only: range starts, length num_tasks + 1
    seed: int = 0  # random-hash only

    def owner_of(self, vertices) -> np.ndarray:
        v = np.asarray(vertices, dtype=np.int64)
        if self.kind == BLOCK:
            return (np.searchsorted(self.cuts, v, side="right") - 1).astype(np.int64)
        return (mix64(v, self.seed) % np.uint64(self.num_tasks)).astype(np.int64)


def block_cuts(num_vertices: int, num_tasks: int) -> np.ndarray:
    """Range starts for contiguous blocks covering [0, n), sizes differing by <= 1."""
    base, extra = divmod(num_vertices, num_tasks)
    sizes = np.full(num_tasks, base, dtype=np.int64)
    sizes[:extra] += 1
    cuts = np.zeros(num_tasks + 1, dtype=np.int64)
    np.cumsum(sizes, out=cuts[1:])
    return cuts


def make_distribution(kind: str, num_vertices: int, num_tasks: int, seed: int = 0) -> Distribution:
    if num_tasks < 1:
        raise ConfigError(f"task count must be >= 1, got {num_tasks}")
    if num_tasks > num_vertices:
        raise ConfigError(f"task count {num_tasks} exceeds vertex count {num_vertices}; every task must own a vertex")
    if kind == BLOCK:
        return Distribution(kind=BLOCK, num_tasks=num_tasks, cuts=block_cuts(num_vertices, num_tasks))
    if kind == RANDOM_HASH:
        return Distribution(kind=RANDOM_HASH, num_tasks=num_tasks, seed=seed)
    raise ConfigError(f"unknown distribution kind {kind!r}")


@dataclass
class LocalGraph:
    """One task's share of the graph.

    Local slots [0, num_owned) are the owned vertices in ascending global id;
    slots [num_owned, num_owned + num_ghosts) are ghosts (one-hop neighbors
    owned elsewhere), also ascending.  ``nbr_slots`` holds the local CSR
    adjacency of owned vertices in slot indices.  ``degrees`` carries the
    *global* degree of every slot so weighting functions can read ghost
    degrees without communication.
    """

    task: int
    num_tasks: int
    owned: np.ndarray  # global ids, ascending
    offsets: np.ndarray  # local CSR offsets over owned, length num_owned + 1
    nbr_slots: np.ndarray  # neighbor local slot per directed edge
    ghosts: np.ndarray  # global ids of ghosts, ascending
    local_to_global: np.ndarray  # owned ++ ghosts
    global_to_local: np.ndarray  # length n; -1 where absent
    slot_owner: np.ndarray  # owning task per local slot
    degrees: np.ndarray  # global degree per local slot

    # static sweep caches, filled by distribute()
    edge_src: np.ndarray = field(default=None, repr=False)  # owned local row per directed edge
    scan_src: np.ndarray = field(default=None, repr=False)  # rows of edges this task counts (gid(src) < gid(dst))
    scan_dst: np.ndarray = field(default=None, repr=False)  # matching neighbor slots

    @property
    def num_owned(self) -> int:
        return len(self.owned)

    @property
    def num_ghosts(self) -> int:
        return len(self.ghosts)

    @property
    def num_slots(self) -> int:
        return len(self.local_to_global)

    @property
    def ghost_owner(self) -> np.ndarray:
        return self.slot_owner[self.num_owned :]

    def neighbors(self, local_row: int) -> np.ndarray:
        return self.nbr_slots[self.offsets[local_row] : self.offsets[local_row + 1]]


def _build_local(g: GlobalGraph, dist: Distribution, owners: np.ndarray, task: int) -> LocalGraph:
    owned = np.nonzero(owners == task)[0].astype(np.int64)
    starts = g.offsets[owned]
    counts = g.offsets[owned + 1] - starts
    offsets = np.zeros(len(owned) + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])

    total = int(offsets[-1])
    gather = np.repeat(starts - offsets[:-1], counts) + np.arange(total, dtype=np.int64) if total else np.empty(0, dtype=np.int64)
    nbr_gids = g.nbrs[gather]

    ghost_mask = owners[nbr_gids] != task
    ghosts = np.unique(nbr_gids[ghost_mask])

    n = g.num_vertices
    global_to_local = np.full(n, -1, dtype=np.int64)
    global_to_local[owned] = np.arange(len(owned), dtype=np.int64)
    global_to_local[ghosts] = len(owned) + np.arange(len(ghosts), dtype=np.int64)

    local_to_global = np.concatenate([owned, ghosts])
    slot_owner = np.concatenate([np.full(len(owned), task, dtype=np.int64), owners[ghosts]])
    degrees = np.diff(g.offsets)[local_to_global]
    nbr_slots = global_to_local[nbr_gids]
    edge_src = np.repeat(np.arange(len(owned), dtype=np.int64), counts)

    # Edges this task is responsible for counting exactly once globally:
    # the direction whose source global id is smaller (lower-owner rule).
    src_gids = owned[edge_src]
    mask = src_gids < nbr_gids
    return LocalGraph(
        task=task,
        num_tasks=dist.num_tasks,
        owned=owned,
        offsets=offsets,
        nbr_slots=nbr_slots,
        ghosts=ghosts,
        local_to_global=local_to_global,
        global_to_local=global_to_local,
        slot_owner=slot_owner,
        degrees=degrees,
        edge_src=edge_src,
        scan_src=edge_src[mask],
        scan_dst=nbr_slots[mask],
    )


def distribute(g: GlobalGraph, dist: Distribution) -> list[LocalGraph]:
    """Split ``g`` into one LocalGraph per task under ``dist``."""
    if dist.num_tasks > g.num_vertices:
        raise ConfigError(f"task count {dist.num_tasks} exceeds vertex count {g.num_vertices}; every task must own a vertex")
    owners = dist.owner_of(np.arange(g.num_vertices, dtype=np.int64))
    return [_build_local(g, dist, owners, t) for t in range(dist.num_tasks)]
