"""Partition quality metrics, diameter estimation, and cross-method ratios.

Cut conventions: the global edge cut counts each undirected edge once, while
the per-part cut counts a cut edge toward *both* endpoint parts (so the sum
of per-part cuts is twice the global cut).  ``scaled_max_cut`` normalizes the
max per-part cut by the average cut per part (edge_cut / p);
``scaled_max_cut_alt`` normalizes by the average edges per part (m / p).
Both are reported because either reading of "average edges per part" is
defensible.

The distributed variants compute the same quantities from per-task local
views: every edge is counted exactly once by the task owning its lower-id
endpoint.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError
from .graph import GlobalGraph, LocalGraph
from .seeds import rng_for

REPORT_SCHEMA_VERSION = 1


def _check_parts(g: GlobalGraph, parts: np.ndarray) -> np.ndarray:
    parts = np.asarray(parts, dtype=np.int64)
    if len(parts) != g.num_vertices:
        raise InputError(f"partition length {len(parts)} != vertex count {g.num_vertices}")
    return parts


def edge_cut(g: GlobalGraph, parts) -> int:
    """Number of undirected edges whose endpoints are in different parts."""
    parts = _check_parts(g, parts)
    src = np.repeat(np.arange(g.num_vertices), g.degrees)
    return int((parts[src] != parts[g.nbrs]).sum()) // 2


def max_part_cut(g: GlobalGraph, parts) -> tuple[int, int]:
    """(max over parts of cut edges incident to the part, argmax part).

    Ties break to the lower part index.
    """
    parts = _check_parts(g, parts)
    p = int(parts.max()) + 1 if len(parts) else 1
    per_part = per_part_cut(g, parts, p)
    winner = int(per_part.argmax())
    return int(per_part[winner]), winner


def per_part_cut(g: GlobalGraph, parts, num_parts: int) -> np.ndarray:
    """Cut edges incident to each part (each cut edge counts toward both endpoint parts)."""
    parts = _check_parts(g, parts)
    src = np.repeat(np.arange(g.num_vertices), g.degrees)
    mask = (src < g.nbrs) & (parts[src] != parts[g.nbrs])
    return np.bincount(parts[src][mask], minlength=num_parts) + np.bincount(parts[g.nbrs][mask], minlength=num_parts)


def per_part_sizes(g: GlobalGraph, parts, num_parts: int) -> tuple[np.ndarray, np.ndarray]:
    """(vertices per part, intra-part edges per part)."""
    parts = _check_parts(g, parts)
    verts = np.bincount(parts, minlength=num_parts)
    src = np.repeat(np.arange(g.num_vertices), g.degrees)
    mask = (src < g.nbrs) & (parts[src] == parts[g.nbrs])
    intra = np.bincount(parts[src][mask], minlength=num_parts)
    return verts, intra


def imbalance(g: GlobalGraph, parts, num_parts: int | None = None) -> tuple[float, float]:
    """(vertex imbalance, edge imbalance): max part size over the p-way average.

    Edge imbalance counts intra-part edges; with no edges it is 0.
    """
    parts = _check_parts(g, parts)
    p = num_parts if num_parts is not None else int(parts.max()) + 1
    verts, intra = per_part_sizes(g, parts, p)
    v_imb = float(verts.max() * p / g.num_vertices) if g.num_vertices else 0.0
    e_imb = float(intra.max() * p / g.num_edges) if g.num_edges else 0.0
    return v_imb, e_imb


# ---------------------------------------------------------------------------
# distributed counterparts (owned edges only, lower-id rule)


def per_task_counts(lg: LocalGraph, parts: np.ndarray, num_parts: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """This task's exact contribution to (vertices, intra edges, cut incidence) per part."""
    a = parts[lg.scan_src]
    b = parts[lg.scan_dst]
    same = a == b
    verts = np.bincount(parts[: lg.num_owned], minlength=num_parts)
    intra = np.bincount(a[same], minlength=num_parts)
    cut = np.bincount(a[~same], minlength=num_parts) + np.bincount(b[~same], minlength=num_parts)
    return verts, intra, cut


def edge_cut_distributed(local_graphs: Sequence[LocalGraph], parts_arrays: Sequence[np.ndarray]) -> int:
    total = 0
    for lg, parts in zip(local_graphs, parts_arrays):
        total += int((parts[lg.scan_src] != parts[lg.scan_dst]).sum())
    return total


# ---------------------------------------------------------------------------
# diameter estimation


def _bfs_levels(g: GlobalGraph, start: int, within: np.ndarray | None = None) -> np.ndarray:
    """Distance from ``start`` (-1 where unreachable); ``within`` restricts the search."""
    dist = np.full(g.num_vertices, -1, dtype=np.int64)
    if within is not None:
        allowed = within
    else:
        allowed = np.ones(g.num_vertices, dtype=bool)
    dist[start] = 0
    frontier = np.array([start], dtype=np.int64)
    level = 0
    while len(frontier):
        counts = g.degrees[frontier]
        total = int(counts.sum())
        if total == 0:
            break
        gather = np.repeat(g.offsets[frontier] - np.cumsum(counts) + counts, counts) + np.arange(total, dtype=np.int64)
        nxt = np.unique(g.nbrs[gather])
        nxt = nxt[(dist[nxt] < 0) & allowed[nxt]]
        level += 1
        dist[nxt] = level
        frontier = nxt
    return dist


def connected_components(g: GlobalGraph) -> np.ndarray:
    """Component label per vertex."""
    labels = np.full(g.num_vertices, -1, dtype=np.int64)
    comp = 0
    for v in range(g.num_vertices):
        if labels[v] >= 0:
            continue
        dist = _bfs_levels(g, v)
        labels[dist >= 0] = comp
        comp += 1
    return labels


def approx_diameter(g: GlobalGraph, iterations: int = 10, seed: int = 0) -> int:
    """Lower bound on the diameter from iterative sweeps on the largest component.

    Each sweep runs a breadth-first search and restarts from a random vertex
    of the farthest level; the maximum eccentricity seen is returned.
    """
    if g.num_vertices == 0:
        raise InputError("cannot estimate the diameter of an empty graph")
    labels = connected_components(g)
    largest = int(np.bincount(labels).argmax())
    within = labels == largest
    members = np.nonzero(within)[0]
    rng = rng_for(seed, "diameter")
    start = int(members[rng.integers(len(members))])
    best = 0
    for _ in range(iterations):
        dist = _bfs_levels(g, start, within)
        ecc = int(dist.max())
        best = max(best, ecc)
        farthest = np.nonzero(dist == ecc)[0]
        start = int(farthest[rng.integers(len(farthest))])
    return best


# ---------------------------------------------------------------------------
# cross-method comparison


def performance_ratio(results: Mapping[str, Mapping[str, float]]) -> dict[str, float]:
    """Geometric mean, per method, of its metric divided by the row best.

    ``results`` maps graph -> method -> metric (lower is better).  Missing
    cells are excluded pairwise with a warning; the row best is taken over
    the methods present in that row.
    """
    methods: list[str] = []
    for row in results.values():
        for m in row:
            if m not in methods:
                methods.append(m)
    logsums = {m: 0.0 for m in methods}
    counts = {m: 0 for m in methods}
    for graph, row in results.items():
        present = {m: v for m, v in row.items() if v is not None}
        missing = [m for m in methods if m not in present]
        if missing:
            warnings.warn(f"{graph}: no result for {', '.join(missing)}; excluded from their ratios", stacklevel=2)
        if not present:
            continue
        best = min(present.values())
        for m, v in present.items():
            # a zero-cut row contributes ratio 1 to every method that achieved it
            ratio = 1.0 if best == 0 and v == 0 else (math.inf if best == 0 else v / best)
            logsums[m] += math.log(ratio)
            counts[m] += 1
    return {m: math.exp(logsums[m] / counts[m]) if counts[m] else math.nan for m in methods}


# ---------------------------------------------------------------------------
# reports


@dataclass
class QualityReport:
    """Machine-readable summary of one partition of one graph."""

    num_vertices: int
    num_edges: int
    num_parts: int
    edge_cut: int
    cut_ratio: float
    max_part_cut: int
    max_part_cut_part: int
    scaled_max_cut: float
    scaled_max_cut_alt: float
    vertex_imbalance: float
    edge_imbalance: float
    parts_vertices: list[int]
    parts_intra_edges: list[int]
    parts_cut_edges: list[int]
    metadata: dict = field(default_factory=dict)
    schema_version: int = REPORT_SCHEMA_VERSION

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(asdict(self), indent=indent, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "QualityReport":
        data = json.loads(text)
        version = data.get("schema_version")
        if version != REPORT_SCHEMA_VERSION:
            raise InputError(f"unsupported report schema version {version}")
        return cls(**data)


def build_report(g: GlobalGraph, parts, num_parts: int, metadata: dict | None = None) -> QualityReport:
    parts = _check_parts(g, parts)
    if len(parts) and (parts.min() < 0 or parts.max() >= num_parts):
        raise InputError(f"part labels must lie in [0, {num_parts})")
    cut = edge_cut(g, parts)
    per_cut = per_part_cut(g, parts, num_parts)
    winner = int(per_cut.argmax())
    verts, intra = per_part_sizes(g, parts, num_parts)
    v_imb = float(verts.max() * num_parts / g.num_vertices) if g.num_vertices else 0.0
    e_imb = float(intra.max() * num_parts / g.num_edges) if g.num_edges else 0.0
    max_cut = int(per_cut[winner])
    return QualityReport(
        num_vertices=g.num_vertices,
        num_edges=g.num_edges,
        num_parts=num_parts,
        edge_cut=cut,
        cut_ratio=cut / g.num_edges if g.num_edges else 0.0,
        max_part_cut=max_cut,
        max_part_cut_part=winner,
        scaled_max_cut=max_cut / (cut / num_parts) if cut else 0.0,
        scaled_max_cut_alt=max_cut / (g.num_edges / num_parts) if g.num_edges else 0.0,
        vertex_imbalance=v_imb,
        edge_imbalance=e_imb,
        parts_vertices=verts.tolist(),
        parts_intra_edges=intra.tolist(),
        parts_cut_edges=per_cut.tolist(),
        metadata=metadata or {},
    )


CSV_FIELDS = [
    "method",
    "edge_cut",
    "cut_ratio",
    "max_part_cut",
    "scaled_max_cut",
    "scaled_max_cut_alt",
    "vertex_imbalance",
    "edge_imbalance",
    "cut_performance_ratio",
    "max_cut_performance_ratio",
]


def write_method_table(path: str, reports: Mapping[str, QualityReport], ratios: Mapping[str, Mapping[str, float]]) -> None:
    """CSV table comparing methods on one graph."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for method, rep in reports.items():
            writer.writerow(
                {
                    "method": method,
                    "edge_cut": rep.edge_cut,
                    "cut_ratio": f"{rep.cut_ratio:.6f}",
                    "max_part_cut": rep.max_part_cut,
                    "scaled_max_cut": f"{rep.scaled_max_cut:.6f}",
                    "scaled_max_cut_alt": f"{rep.scaled_max_cut_alt:.6f}",
                    "vertex_imbalance": f"{rep.vertex_imbalance:.6f}",
                    "edge_imbalance": f"{rep.edge_imbalance:.6f}",
                    "cut_performance_ratio": f"{ratios.get('edge_cut', {}).get(method, math.nan):.6f}",
                    "max_cut_performance_ratio": f"{ratios.get('max_part_cut', {}).get(method, math.nan):.6f}",
                }
            )
