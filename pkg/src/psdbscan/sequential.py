"""Single-process reference DBSCAN.

Establishes ground-truth clusters, noise, and a deterministic border
assignment that the parallel engines are required to reproduce exactly.

Labeling is canonical: every clustered point carries the maximum core-point
id of its cluster.  Border points (non-core with at least one core
neighbor) take the largest canonical label among their core neighbors;
border points never merge clusters.  Everything else is NOISE.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsu import DisjointSet
from .errors import InputError
from .neighborhood import NeighborGraph

NOISE = -1


@dataclass
class ClusteringResult:
    labels: np.ndarray      # length n, cluster label or NOISE
    num_clusters: int
    core_flags: np.ndarray  # length n, bool

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClusteringResult):
            return NotImplemented
        return (
            self.num_clusters == other.num_clusters
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.core_flags, other.core_flags)
        )


def core_points(graph: NeighborGraph, min_points: int) -> np.ndarray:
    """Boolean mask of points whose neighborhood (self included) has at
    least min_points members."""
    if min_points < 1:
        raise InputError(f"min_points must be >= 1, got {min_points}")
    return graph.degrees() >= min_points


def assign_border_label(core_neighbor_labels: np.ndarray) -> int:
    """Deterministic border rule: largest canonical label among adjacent cores."""
    return int(core_neighbor_labels.max())


def sequential_dbscan(graph: NeighborGraph, min_points: int) -> ClusteringResult:
    """Reference clustering over a symmetric self-inclusive neighbor graph."""
    n = graph.n
    core = core_points(graph, min_points)
    ds = DisjointSet(n)
    for p in range(n):
        if not core[p]:
            continue
        for q in graph.adjacency[p]:
            if core[q]:
                ds.union(p, int(q))

    labels = np.full(n, NOISE, dtype=np.int64)
    for p in range(n):
        if core[p]:
            labels[p] = ds.find(p)  # root is the max core id of the cluster
    for p in range(n):
        if core[p]:
            continue
        neigh = graph.adjacency[p]
        core_neigh = neigh[core[neigh]]
        if core_neigh.size:
            labels[p] = assign_border_label(labels[core_neigh])

    num_clusters = int(np.unique(labels[labels != NOISE]).size)
    return ClusteringResult(labels=labels, num_clusters=num_clusters, core_flags=core)
