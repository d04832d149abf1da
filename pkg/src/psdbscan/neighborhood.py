"""Point sets and epsilon-radius adjacency.

Holds the immutable dataset, answers radius queries either by brute-force
distance scan or through a uniform grid index, and ingests precomputed
adjacency given as an edge list.  Graphs produced here are symmetric,
self-inclusive (every point is its own neighbor) and use the closed ball
(distance <= eps).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

# Grid cells beyond this dimension cost more to enumerate (3^d candidate
# cells) than the brute-force scan saves.
_GRID_MAX_DIM = 6


@dataclass(frozen=True)
class Dataset:
    """An indexed set of d-dimensional points; point i is row i of `coords`."""

    coords: np.ndarray  # shape (n, dim), float64

    @staticmethod
    def from_coords(coords) -> "Dataset":
        """Validate and wrap an (n, d) array of coordinates."""
        arr = np.asarray(coords, dtype=np.float64)
        if arr.ndim != 2:
            raise InputError(f"coordinates must be 2-dimensional, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"need at least one point and one dimension, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise InputError("coordinates contain NaN or Inf")
        return Dataset(arr)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


@dataclass
class NeighborGraph:
    """Per-point sorted neighbor lists (each point's closed eps-ball)."""

    adjacency: list[np.ndarray]
    source: str  # "computed" or "linkage"
    eps: float | None = None

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def degrees(self) -> np.ndarray:
        """Neighborhood sizes, self included."""
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)


def _check_point_id(p: int, n: int) -> None:
    if not 0 <= p < n:
        raise InputError(f"point id {p} out of range [0, {n})")


def _check_eps(eps: float) -> None:
    if not (eps > 0):
        raise InputError(f"eps must be positive, got {eps}")


class GridIndex:
    """Uniform grid with cell side eps; exact radius queries via the 3^d
    neighboring cells."""

    def __init__(self, dataset: Dataset, eps: float):
        _check_eps(eps)
        self.dataset = dataset
        self.eps = float(eps)
        keys = np.floor(dataset.coords / self.eps).astype(np.int64)
        cells: dict[tuple, list[int]] = {}
        for i, key in enumerate(map(tuple, keys)):
            cells.setdefault(key, []).append(i)
        self._cells = {k: np.asarray(v, dtype=np.int64) for k, v in cells.items()}
        self._keys = keys
        self._offsets = list(itertools.product((-1, 0, 1), repeat=dataset.dim))

    def candidates(self, cell_key: tuple) -> np.ndarray:
        found = [
            self._cells[k]
            for off in self._offsets
            if (k := tuple(c + o for c, o in zip(cell_key, off))) in self._cells
        ]
        return np.concatenate(found) if found else np.empty(0, dtype=np.int64)

    def query(self, p: int) -> np.ndarray:
        _check_point_id(p, self.dataset.n)
        cand = self.candidates(tuple(self._keys[p]))
        coords = self.dataset.coords
        d = np.linalg.norm(coords[cand] - coords[p], axis=1)
        return np.sort(cand[d <= self.eps])


def query_radius(dataset: Dataset, p: int, eps: float, index: GridIndex | None = None) -> np.ndarray:
    """Ids of all points within distance eps of point p (p included), ascending.

    With `index` (a GridIndex built for the same eps) the query is grid
    accelerated; otherwise it is a brute-force scan.  Both paths are exact.
    """
    _check_point_id(p, dataset.n)
    _check_eps(eps)
    if index is not None:
        return index.query(p)
    d = np.linalg.norm(dataset.coords - dataset.coords[p], axis=1)
    return np.nonzero(d <= eps)[0].astype(np.int64)


def build_neighbor_graph(dataset: Dataset, eps: float, method: str = "auto") -> NeighborGraph:
    """Batch query_radius over every point.

    method: "grid" (cell-batched exact grid index), "brute" (full distance
    scans), or "auto" (grid unless the dimension makes 3^d cell enumeration
    wasteful).  All methods return identical graphs.
    """
    _check_eps(eps)
    if method not in ("auto", "grid", "brute"):
        raise InputError(f"unknown method {method!r}")
    if method == "auto":
        method = "grid" if dataset.dim <= _GRID_MAX_DIM else "brute"
    if method == "brute":
        adjacency = [query_radius(dataset, p, eps) for p in range(dataset.n)]
        return NeighborGraph(adjacency, source="computed", eps=float(eps))

    # Grid path, batched per cell: all points of a cell share one candidate set.
    index = GridIndex(dataset, eps)
    coords = dataset.coords
    adjacency: list[np.ndarray | None] = [None] * dataset.n
    for key, members in index._cells.items():
        cand = index.candidates(key)
        diff = coords[members][:, None, :] - coords[cand][None, :, :]
        within = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)) <= eps
        for row, p in enumerate(members):
            adjacency[p] = np.sort(cand[within[row]])
    return NeighborGraph(adjacency, source="computed", eps=float(eps))


def mean_degree(dataset: Dataset, eps: float) -> float:
    """Average eps-neighborhood size with self excluded."""
    graph = build_neighbor_graph(dataset, eps)
    return float(graph.degrees().mean() - 1.0)


def ingest_linkage(edges, n: int) -> NeighborGraph:
    """Neighbor graph from an explicit edge list: symmetric closure of the
    edges plus self-loops, duplicates collapsed."""
    if n < 0:
        raise InputError(f"point count must be nonnegative, got {n}")
    neighbor_sets: list[set[int]] = [{i} for i in range(n)]
    for a, b in edges:
        a, b = int(a), int(b)
        if not (0 <= a < n and 0 <= b < n):
            raise InputError(f"edge ({a}, {b}) references an id outside [0, {n})")
        neighbor_sets[a].add(b)
        neighbor_sets[b].add(a)
    adjacency = [np.asarray(sorted(s), dtype=np.int64) for s in neighbor_sets]
    return NeighborGraph(adjacency, source="linkage")
