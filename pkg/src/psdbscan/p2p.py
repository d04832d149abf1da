"""Peer-to-peer disjoint-set merge baseline with message accounting.

Models the classic distributed-memory merge phase: every worker unions its
owned core points locally, then sends one merge request per owned
core-to-remote-core adjacency to the remote point's owner.  An owner
processing a request walks the local parent chain; whenever the chain
leaves its ownership, or the surviving root lives elsewhere, the request
is forwarded to that owner and the hop count grows.  Every request and
every forward is one counted message.

The simulation is single-threaded and processed in a fixed sort order so
message counts are exactly reproducible.  Clustering output is
canonicalized the same way as the reference implementation; only the
communication pattern differs from the parameter-server engine.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ProtocolError
from .metrics import CommMetrics, RoundStats
from .neighborhood import NeighborGraph
from .ps import _resolve_graph, partition_points
from .sequential import NOISE, ClusteringResult, assign_border_label, core_points


@dataclass(frozen=True)
class MergeRequest:
    from_worker: int
    to_worker: int
    point_pair: tuple[int, int]  # (local id at sender, id handled by receiver)
    hop: int


class _P2PWorker:
    """Owns a slice of points; parent entries are authoritative only for
    owned ids and may point at remote ids."""

    def __init__(self, worker_id: int, owned: np.ndarray, n: int, owner_of: np.ndarray):
        self.worker_id = worker_id
        self.owned = owned
        self.owner_of = owner_of
        self.parent = np.arange(n, dtype=np.int64)

    def owns(self, x: int) -> bool:
        return self.owner_of[x] == self.worker_id

    def walk_to_root(self, x: int) -> tuple[int, bool]:
        """Follow parents through owned territory.  Returns (node, is_root):
        either a local root, or the first remote node on the chain."""
        path = []
        steps = 0
        while True:
            p = int(self.parent[x])
            if p == x:
                for q in path:
                    self.parent[q] = x
                return x, True
            if not self.owns(p):
                for q in path:
                    self.parent[q] = p
                return p, False
            path.append(x)
            x = p
            steps += 1
            if steps > self.parent.shape[0]:
                raise ProtocolError("cycle in peer-to-peer parent chains")

    def link(self, a: int, b: int) -> tuple[int, int] | None:
        """Merge a's tree (a is owned) with node b.  Returns (node, target)
        for a request that must continue at another owner, else None."""
        node, is_root = self.walk_to_root(a)
        if not is_root:
            return node, b  # chain left our territory: route onward
        root = node
        if root == b:
            return None
        if b > root:
            self.parent[root] = b  # adopt the larger id as parent
            return None
        # Surviving root is ours; the other side must attach underneath it.
        if self.owns(b):
            return self.link(b, root)
        return b, root


def run_p2p_dbscan(
    data,
    eps: float | None = None,
    *,
    min_points: int,
    num_workers: int = 1,
    seed: int = 0,
    partition: str = "random",
) -> tuple[ClusteringResult, CommMetrics]:
    """Cluster via peer-to-peer merging; the result must match the
    sequential reference, the metrics count merge requests and forwards."""
    if min_points < 1:
        raise InputError(f"min_points must be >= 1, got {min_points}")
    graph = _resolve_graph(data, eps)
    n = graph.n
    owned_sets = partition_points(n, num_workers, seed, partition)
    owner_of = np.empty(n, dtype=np.int64)
    for w, owned in enumerate(owned_sets):
        owner_of[owned] = w
    workers = [_P2PWorker(w, owned, n, owner_of) for w, owned in enumerate(owned_sets)]

    core = core_points(graph, min_points)
    metrics = CommMetrics()

    # Local unions plus one request per owned-core -> remote-core adjacency.
    requests: list[MergeRequest] = []
    for w in workers:
        for p_ in w.owned:
            p = int(p_)
            if not core[p]:
                continue
            for q_ in graph.adjacency[p]:
                q = int(q_)
                if q == p or not core[q]:
                    continue
                if w.owns(q):
                    if p < q:  # each local edge once
                        _apply_local_union(w, p, q)
                else:
                    requests.append(MergeRequest(w.worker_id, int(owner_of[q]), (p, q), 0))

    queue = deque(sorted(requests, key=lambda r: (r.from_worker, r.point_pair)))
    while queue:
        batch = len(queue)
        pushed = 0
        for _ in range(batch):
            req = queue.popleft()
            pushed += 1
            follow = workers[req.to_worker].link(req.point_pair[1], req.point_pair[0])
            if follow is not None:
                node, target = follow
                queue.append(
                    MergeRequest(req.to_worker, int(owner_of[node]), (target, node), req.hop + 1)
                )
        metrics.record(RoundStats("merge", entries_pushed=pushed))

    labels = _resolve_labels(graph, workers, owner_of, core)
    num_clusters = int(np.unique(labels[labels != NOISE]).size)
    result = ClusteringResult(labels=labels, num_clusters=num_clusters, core_flags=core)
    return result, metrics


def _apply_local_union(worker: _P2PWorker, p: int, q: int) -> None:
    out = worker.link(p, q)
    # A purely local union can still route if prior merges hung remote
    # pointers on this tree; those messages belong to the request phase.
    if out is not None:
        raise ProtocolError("local union escaped worker territory before any requests")


def _resolve_labels(
    graph: NeighborGraph, workers: list[_P2PWorker], owner_of: np.ndarray, core: np.ndarray
) -> np.ndarray:
    """Stitch the per-owner parent entries into one forest and read labels off
    it.  This is the output phase; it exchanges no counted messages."""
    n = owner_of.shape[0]
    parent = np.empty(n, dtype=np.int64)
    for w in workers:
        parent[w.owned] = w.parent[w.owned]

    root_of = np.full(n, -1, dtype=np.int64)

    def find(x: int) -> int:
        path = []
        while root_of[x] == -1 and parent[x] != x:
            path.append(x)
            x = int(parent[x])
            if len(path) > n:
                raise ProtocolError("cycle in merged parent forest")
        r = int(root_of[x]) if root_of[x] != -1 else x
        for q in path:
            root_of[q] = r
        return r

    labels = np.full(n, NOISE, dtype=np.int64)
    for p in range(n):
        if core[p]:
            labels[p] = find(p)
    for p in range(n):
        if core[p] or labels[p] != NOISE:
            continue
        neigh = graph.adjacency[p]
        core_neigh = neigh[core[neigh]]
        if core_neigh.size:
            labels[p] = assign_border_label(labels[core_neigh])
    return labels
