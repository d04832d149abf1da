"""Parameter-server parallel DBSCAN engine.

W workers each own a disjoint slice of the points.  A simulated server
holds two global vectors: a core-point bitset (merged once by OR-reduce)
and a label vector (merged every round by synchronous max-reduce).  The
label loop runs in barrier-synchronized rounds:

    check fixpoint -> propagate fragment maxima -> push dirty labels ->
    max-reduce on server -> pull full vector -> global union

Global union treats label values as parent pointers (for a clustered point
the label is always >= its id, so chains ascend) and rewrites every tracked
index to the root of its chain in the pulled snapshot, scanning ids in
descending order so each chain resolves in O(1) amortized lookups.  This
path compression is what keeps the number of label rounds small and nearly
independent of the worker count.

Workers push sparsely (only entries dirtied since the last push, only for
points they own) and pull the full vector; the metrics record both so the
asymmetry stays visible.  Labels of the points a worker has merely seen
(neighbors it does not own) are refreshed from pulls alone.

Two execution modes share all of the per-worker code: "simulated" steps
workers round-robin on one thread and is the reference for golden traces;
"concurrent" runs one thread per worker with real barriers.  Both must
produce bit-identical results and identical push counts.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .dsu import DisjointSet
from .errors import InputError, ProtocolError
from .metrics import CommMetrics, RoundStats
from .neighborhood import Dataset, NeighborGraph, build_neighbor_graph
from .sequential import NOISE, ClusteringResult


# ---------------------------------------------------------------------------
# state


@dataclass
class CoreRecord:
    """Bitset over all points marking which are core."""

    bits: np.ndarray  # bool, length n

    @staticmethod
    def zeros(n: int) -> "CoreRecord":
        return CoreRecord(np.zeros(n, dtype=bool))


class LabelVector:
    """Full-length label array plus the set of indices dirtied since the
    last push.  Non-noise labels only ever increase."""

    def __init__(self, n: int):
        self.labels = np.arange(n, dtype=np.int64)
        self._dirty = np.zeros(n, dtype=bool)

    def mark_dirty(self, indices: np.ndarray) -> None:
        self._dirty[indices] = True

    def dirty_count(self) -> int:
        return int(self._dirty.sum())

    def take_dirty(self) -> tuple[np.ndarray, np.ndarray]:
        """Sparse (indices, values) of dirty entries; clears the dirty set."""
        idx = np.nonzero(self._dirty)[0]
        self._dirty[idx] = False
        return idx, self.labels[idx].copy()


@dataclass
class _Fragment:
    root: int
    members: np.ndarray        # every core id the worker has seen in this fragment
    owned_members: np.ndarray  # the subset this worker owns


@dataclass
class WorkerState:
    worker_id: int
    owned: np.ndarray                    # sorted point ids owned by this worker
    adjacency: dict[int, np.ndarray]     # neighbor lists for owned points only
    n: int
    local_core: CoreRecord = None
    local_clusters: DisjointSet = None   # spans every id the worker has seen
    local_label: LabelVector = None
    fragments: list[_Fragment] = field(default_factory=list)
    borders: dict[int, np.ndarray] = field(default_factory=dict)  # owned border -> core neighbors
    noise: np.ndarray = None             # owned ids classified as noise

    def __post_init__(self):
        self.local_core = CoreRecord.zeros(self.n)
        self.local_clusters = DisjointSet(self.n)
        self.local_label = LabelVector(self.n)


class ServerState:
    """Simulated server: global core record, global label vector, barrier
    bookkeeping, and the monotonicity audit counters."""

    def __init__(self, n: int, num_workers: int):
        self.n = n
        self.num_workers = num_workers
        self.global_core: CoreRecord | None = None
        self.global_label = np.arange(n, dtype=np.int64)
        self.round = 0
        self.finished_flags = [False] * num_workers
        self.label_barrier_done = False
        self.audit_rounds = 0
        self.audit_violations = 0

    def init_labels(self, noise_indices: np.ndarray, border_indices: np.ndarray, border_labels: np.ndarray) -> None:
        """One-time initialization exchange after local merging.

        Noise classification is final once global core records exist.  Core
        entries keep their own id; border entries start at the owner's
        initial border label (the largest attached core id, which never
        exceeds the border's final label, so max-reduce stays sound on
        them); noise entries become NOISE.
        """
        self.global_label[noise_indices] = NOISE
        self.global_label[border_indices] = border_labels


# ---------------------------------------------------------------------------
# protocol operations


def partition_points(n: int, num_workers: int, seed: int = 0, strategy: str = "random") -> list[np.ndarray]:
    """Split point ids [0, n) into one owned set per worker.

    "contiguous" makes equal blocks (sizes differ by at most 1);
    "random" applies a seeded uniform shuffle before block-splitting.
    Every worker must own at least one point.
    """
    if num_workers < 1:
        raise InputError(f"num_workers must be >= 1, got {num_workers}")
    if num_workers > n:
        raise InputError(f"num_workers={num_workers} exceeds point count {n} (empty workers forbidden)")
    if strategy == "contiguous":
        return list(np.array_split(np.arange(n, dtype=np.int64), num_workers))
    if strategy == "random":
        perm = np.random.default_rng(seed).permutation(n).astype(np.int64)
        return [np.sort(chunk) for chunk in np.array_split(perm, num_workers)]
    raise InputError(f"unknown partition strategy {strategy!r}")


def build_workers(graph: NeighborGraph, owned_sets: list[np.ndarray]) -> list[WorkerState]:
    return [
        WorkerState(
            worker_id=w,
            owned=owned,
            adjacency={int(p): graph.adjacency[p] for p in owned},
            n=graph.n,
        )
        for w, owned in enumerate(owned_sets)
    ]


def mark_core(worker: WorkerState, min_points: int) -> None:
    """Set local core bits for owned points whose neighborhood (self
    included) has at least min_points members; all other bits stay 0."""
    for p in worker.owned:
        if len(worker.adjacency[int(p)]) >= min_points:
            worker.local_core.bits[p] = True


def or_reduce_core(server: ServerState, pushes: list[CoreRecord]) -> CoreRecord:
    """Barrier OR-reduce of all workers' local core records."""
    if len(pushes) != server.num_workers or any(p is None for p in pushes):
        raise ProtocolError(
            f"core barrier expects {server.num_workers} pushes, got {len([p for p in pushes if p is not None])}"
        )
    merged = np.zeros(server.n, dtype=bool)
    for record in pushes:
        np.logical_or(merged, record.bits, out=merged)
    server.global_core = CoreRecord(merged)
    return server.global_core


def local_merge(worker: WorkerState, global_core: CoreRecord) -> None:
    """Build the worker's local view of the clustering structure.

    Core-core adjacencies incident to owned points are unioned into the
    local disjoint set (the far endpoint need not be owned).  Owned
    non-core points become border attachments if they have a core neighbor
    and NOISE otherwise.  Border points never enter the disjoint set, so
    they cannot bridge clusters.
    """
    core = global_core.bits
    ds = worker.local_clusters
    seen_cores: set[int] = set()
    noise: list[int] = []
    for p_ in worker.owned:
        p = int(p_)
        neigh = worker.adjacency[p]
        core_neigh = neigh[core[neigh]]
        if core[p]:
            seen_cores.add(p)
            for q in core_neigh:
                ds.union(p, int(q))
                seen_cores.add(int(q))
        elif core_neigh.size:
            worker.borders[p] = core_neigh
            # A border's own id is not a cluster label; start it at the
            # largest attached core id so later maxima only refine it.
            worker.local_label.labels[p] = core_neigh.max()
        else:
            noise.append(p)
            worker.local_label.labels[p] = NOISE
    worker.noise = np.asarray(noise, dtype=np.int64)

    owned_mask = np.zeros(worker.n, dtype=bool)
    owned_mask[worker.owned] = True
    groups: dict[int, list[int]] = {}
    for c in seen_cores:
        groups.setdefault(ds.find(c), []).append(c)
    for root, members in sorted(groups.items()):
        members_arr = np.asarray(sorted(members), dtype=np.int64)
        owned_members = members_arr[owned_mask[members_arr]]
        if owned_members.size:  # fragments with no owned member are inert here
            worker.fragments.append(_Fragment(root, members_arr, owned_members))


def init_payload(worker: WorkerState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """What the worker contributes to the one-time label initialization:
    owned noise ids plus initial labels for owned borders."""
    border_idx = np.asarray(sorted(worker.borders), dtype=np.int64)
    return worker.noise, border_idx, worker.local_label.labels[border_idx]


def get_max_label(worker: WorkerState) -> tuple[bool, dict[int, int]]:
    """Fixpoint check plus plan: for each local fragment, the maximum over
    its members' current labels.  finished means nothing would change and
    no dirty entries are waiting to be pushed.  Read-only."""
    labels = worker.local_label.labels
    plan: dict[int, int] = {}
    changed = False
    for frag in worker.fragments:
        m = int(labels[frag.members].max())
        plan[frag.root] = m
        if not changed and bool((labels[frag.owned_members] != m).any()):
            changed = True
    if not changed:
        for b, attached in worker.borders.items():
            if int(labels[attached].max()) > labels[b]:
                changed = True
                break
    finished = not changed and worker.local_label.dirty_count() == 0
    return finished, plan


def propagate_max_label(worker: WorkerState, plan: dict[int, int]) -> None:
    """Adopt planned fragment maxima on owned members, then refresh owned
    border labels from their attached cores.  Changed indices become dirty."""
    labels = worker.local_label.labels
    for frag in worker.fragments:
        m = plan[frag.root]
        stale = frag.owned_members[labels[frag.owned_members] != m]
        if stale.size:
            labels[stale] = m
            worker.local_label.mark_dirty(stale)
    for b, attached in worker.borders.items():
        t = labels[attached].max()
        if t > labels[b]:  # border labels are written, never lowered
            labels[b] = t
            worker.local_label.mark_dirty(np.asarray([b]))


def max_reduce_labels(server: ServerState, pushes: list[tuple[np.ndarray, np.ndarray]]) -> int:
    """Element-wise max of all sparse pushes into the global label vector.

    NOISE never participates: pushing a NOISE value, or pushing any value
    for an index the server holds as NOISE, signals a core-record
    inconsistency.  Asserts per-index monotonicity of non-noise labels.
    Returns the number of entries pushed.
    """
    if len(pushes) != server.num_workers:
        raise ProtocolError(f"label barrier expects {server.num_workers} pushes, got {len(pushes)}")
    g = server.global_label
    before = g.copy()
    total = 0
    for idx, values in pushes:
        if idx.size == 0:
            continue
        if (values == NOISE).any():
            raise ProtocolError("worker pushed a NOISE value into max-reduce")
        if (g[idx] == NOISE).any():
            raise ProtocolError("push targets an index the server holds as NOISE")
        g[idx] = np.maximum(g[idx], values)
        total += int(idx.size)
    non_noise = before != NOISE
    server.audit_rounds += 1
    if (g[non_noise] < before[non_noise]).any():
        server.audit_violations += 1
        raise ProtocolError("non-noise global label decreased across a round")
    server.round += 1
    server.label_barrier_done = True
    return total


def pull_labels(server: ServerState, worker: WorkerState) -> np.ndarray:
    """Snapshot of the global label vector after the round's reduce barrier."""
    if not server.label_barrier_done:
        raise ProtocolError("pull before the label reduce barrier completed")
    return server.global_label


def compress_labels(snapshot: np.ndarray) -> np.ndarray:
    """Resolve every label chain in a snapshot to its root.

    Scans ids from high to low; since a clustered point's label is >= its
    id (borders may dip once, then chains ascend), each walk is short and
    the result array ends fully compressed.  A cycle means corrupted labels.
    """
    n = snapshot.shape[0]
    out = snapshot.copy()
    for i in range(n - 1, -1, -1):
        j = int(out[i])
        if j == NOISE or j == i:
            continue
        path = []
        steps = 0
        while out[j] != j:
            path.append(j)
            j = int(out[j])
            steps += 1
            if steps > n:
                raise ProtocolError("cycle detected while following label chains")
        out[i] = j
        for p in path:
            out[p] = j
    return out


def global_union(worker: WorkerState, global_label: np.ndarray, compressed: np.ndarray | None = None) -> None:
    """Replace the worker's view with the root-compressed snapshot and mark
    owned entries whose labels rose as dirty for the next push."""
    if compressed is None:
        compressed = compress_labels(global_label)
    old = worker.local_label.labels
    owned = worker.owned
    live = owned[old[owned] != NOISE]
    if (compressed[live] < old[live]).any():
        raise ProtocolError("global union would lower an owned label")
    changed = live[compressed[live] != old[live]]
    worker.local_label.labels = compressed.copy()
    worker.local_label.mark_dirty(changed)


# ---------------------------------------------------------------------------
# runners


def _resolve_graph(data, eps: float | None) -> NeighborGraph:
    if isinstance(data, Dataset):
        if eps is None:
            raise InputError("eps is required when clustering from coordinates")
        return build_neighbor_graph(data, eps)
    if isinstance(data, NeighborGraph):
        if eps is not None:
            raise InputError("eps has no effect on a precomputed neighbor graph")
        return data
    raise InputError(f"expected Dataset or NeighborGraph, got {type(data).__name__}")


def _canonicalize(server: ServerState) -> ClusteringResult:
    labels = server.global_label.copy()
    core_flags = server.global_core.bits.copy()
    num_clusters = int(np.unique(labels[labels != NOISE]).size)
    return ClusteringResult(labels=labels, num_clusters=num_clusters, core_flags=core_flags)


def _apply_init(server, metrics, payloads):
    noise = np.concatenate([p[0] for p in payloads])
    border_idx = np.concatenate([p[1] for p in payloads])
    border_vals = np.concatenate([p[2] for p in payloads])
    server.init_labels(noise, border_idx, border_vals)
    metrics.record(RoundStats("init", entries_pushed=int(noise.size + border_idx.size)))


def _run_simulated(workers, server, metrics, on_round):
    n = server.n
    w_count = len(workers)
    rounds = 0
    while True:
        flags = []
        plans = []
        for w in workers:
            finished, plan = get_max_label(w)
            server.finished_flags[w.worker_id] = finished
            flags.append(finished)
            plans.append(plan)
        if all(flags) and rounds > 0:
            break
        # When everything is already at fixpoint on entry (all-singleton
        # clusters), one confirming no-op round still runs so the protocol
        # always performs at least one reduce.
        for w, plan in zip(workers, plans):
            propagate_max_label(w, plan)
        pushes = [w.local_label.take_dirty() for w in workers]
        pushed = max_reduce_labels(server, pushes)
        compressed = compress_labels(server.global_label)
        for w in workers:
            snap = pull_labels(server, w)
            global_union(w, snap, compressed)
        metrics.record(RoundStats("labels", entries_pushed=pushed, entries_pulled=n * w_count))
        rounds += 1
        if on_round is not None:
            on_round(rounds, server.global_label.copy())
        if rounds > n + 2:
            raise ProtocolError(f"label loop failed to terminate after {rounds} rounds")


class _ConcurrentShared:
    def __init__(self, num_workers: int, timeout: float):
        self.barrier = threading.Barrier(num_workers)
        self.timeout = timeout
        self.core_inbox: list[CoreRecord | None] = [None] * num_workers
        self.init_inbox: list = [None] * num_workers
        self.label_inbox: list = [None] * num_workers
        self.flag_inbox: list[bool] = [False] * num_workers
        self.global_core: CoreRecord | None = None
        self.compressed: np.ndarray | None = None
        self.stop = False
        self.rounds = 0
        self.pushed_this_round = 0
        self.errors: list = [None] * num_workers


def _run_concurrent(workers, server, metrics, min_points, timeout):
    n = server.n
    w_count = len(workers)
    shared = _ConcurrentShared(w_count, timeout)

    def sync(wid: int, leader_step=None):
        shared.barrier.wait(timeout=shared.timeout)
        if wid == 0 and leader_step is not None:
            leader_step()
        shared.barrier.wait(timeout=shared.timeout)

    def run_worker(w: WorkerState):
        wid = w.worker_id
        mark_core(w, min_points)
        shared.core_inbox[wid] = w.local_core

        def reduce_core():
            shared.global_core = or_reduce_core(server, shared.core_inbox)
            metrics.record(RoundStats("core", bits_pushed=n * w_count, bits_pulled=n * w_count))

        sync(wid, reduce_core)
        local_merge(w, shared.global_core)
        shared.init_inbox[wid] = init_payload(w)

        def apply_init():
            _apply_init(server, metrics, shared.init_inbox)

        sync(wid, apply_init)

        while True:
            finished, plan = get_max_label(w)
            shared.flag_inbox[wid] = finished

            def check():
                server.finished_flags = list(shared.flag_inbox)
                shared.stop = all(shared.flag_inbox) and shared.rounds > 0

            sync(wid, check)
            if shared.stop:
                return
            propagate_max_label(w, plan)
            shared.label_inbox[wid] = w.local_label.take_dirty()

            def reduce_labels():
                shared.pushed_this_round = max_reduce_labels(server, shared.label_inbox)
                shared.compressed = compress_labels(server.global_label)

            sync(wid, reduce_labels)
            snap = pull_labels(server, w)
            global_union(w, snap, shared.compressed)

            def close_round():
                metrics.record(
                    RoundStats("labels", entries_pushed=shared.pushed_this_round, entries_pulled=n * w_count)
                )
                shared.rounds += 1

            sync(wid, close_round)
            if shared.rounds > n + 2:
                raise ProtocolError(f"label loop failed to terminate after {shared.rounds} rounds")

    def thread_main(w: WorkerState):
        try:
            run_worker(w)
        except threading.BrokenBarrierError:
            pass  # another worker failed or timed out; surfaced below
        except BaseException as exc:  # noqa: BLE001 - surfaced in the main thread
            shared.errors[w.worker_id] = exc
            shared.barrier.abort()

    threads = [threading.Thread(target=thread_main, args=(w,), daemon=True) for w in workers]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for err in shared.errors:
        if err is not None:
            raise err
    if shared.barrier.broken:
        raise ProtocolError(f"barrier timeout or abort during label round {shared.rounds + 1}")


def run_ps_dbscan(
    data,
    eps: float | None = None,
    *,
    min_points: int,
    num_workers: int = 1,
    seed: int = 0,
    partition: str = "random",
    mode: str = "simulated",
    on_round=None,
    barrier_timeout: float = 60.0,
) -> tuple[ClusteringResult, CommMetrics]:
    """Cluster `data` (a Dataset with eps, or a prebuilt NeighborGraph).

    Returns the canonical clustering (identical to the sequential reference
    for every worker count and either mode) together with communication
    metrics.  `on_round` is called as on_round(round_index, label_snapshot)
    after each label round in simulated mode.
    """
    if min_points < 1:
        raise InputError(f"min_points must be >= 1, got {min_points}")
    if mode not in ("simulated", "concurrent"):
        raise InputError(f"unknown mode {mode!r}")
    graph = _resolve_graph(data, eps)
    n = graph.n
    owned_sets = partition_points(n, num_workers, seed, partition)
    workers = build_workers(graph, owned_sets)
    server = ServerState(n, num_workers)
    metrics = CommMetrics()

    if mode == "simulated":
        for w in workers:
            mark_core(w, min_points)
        global_core = or_reduce_core(server, [w.local_core for w in workers])
        metrics.record(RoundStats("core", bits_pushed=n * num_workers, bits_pulled=n * num_workers))
        for w in workers:
            local_merge(w, global_core)
        _apply_init(server, metrics, [init_payload(w) for w in workers])
        _run_simulated(workers, server, metrics, on_round)
    else:
        _run_concurrent(workers, server, metrics, min_points, barrier_timeout)

    return _canonicalize(server), metrics
