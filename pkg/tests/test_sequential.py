import numpy as np
import pytest

from psdbscan import (
    Dataset,
    InputError,
    NOISE,
    build_neighbor_graph,
    gen_chain,
    ingest_linkage,
    sequential_dbscan,
)


def triangle_graph():
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]])
    return build_neighbor_graph(Dataset.from_coords(coords), 1.5)


def test_mutually_adjacent_triple():
    res = sequential_dbscan(triangle_graph(), 3)
    assert res.labels.tolist() == [2, 2, 2]
    assert res.core_flags.all()
    assert res.num_clusters == 1


def test_isolated_point_is_noise():
    g = build_neighbor_graph(Dataset.from_coords([[0.0], [50.0]]), 1.0)
    res = sequential_dbscan(g, 2)
    assert res.labels.tolist() == [NOISE, NOISE]
    assert res.num_clusters == 0


def test_chain_converges_to_max_id():
    ds, eps, _ = gen_chain(12, 3, seed=0)
    g = build_neighbor_graph(ds, eps)
    res = sequential_dbscan(g, 2)
    assert res.labels.tolist() == [11] * 12


def test_min_points_one_makes_singleton_cores():
    g = build_neighbor_graph(Dataset.from_coords([[0.0], [50.0]]), 1.0)
    res = sequential_dbscan(g, 1)
    assert res.labels.tolist() == [0, 1]
    assert res.core_flags.all()


def test_invalid_min_points():
    with pytest.raises(InputError):
        sequential_dbscan(triangle_graph(), 0)


def _two_cliques_with_shared_border():
    # 4-cliques {0..3} and {5..8}; point 4 touches one core of each, so at
    # min_pts=4 it is a border adjacent to both clusters.
    clique1 = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    clique2 = [(a, b) for a in range(5, 9) for b in range(a + 1, 9)]
    return ingest_linkage(clique1 + clique2 + [(3, 4), (5, 4)], 9)


def test_border_takes_max_adjacent_canonical():
    res = sequential_dbscan(_two_cliques_with_shared_border(), 4)
    assert not res.core_flags[4]
    assert res.labels.tolist() == [3, 3, 3, 3, 8, 8, 8, 8, 8]


def test_border_never_bridges_clusters():
    res = sequential_dbscan(_two_cliques_with_shared_border(), 4)
    assert res.num_clusters == 2


def test_visiting_order_does_not_matter():
    # Relabel the same instance under a random id permutation: the induced
    # partition, core set, and noise set must be preserved.
    rng = np.random.default_rng(31)
    for _ in range(12):
        n = int(rng.integers(5, 100))
        coords = rng.uniform(0, 8, (n, 2))
        eps = float(rng.uniform(0.4, 2.0))
        mp = int(rng.integers(1, 6))
        base = sequential_dbscan(build_neighbor_graph(Dataset.from_coords(coords), eps), mp)

        perm = rng.permutation(n)  # point i moves to row perm-position
        shuffled = sequential_dbscan(build_neighbor_graph(Dataset.from_coords(coords[perm]), eps), mp)
        assert np.array_equal(base.core_flags[perm], shuffled.core_flags)
        assert np.array_equal(base.labels[perm] == NOISE, shuffled.labels == NOISE)
        # same partition: group rows by label on both sides
        base_groups = {}
        for row, lab in enumerate(base.labels[perm]):
            if lab != NOISE:
                base_groups.setdefault(int(lab), set()).add(row)
        perm_groups = {}
        for row, lab in enumerate(shuffled.labels):
            if lab != NOISE:
                perm_groups.setdefault(int(lab), set()).add(row)
        assert set(map(frozenset, base_groups.values())) == set(map(frozenset, perm_groups.values()))


def test_linkage_equals_vector_representation():
    rng = np.random.default_rng(37)
    for _ in range(10):
        n = int(rng.integers(5, 100))
        coords = rng.uniform(0, 6, (n, 2))
        eps = float(rng.uniform(0.4, 1.8))
        mp = int(rng.integers(1, 5))
        g = build_neighbor_graph(Dataset.from_coords(coords), eps)
        edges = [(p, int(q)) for p in range(n) for q in g.adjacency[p] if q > p]
        g2 = ingest_linkage(edges, n)
        assert sequential_dbscan(g, mp) == sequential_dbscan(g2, mp)


def test_noise_is_complement_of_cores_and_borders():
    rng = np.random.default_rng(41)
    for _ in range(15):
        n = int(rng.integers(5, 150))
        coords = rng.uniform(0, 7, (n, 2))
        g = build_neighbor_graph(Dataset.from_coords(coords), float(rng.uniform(0.3, 1.5)))
        res = sequential_dbscan(g, int(rng.integers(2, 6)))
        for p in range(n):
            has_core_neighbor = bool(res.core_flags[g.adjacency[p]].any())
            expect_noise = not res.core_flags[p] and not has_core_neighbor
            assert (res.labels[p] == NOISE) == expect_noise
