import numpy as np
import pytest

from psdbscan import Dataset, GridIndex, InputError, build_neighbor_graph, ingest_linkage, query_radius


def line_dataset(*xs):
    return Dataset.from_coords(np.asarray(xs, dtype=float).reshape(-1, 1))


class TestQueryRadius:
    def test_single_point_only_self(self):
        ds = line_dataset(0.0)
        assert query_radius(ds, 0, 123.0).tolist() == [0]

    def test_three_collinear_mid_query(self):
        ds = line_dataset(0.0, 1.0, 2.0)
        assert query_radius(ds, 1, 1.5).tolist() == [0, 1, 2]

    def test_three_collinear_tight_eps(self):
        ds = line_dataset(0.0, 1.0, 2.0)
        assert query_radius(ds, 0, 0.5).tolist() == [0]

    def test_boundary_is_closed(self):
        ds = line_dataset(0.0, 1.0)
        assert query_radius(ds, 0, 1.0).tolist() == [0, 1]

    def test_out_of_range_id(self):
        ds = line_dataset(0.0)
        with pytest.raises(InputError):
            query_radius(ds, 1, 1.0)
        with pytest.raises(InputError):
            query_radius(ds, -1, 1.0)

    def test_nonpositive_eps(self):
        ds = line_dataset(0.0)
        with pytest.raises(InputError):
            query_radius(ds, 0, 0.0)


class TestDataset:
    def test_rejects_nan(self):
        with pytest.raises(InputError):
            Dataset.from_coords([[0.0, np.nan]])

    def test_rejects_inf(self):
        with pytest.raises(InputError):
            Dataset.from_coords([[np.inf, 1.0]])

    def test_rejects_wrong_shape(self):
        with pytest.raises(InputError):
            Dataset.from_coords([1.0, 2.0])


class TestBuildNeighborGraph:
    def test_collinear_sizes(self):
        ds = line_dataset(0.0, 1.0, 2.0)
        g = build_neighbor_graph(ds, 1.5)
        assert [len(a) for a in g.adjacency] == [2, 3, 2]

    def test_single_point(self):
        g = build_neighbor_graph(line_dataset(5.0), 1.0)
        assert [a.tolist() for a in g.adjacency] == [[0]]

    def test_two_blobs_no_cross_edges(self):
        rng = np.random.default_rng(3)
        a = rng.normal(0.0, 0.1, (20, 2))
        b = rng.normal(100.0, 0.1, (20, 2))
        g = build_neighbor_graph(Dataset.from_coords(np.vstack([a, b])), 2.0)
        for p in range(20):
            assert g.adjacency[p].max() < 20
        for p in range(20, 40):
            assert g.adjacency[p].min() >= 20

    def test_symmetric_and_self_inclusive(self):
        rng = np.random.default_rng(11)
        ds = Dataset.from_coords(rng.uniform(0, 5, (60, 2)))
        g = build_neighbor_graph(ds, 0.8)
        for p in range(g.n):
            assert p in g.adjacency[p]
            for q in g.adjacency[p]:
                assert p in g.adjacency[q]

    def test_grid_matches_brute_on_random_datasets(self):
        # Exactness check across dimensions, sizes, and radii.
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            n = int(rng.integers(1, 501))
            d = int(rng.integers(1, 5))
            coords = rng.uniform(0, rng.uniform(0.5, 20.0), (n, d))
            eps = float(rng.uniform(0.05, 5.0))
            ds = Dataset.from_coords(coords)
            grid = build_neighbor_graph(ds, eps, method="grid")
            brute = build_neighbor_graph(ds, eps, method="brute")
            for a, b in zip(grid.adjacency, brute.adjacency):
                assert np.array_equal(a, b)

    def test_single_point_query_matches_graph(self):
        rng = np.random.default_rng(5)
        ds = Dataset.from_coords(rng.uniform(0, 3, (40, 3)))
        index = GridIndex(ds, 0.9)
        g = build_neighbor_graph(ds, 0.9)
        for p in range(ds.n):
            assert np.array_equal(query_radius(ds, p, 0.9, index=index), g.adjacency[p])


class TestIngestLinkage:
    def test_symmetric_closure_with_self_loops(self):
        g = ingest_linkage([(0, 1)], 3)
        assert [a.tolist() for a in g.adjacency] == [[0, 1], [0, 1], [2]]

    def test_duplicates_and_flips_collapse(self):
        g1 = ingest_linkage([(0, 1), (1, 0), (0, 1)], 2)
        g2 = ingest_linkage([(0, 1)], 2)
        assert [a.tolist() for a in g1.adjacency] == [a.tolist() for a in g2.adjacency]

    def test_empty_edges(self):
        g = ingest_linkage([], 2)
        assert [a.tolist() for a in g.adjacency] == [[0], [1]]

    def test_self_edge_accepted(self):
        g = ingest_linkage([(1, 1)], 2)
        assert [a.tolist() for a in g.adjacency] == [[0], [1]]

    def test_id_out_of_range(self):
        with pytest.raises(InputError):
            ingest_linkage([(0, 3)], 3)

    def test_idempotent_under_duplication(self):
        rng = np.random.default_rng(9)
        n = 30
        edges = [(int(rng.integers(n)), int(rng.integers(n))) for _ in range(80)]
        doubled = edges + [(b, a) for a, b in edges] + edges
        g1 = ingest_linkage(edges, n)
        g2 = ingest_linkage(doubled, n)
        assert [a.tolist() for a in g1.adjacency] == [a.tolist() for a in g2.adjacency]
