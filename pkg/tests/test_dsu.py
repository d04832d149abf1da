import numpy as np
import pytest

from psdbscan import DisjointSet, InputError


def test_fresh_singletons():
    ds = DisjointSet(3)
    assert ds.find(2) == 2


def test_union_contract():
    ds = DisjointSet(3)
    ds.union(0, 1)
    assert ds.find(0) == ds.find(1)


def test_larger_id_wins():
    ds = DisjointSet(6)
    ds.union(3, 5)
    assert ds.find(3) == ds.find(5) == 5


def test_union_self_is_noop():
    ds = DisjointSet(4)
    ds.union(2, 2)
    assert ds.parent.tolist() == [0, 1, 2, 3]


def test_chain_root_and_compression():
    ds = DisjointSet(3)
    ds.union(0, 1)
    ds.union(1, 2)
    assert ds.find(0) == 2
    assert ds.parent[0] == 2  # path fully compressed


def test_out_of_range():
    ds = DisjointSet(2)
    with pytest.raises(InputError):
        ds.find(2)
    with pytest.raises(InputError):
        ds.union(0, 5)


def _closure_partition(n, pairs):
    # adjacency closure by repeated sweeps; the independent reference
    rep = list(range(n))

    def rep_of(x):
        while rep[x] != x:
            x = rep[x]
        return x

    for a, b in pairs:
        ra, rb = rep_of(a), rep_of(b)
        if ra != rb:
            rep[min(ra, rb)] = max(ra, rb)
    return frozenset(frozenset(i for i in range(n) if rep_of(i) == r) for r in set(map(rep_of, range(n))))


def test_partition_matches_closure_oracle():
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = int(rng.integers(1, 201))
        pairs = [(int(rng.integers(n)), int(rng.integers(n))) for _ in range(int(rng.integers(0, 3 * n)))]
        ds = DisjointSet(n)
        for a, b in pairs:
            ds.union(a, b)
        got = frozenset(
            frozenset(i for i in range(n) if ds.find(i) == r) for r in {ds.find(i) for i in range(n)}
        )
        assert got == _closure_partition(n, pairs)


def test_root_is_class_maximum():
    rng = np.random.default_rng(23)
    for _ in range(30):
        n = int(rng.integers(2, 150))
        ds = DisjointSet(n)
        for _ in range(2 * n):
            ds.union(int(rng.integers(n)), int(rng.integers(n)))
        for i in range(n):
            root = ds.find(i)
            members = [j for j in range(n) if ds.find(j) == root]
            assert root == max(members)
