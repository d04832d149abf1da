"""Disjoint-set forest with path compression.

Ties are broken by id: union always leaves the larger id as root, so the
root of any class is the maximum id it contains.  That convention makes
roots directly usable as cluster labels elsewhere in the package.
"""

import numpy as np

from .errors import InputError


class DisjointSet:
    def __init__(self, size: int):
        if size < 0:
            raise InputError(f"size must be nonnegative, got {size}")
        self.size = size
        self.parent = np.arange(size, dtype=np.int64)

    def _check(self, x: int) -> None:
        if not 0 <= x < self.size:
            raise InputError(f"element {x} out of range [0, {self.size})")

    def find(self, x: int) -> int:
        """Root of x's tree; fully compresses the traversed path."""
        self._check(x)
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return int(root)

    def union(self, x: int, y: int) -> None:
        """Merge the classes of x and y; the larger root id wins."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if rx > ry:
            rx, ry = ry, rx
        self.parent[rx] = ry

    def same(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)
