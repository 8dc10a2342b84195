"""Tolerance-based row grouping used by the reduction and common-part code."""

from __future__ import annotations

import numpy as np


class UnionFind:
    """Disjoint sets over ``range(n)`` with path compression and union by rank."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self.rank[ri] < self.rank[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        if self.rank[ri] == self.rank[rj]:
            self.rank[ri] += 1


def group_rows(rows: np.ndarray, tol: float) -> np.ndarray:
    """Label rows by transitive closeness: rows within `tol` in sup norm merge.

    Merging is closed under chaining (a~b and b~c put a, c in one class even
    when a and c differ by more than `tol`).  Class labels are assigned in
    order of first occurrence, so the labeling is deterministic.
    """
    rows = np.asarray(rows, dtype=float)
    n = rows.shape[0]
    uf = UnionFind(n)
    if rows.ndim != 2:
        raise ValueError("group_rows expects a 2-d array")
    if rows.shape[1] > 0:
        for i in range(n):
            for k in range(i + 1, n):
                if np.max(np.abs(rows[i] - rows[k])) <= tol:
                    uf.union(i, k)
    else:
        # zero-width rows are all identical by convention
        for i in range(1, n):
            uf.union(0, i)
    labels = np.empty(n, dtype=np.int64)
    seen: dict[int, int] = {}
    for i in range(n):
        root = uf.find(i)
        if root not in seen:
            seen[root] = len(seen)
        labels[i] = seen[root]
    return labels
