"""Shared test graph builders and independent oracles."""
from __future__ import annotations

import numpy as np

from netqsim import Graph


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(n_leaves: int) -> Graph:
    return Graph(n_leaves + 1, [(0, i) for i in range(1, n_leaves + 1)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def random_graph(n: int, m: int, rng: np.random.Generator) -> Graph:
    """Uniform G(n, m); may be disconnected."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    idx = rng.choice(len(pairs), size=m, replace=False)
    return Graph(n, [pairs[i] for i in idx])


def floyd_warshall(g: Graph) -> np.ndarray:
    """Independent all-pairs oracle; -1 for unreachable."""
    n = g.n_vertices
    big = n + 10
    d = np.full((n, n), big, dtype=np.int64)
    np.fill_diagonal(d, 0)
    for u in range(n):
        for v in g.adjacency[u]:
            d[u, v] = 1
    for k in range(n):
        for i in range(n):
            dik = d[i, k]
            if dik >= big:
                continue
            for j in range(n):
                if dik + d[k, j] < d[i, j]:
                    d[i, j] = dik + d[k, j]
    d[d >= big] = -1
    return d


class UnionFind:
    """Independent component-census oracle."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def component_sizes(self) -> dict[int, int]:
        sizes: dict[int, int] = {}
        for x in range(len(self.parent)):
            r = self.find(x)
            sizes[r] = sizes.get(r, 0) + 1
        return sizes
