"""Graph generation along the random-to-scale-free continuum plus structural statistics.

The generator draws edge endpoints with probability proportional to the fixed
vertex fitness (i+1)**-alpha, so alpha=0 degenerates to a uniform G(N, M)
random graph and alpha>0 yields power-law degree tails.
"""
from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

UNREACHABLE = -1

# Pairs drawn per RNG batch; a deterministic function of remaining work only,
# so the consumed random stream is reproducible for a given seed.
_MAX_BATCH = 4096


class AttemptBudgetExceeded(RuntimeError):
    """Edge placement stalled: too many consecutive rejected draws."""


class InsufficientTail(ValueError):
    """Not enough distinct degrees above the fitting cutoff."""


class NoReachablePairs(ValueError):
    """Distance matrix contains no reachable ordered pair."""


@dataclass(frozen=True)
class GenParams:
    """Parameters of the fitness-based generator.

    Vertex i (1-based) carries weight i**-alpha; endpoints of every candidate
    edge are drawn independently with the normalized weights until n_edges
    distinct edges exist.
    """

    n_vertices: int
    n_edges: int
    alpha: float
    seed: int

    def __post_init__(self) -> None:
        if self.n_vertices < 1:
            raise ValueError("n_vertices must be positive")
        if self.n_edges < 1:
            raise ValueError("n_edges must be positive")
        max_edges = self.n_vertices * (self.n_vertices - 1) // 2
        if self.n_edges > max_edges:
            raise ValueError(
                f"n_edges={self.n_edges} exceeds the simple-graph maximum {max_edges}"
            )
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def mean_degree(self) -> float:
        return 2.0 * self.n_edges / self.n_vertices

    @classmethod
    def from_avg_degree(
        cls, n_vertices: int, avg_degree: float, alpha: float, seed: int
    ) -> "GenParams":
        """Build params with n_edges = floor(avg_degree * n / 2)."""
        return cls(n_vertices, int(avg_degree * n_vertices // 2), alpha, seed)


class Graph:
    """Undirected simple graph stored as sorted adjacency lists."""

    __slots__ = ("n_vertices", "adjacency")

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int]]):
        if n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        adjacency: list[list[int]] = [[] for _ in range(n_vertices)]
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            adjacency[u].append(v)
            adjacency[v].append(u)
        for nbrs in adjacency:
            nbrs.sort()
        self.n_vertices = n_vertices
        self.adjacency = adjacency

    @property
    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> list[int]:
        return [len(nbrs) for nbrs in self.adjacency]

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (u, v) with u < v, sorted."""
        return [(u, v) for u in range(self.n_vertices) for v in self.adjacency[u] if u < v]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n_vertices == other.n_vertices and self.adjacency == other.adjacency

    def __repr__(self) -> str:
        return f"Graph(n_vertices={self.n_vertices}, n_edges={self.n_edges})"


def generate_static_model(params: GenParams, attempt_budget: int | None = None) -> Graph:
    """Draw a graph with fixed vertex fitnesses until n_edges edges are placed.

    Each endpoint is sampled by inverse-CDF lookup in the precomputed
    cumulative weight table (weights are constant, so the table is built
    once). Draws that hit a self-pair or an existing edge are rejected;
    after `attempt_budget` consecutive rejections (default 200 * n_edges)
    the run aborts instead of hanging on unplaceable parameter combos.

    Deterministic for a given (params, seed): the PRNG is numpy's default
    PCG64 seeded with params.seed, consumed in a fixed batch schedule.
    """
    n, m = params.n_vertices, params.n_edges
    if attempt_budget is None:
        attempt_budget = 200 * m
    rng = np.random.default_rng(params.seed)
    weights = np.arange(1, n + 1, dtype=np.float64) ** -params.alpha
    cum = np.cumsum(weights)
    cum /= cum[-1]

    edges: set[tuple[int, int]] = set()
    failures = 0
    while len(edges) < m:
        batch = max(32, min(_MAX_BATCH, 2 * (m - len(edges))))
        draws = np.searchsorted(cum, rng.random(2 * batch), side="right").tolist()
        it = iter(draws)
        for u, v in zip(it, it):
            if len(edges) == m:
                break
            if u > v:
                u, v = v, u
            if u == v or (u, v) in edges:
                failures += 1
                if failures >= attempt_budget:
                    raise AttemptBudgetExceeded(
                        f"{failures} consecutive rejected draws with "
                        f"{len(edges)}/{m} edges placed (alpha={params.alpha})"
                    )
                continue
            edges.add((u, v))
            failures = 0
    return Graph(n, edges)


def giant_component(g: Graph) -> tuple[Graph, dict[int, int]]:
    """Extract the largest connected component, relabeled contiguously.

    Returns the component subgraph and the old-index -> new-index map.
    Equal-size ties go to the component containing the smallest original
    index (components are discovered in ascending order of their minimum
    vertex, so the first maximum wins).
    """
    n = g.n_vertices
    visited = [False] * n
    best: list[int] = []
    for s in range(n):
        if visited[s]:
            continue
        comp = [s]
        visited[s] = True
        q = deque([s])
        while q:
            v = q.popleft()
            for w in g.adjacency[v]:
                if not visited[w]:
                    visited[w] = True
                    comp.append(w)
                    q.append(w)
        if len(comp) > len(best):
            best = comp
    old = sorted(best)
    remap = {o: i for i, o in enumerate(old)}
    edges = [
        (remap[u], remap[v]) for u in old for v in g.adjacency[u] if u < v
    ]
    return Graph(len(old), edges), remap


def degree_histogram(g: Graph) -> dict[int, int]:
    """Map degree -> number of vertices with that degree."""
    return dict(sorted(Counter(g.degrees()).items()))


def fit_powerlaw_exponent(hist: dict[int, int], k_min: int) -> float:
    """Maximum-likelihood tail exponent for degrees >= k_min.

    Uses the continuous approximation of the discrete power-law MLE:
    gamma_hat = 1 + n / sum(count_k * ln(k / (k_min - 1/2))), which is the
    standard closed form with the half-integer shift correcting for
    discreteness.
    """
    if k_min < 1:
        raise ValueError("k_min must be >= 1")
    tail = {k: c for k, c in hist.items() if k >= k_min and c > 0}
    if len(tail) < 10:
        raise InsufficientTail(
            f"only {len(tail)} distinct degrees >= {k_min}; need at least 10"
        )
    shift = k_min - 0.5
    n = sum(tail.values())
    log_sum = sum(c * math.log(k / shift) for k, c in tail.items())
    return 1.0 + n / log_sum


@dataclass
class DistanceMatrix:
    """All-pairs hop counts; UNREACHABLE (-1) marks cross-component entries."""

    n: int
    dist: np.ndarray

    @cached_property
    def rows(self) -> list[list[int]]:
        """Nested-list view for tight lookup loops."""
        return self.dist.tolist()

    def reachable(self, s: int, t: int) -> bool:
        return bool(self.dist[s, t] != UNREACHABLE)


def all_pairs_hop_distances(g: Graph) -> DistanceMatrix:
    """BFS hop counts between every vertex pair (scipy csgraph backend)."""
    n = g.n_vertices
    edges = g.edges()
    if edges:
        rows = [u for u, v in edges] + [v for u, v in edges]
        cols = [v for u, v in edges] + [u for u, v in edges]
        mat = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    else:
        mat = csr_matrix((n, n), dtype=np.int8)
    d = shortest_path(mat, method="D", directed=False, unweighted=True)
    out = np.where(np.isinf(d), UNREACHABLE, d).astype(np.int32)
    return DistanceMatrix(n, out)


def characteristic_path_length(dmat: DistanceMatrix) -> float:
    """Mean hop count over all ordered reachable pairs s != t."""
    d = dmat.dist
    reachable = d != UNREACHABLE
    n_pairs = int(reachable.sum()) - dmat.n  # drop the always-reachable diagonal
    if n_pairs <= 0:
        raise NoReachablePairs("no reachable ordered pair s != t")
    total = int(d[reachable].sum())  # diagonal contributes zero
    return total / n_pairs


def write_edge_list(
    g: Graph, path: str, alpha: float | None = None, seed: int | None = None
) -> None:
    """Plain-text edge list: header comment with n/m (plus alpha/seed when
    known), then one `u v` line per edge, u < v, sorted."""
    header = f"# n={g.n_vertices} m={g.n_edges}"
    if alpha is not None:
        header += f" alpha={alpha!r}"
    if seed is not None:
        header += f" seed={seed}"
    lines = [header]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def read_edge_list(path: str) -> tuple[Graph, dict[str, float]]:
    """Inverse of write_edge_list. Returns the graph and the header metadata."""
    meta: dict[str, float] = {}
    edges: list[tuple[int, int]] = []
    with open(path) as f:
        for raw in f:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    if "=" in token:
                        key, val = token.split("=", 1)
                        meta[key] = float(val)
                continue
            u, v = line.split()
            edges.append((int(u), int(v)))
    if "n" not in meta:
        raise ValueError(f"{path}: missing 'n=' header")
    return Graph(int(meta["n"]), edges), meta
