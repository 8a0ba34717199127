"""Per-vertex shortest-path load: the sum over ordered vertex pairs of the
fraction of geodesics between them passing through each vertex.

`compute_load` is the production path (per-source BFS plus reverse
dependency accumulation, O(N*M) overall); `brute_force_load` enumerates
every shortest path explicitly and exists solely to cross-check it.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graphs import Graph

_BRUTE_FORCE_CAP = 16


class TooLarge(ValueError):
    """Graph exceeds the brute-force enumeration cap."""


@dataclass(frozen=True)
class LoadStats:
    mean: float
    std: float
    normalized_std: float
    max: float
    argmax_vertex: int


def compute_load(g: Graph, include_endpoints: bool = False) -> np.ndarray:
    """Fractional shortest-path load per vertex, summed over ordered pairs.

    For every source, a BFS counts geodesics (sigma) level by level; walking
    the BFS order backwards then accumulates each vertex's dependency
    delta[v] = sum over successors w of sigma[v]/sigma[w] * (1 + delta[w]),
    which totals the per-pair path fractions without touching individual
    paths. Endpoints are excluded by default (a pair contributes only at
    intermediate vertices); `include_endpoints=True` adds the constant
    endpoint terms, i.e. 2 * (number of reachable partners) per vertex.

    Unreachable pairs contribute nothing, so disconnected inputs are fine.
    """
    n = g.n_vertices
    adj = g.adjacency
    load = [0.0] * n
    reach = [0] * n
    for s in range(n):
        dist = [-1] * n
        sigma = [0] * n
        order: list[int] = []
        dist[s] = 0
        sigma[s] = 1
        q = deque([s])
        while q:
            v = q.popleft()
            order.append(v)
            dv1 = dist[v] + 1
            sv = sigma[v]
            for w in adj[v]:
                dw = dist[w]
                if dw < 0:
                    dist[w] = dv1
                    sigma[w] = sv
                    q.append(w)
                elif dw == dv1:
                    sigma[w] += sv
        reach[s] = len(order) - 1
        delta = [0.0] * n
        for w in reversed(order):
            coef = (1.0 + delta[w]) / sigma[w]
            dw1 = dist[w] - 1
            for v in adj[w]:
                if dist[v] == dw1:
                    delta[v] += sigma[v] * coef
            if w != s:
                load[w] += delta[w]
    if include_endpoints:
        for v in range(n):
            load[v] += 2.0 * reach[v]
    return np.asarray(load)


def brute_force_load(g: Graph, include_endpoints: bool = False) -> np.ndarray:
    """Reference load via explicit enumeration of every shortest path.

    Independent of compute_load on purpose: plain BFS distances, then a DFS
    that walks all distance-increasing paths from s and keeps those ending
    at t. Exponential in the worst case, hence the vertex cap.
    """
    n = g.n_vertices
    if n > _BRUTE_FORCE_CAP:
        raise TooLarge(f"brute force capped at {_BRUTE_FORCE_CAP} vertices, got {n}")
    adj = g.adjacency
    load = np.zeros(n)
    for s in range(n):
        dist = {s: 0}
        q = deque([s])
        while q:
            v = q.popleft()
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    q.append(w)
        for t in range(n):
            if t == s or t not in dist:
                continue
            paths: list[list[int]] = []
            stack = [(s, [s])]
            while stack:
                v, path = stack.pop()
                if v == t:
                    paths.append(path)
                    continue
                if dist[v] >= dist[t]:
                    continue
                for w in adj[v]:
                    if dist.get(w) == dist[v] + 1:
                        stack.append((w, path + [w]))
            share = 1.0 / len(paths)
            for path in paths:
                members = path if include_endpoints else path[1:-1]
                for v in members:
                    load[v] += share
    return load


def load_stats(values) -> LoadStats:
    """Mean, population std, std/mean, max and argmax of a load vector."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("load vector needs at least 2 entries")
    if np.any(arr < 0):
        raise ValueError("load values must be non-negative")
    mean = float(arr.mean())
    std = float(arr.std())
    normalized = std / mean if mean > 0 else 0.0
    argmax = int(np.argmax(arr))
    return LoadStats(mean, std, normalized, float(arr[argmax]), argmax)


def write_load_csv(values, path: str) -> None:
    """CSV rows `vertex,load` plus a trailing stats comment line."""
    arr = np.asarray(values, dtype=np.float64)
    stats = load_stats(arr)
    lines = ["vertex,load"]
    lines.extend(f"{v},{x!r}" for v, x in enumerate(arr.tolist()))
    lines.append(
        f"# mean={stats.mean!r} std={stats.std!r} "
        f"normalized_std={stats.normalized_std!r} "
        f"max={stats.max!r} argmax={stats.argmax_vertex}"
    )
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
