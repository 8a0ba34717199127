"""Discrete-time store-and-forward packet simulation.

Host nodes generate packets from their own On-Off map sources; every node
(host or router) owns an unbounded FIFO queue and forwards exactly one
head-of-queue packet per time step. The next hop is the neighbor closest
to the destination, ties broken first by the smallest per-link forward
counter, then uniformly at random. Congestion shows up as queue growth and
rising delivery times; nothing is ever dropped.
"""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graphs import UNREACHABLE, DistanceMatrix, Graph, all_pairs_hop_distances
from .traffic import ErramilliParams, ErramilliSource


class TooFewHosts(ValueError):
    """Host density resolves to fewer than two hosts."""


@dataclass(slots=True)
class Packet:
    id: int
    src: int
    dst: int
    created_at: int
    delivered_at: int | None = None


@dataclass
class NodeState:
    """Inspection snapshot of one node (queues copied, counters live)."""

    queue: list[Packet]
    link_forward_count: dict[int, int]
    is_host: bool
    source: ErramilliSource | None


@dataclass
class SimConfig:
    graph: Graph
    rho: float = 0.16
    traffic: ErramilliParams = field(default_factory=ErramilliParams)
    warmup_steps: int = 1000
    measure_steps: int = 10_000
    seed: int = 0
    source_burn_in: int = 1000
    check_invariants: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must lie in (0, 1]")
        if self.warmup_steps < 0 or self.measure_steps < 1:
            raise ValueError("need warmup_steps >= 0 and measure_steps >= 1")


@dataclass
class SimMetrics:
    """Window counters cover the measurement phase; totals cover the whole
    run (warmup included) and satisfy generated_total = delivered_total +
    in_flight_at_end."""

    generated: int
    delivered: int
    mean_delivery_time: float
    in_flight_at_end: int
    max_queue: int
    generated_total: int
    delivered_total: int
    queue_length_timeseries: list[int]


def assign_hosts(g: Graph, rho: float, seed: int) -> list[int]:
    """Uniformly random host subset of size round(rho * N), sorted."""
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must lie in (0, 1]")
    n = g.n_vertices
    count = int(math.floor(rho * n + 0.5))
    if count < 2:
        raise TooFewHosts(f"rho={rho} on {n} vertices yields {count} host(s)")
    rng = np.random.default_rng(seed)
    return sorted(int(v) for v in rng.choice(n, size=count, replace=False))


def _choose_position(
    neighbors: list[int],
    dist_row: list[int],
    counts_row: list[int],
    tie_rng: random.Random,
) -> int:
    """Index into `neighbors` of the routing choice (closest, then least
    used link, then random)."""
    best_d = None
    cand: list[int] = []
    for k, u in enumerate(neighbors):
        du = dist_row[u]
        if best_d is None or du < best_d:
            best_d = du
            cand = [k]
        elif du == best_d:
            cand.append(k)
    if len(cand) > 1:
        best_c = min(counts_row[k] for k in cand)
        cand = [k for k in cand if counts_row[k] == best_c]
        if len(cand) > 1:
            return cand[tie_rng.randrange(len(cand))]
    return cand[0]


def select_next_hop(
    g: Graph,
    dmat: DistanceMatrix,
    link_counts: list[list[int]],
    node: int,
    dst: int,
    rng: random.Random,
) -> int:
    """Routing decision for one packet sitting at `node` bound for `dst`.

    `link_counts[v][k]` counts packets forwarded from v over its k-th
    adjacency entry. Does not mutate any state.
    """
    if node == dst:
        raise ValueError("packet is already at its destination")
    k = _choose_position(
        g.adjacency[node], dmat.rows[dst], link_counts[node], rng
    )
    return g.adjacency[node][k]


class SimState:
    """Owned mutable state of one simulation run.

    Every step has two phases. Generation: each host advances its source
    once and, on an On bit, appends a fresh packet (uniform random
    destination among the other hosts) to its own queue. Forwarding: every
    node whose queue was non-empty at the start of the phase pops exactly
    its head packet and hands it to the routing choice; arrivals go to the
    tail of the receiving queue and cannot move again until the next step.
    A packet handed to its destination is delivered, never enqueued.

    Per-link forward counters are consulted only by the owning node and
    each node forwards at most once per step, so updating them in place is
    equivalent to the phase-start snapshot. Nodes are processed in
    ascending index order, which pins the tie-break RNG stream and makes
    runs bit-reproducible.
    """

    def __init__(
        self,
        graph: Graph,
        dmat: DistanceMatrix,
        hosts: list[int],
        traffic: ErramilliParams | None = None,
        seed: int = 0,
        source_burn_in: int = 1000,
        check_invariants: bool = False,
    ):
        n = graph.n_vertices
        if dmat.n != n:
            raise ValueError("distance matrix size does not match graph")
        if len(hosts) < 2:
            raise TooFewHosts("need at least 2 hosts")
        if len(set(hosts)) != len(hosts) or not all(0 <= h < n for h in hosts):
            raise ValueError("hosts must be distinct vertex indices")

        self.graph = graph
        self.dmat = dmat
        self.hosts = sorted(hosts)
        self._host_pos = {h: i for i, h in enumerate(self.hosts)}
        self._adj = graph.adjacency
        self._dist_rows = dmat.rows
        self._check = check_invariants

        ss = np.random.SeedSequence(seed)
        dest_ss, tie_ss, *orbit_ss = ss.spawn(2 + (len(self.hosts) if traffic else 0))
        self._dest_rng = random.Random(int(dest_ss.generate_state(1)[0]))
        self._tie_rng = random.Random(int(tie_ss.generate_state(1)[0]))
        self.sources: dict[int, ErramilliSource] = {}
        if traffic is not None:
            for h, child in zip(self.hosts, orbit_ss):
                self.sources[h] = ErramilliSource(
                    traffic, seed=child, burn_in=source_burn_in
                )

        self._queues: list[deque[Packet]] = [deque() for _ in range(n)]
        self.link_counts: list[list[int]] = [[0] * len(nbrs) for nbrs in self._adj]
        self._proxy = [0] * n
        self._active: set[int] = set()

        self.packets: list[Packet] = []
        self.clock = 0
        self.generated_total = 0
        self.delivered_total = 0
        self.in_flight = 0
        self.max_queue = 0
        self.queue_series: list[int] = []

        self._measuring = False
        self.generated_window = 0
        self.delivered_window = 0
        self._delay_sum = 0

    # -- queue plumbing ----------------------------------------------------

    def _append(self, v: int, pkt: Packet) -> None:
        q = self._queues[v]
        q.append(pkt)
        self._active.add(v)
        if len(q) > self.max_queue:
            self.max_queue = len(q)

    def _pop_head(self, v: int) -> Packet:
        q = self._queues[v]
        pkt = q.popleft()
        if not q:
            self._active.discard(v)
        return pkt

    def queue_length(self, v: int) -> int:
        return len(self._queues[v])

    # -- packet creation ---------------------------------------------------

    def inject(self, src: int, dst: int) -> Packet:
        """Manually enqueue a packet at `src` (both endpoints must be hosts)."""
        if src not in self._host_pos or dst not in self._host_pos:
            raise ValueError("src and dst must be hosts")
        if src == dst:
            raise ValueError("src and dst must differ")
        return self._new_packet(src, dst)

    def _new_packet(self, src: int, dst: int) -> Packet:
        pkt = Packet(len(self.packets), src, dst, self.clock)
        self.packets.append(pkt)
        self.generated_total += 1
        self.in_flight += 1
        if self._measuring:
            self.generated_window += 1
        self._append(src, pkt)
        return pkt

    def _spawn_random(self, src: int) -> None:
        hosts = self.hosts
        j = self._dest_rng.randrange(len(hosts) - 1)
        if j >= self._host_pos[src]:
            j += 1
        self._new_packet(src, hosts[j])

    # -- dynamics ----------------------------------------------------------

    def begin_measurement(self) -> None:
        self._measuring = True
        self.generated_window = 0
        self.delivered_window = 0
        self._delay_sum = 0

    def step(self) -> None:
        """Advance one time step (generation phase, then forwarding phase)."""
        t = self.clock
        if self.sources:
            for h in self.hosts:
                if self.sources[h].next_bit():
                    self._spawn_random(h)

        adj = self._adj
        dist_rows = self._dist_rows
        counts = self.link_counts
        tie_rng = self._tie_rng
        proxy = self._proxy
        for node in sorted(self._active):
            pkt = self._pop_head(node)
            dst = pkt.dst
            k = _choose_position(adj[node], dist_rows[dst], counts[node], tie_rng)
            counts[node][k] += 1
            if pkt.src != node:
                proxy[node] += 1
            nxt = adj[node][k]
            if nxt == dst:
                pkt.delivered_at = t + 1
                self.delivered_total += 1
                self.in_flight -= 1
                if self._measuring:
                    self.delivered_window += 1
                    self._delay_sum += pkt.delivered_at - pkt.created_at
            else:
                self._append(nxt, pkt)

        self.clock = t + 1
        self.queue_series.append(self.in_flight)
        if self._check:
            self._assert_invariants()

    def run_steps(self, count: int) -> None:
        for _ in range(count):
            self.step()

    def _assert_invariants(self) -> None:
        queued = sum(len(q) for q in self._queues)
        assert queued == self.in_flight, "queue census disagrees with in-flight count"
        assert (
            self.generated_total == self.delivered_total + self.in_flight
        ), "packet conservation violated"
        for pkt in self.packets:
            if pkt.delivered_at is not None:
                lower = int(self.dmat.dist[pkt.src, pkt.dst])
                assert pkt.delivered_at - pkt.created_at >= lower, (
                    f"packet {pkt.id} beat the hop-distance lower bound"
                )

    # -- inspection ----------------------------------------------------------

    def node_state(self, v: int) -> NodeState:
        counts = {u: c for u, c in zip(self._adj[v], self.link_counts[v])}
        return NodeState(
            list(self._queues[v]), counts, v in self._host_pos, self.sources.get(v)
        )

    def mean_delivery_time(self) -> float:
        if self.delivered_window == 0:
            return float("nan")
        return self._delay_sum / self.delivered_window


def run(config: SimConfig, dmat: DistanceMatrix | None = None) -> SimMetrics:
    """Execute warmup then measurement on a connected graph.

    Warmup steps feed the queues but are excluded from the window counters;
    the reported throughput is the number of packets delivered inside the
    measurement window. Fully deterministic for a given (config, seed).
    """
    g = config.graph
    if dmat is None:
        dmat = all_pairs_hop_distances(g)
    if np.any(dmat.dist == UNREACHABLE):
        raise ValueError("simulation requires a connected graph")
    hosts = assign_hosts(g, config.rho, config.seed)
    state = SimState(
        g,
        dmat,
        hosts,
        traffic=config.traffic,
        seed=config.seed,
        source_burn_in=config.source_burn_in,
        check_invariants=config.check_invariants,
    )
    state.run_steps(config.warmup_steps)
    state.begin_measurement()
    state.run_steps(config.measure_steps)
    return SimMetrics(
        generated=state.generated_window,
        delivered=state.delivered_window,
        mean_delivery_time=state.mean_delivery_time(),
        in_flight_at_end=state.in_flight,
        max_queue=state.max_queue,
        generated_total=state.generated_total,
        delivered_total=state.delivered_total,
        queue_length_timeseries=state.queue_series,
    )


def measure_load_proxy(state: SimState) -> np.ndarray:
    """Per-vertex count of transit packets forwarded (packets originated at
    the vertex itself excluded), comparable in rank to the static load."""
    return np.asarray(state._proxy, dtype=np.float64)
