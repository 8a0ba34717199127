"""On-Off traffic sources driven by a piecewise intermittency map.

The interval map has two branches split at threshold d: below d the orbit
creeps away from the fixed point at 0 (Off), above d it creeps toward 1
(On). Intermittency exponents m1, m2 in [1.5, 2.0] tune the sojourn-time
tails; m1 = m2 = 1.5 gives short-range-dependent output while pushing the
larger exponent to 2.0 makes the binary sequence long-range dependent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Orbits this close to the endpoint fixed points are reinjected; both
# endpoints are measure-zero traps for finite-precision arithmetic.
_ENDPOINT_EPS = 1e-12


class NoConvergence(RuntimeError):
    """Bisection exhausted its step budget without hitting the tolerance."""


class InsufficientData(ValueError):
    """Sequence too short or block grid too narrow for a stable fit."""


@dataclass(frozen=True)
class ErramilliParams:
    """Map parameters: intermittency exponents and the Off/On threshold."""

    m1: float = 2.0
    m2: float = 2.0
    d: float = 0.5

    def __post_init__(self) -> None:
        if not 1.5 <= self.m1 <= 2.0:
            raise ValueError("m1 must lie in [1.5, 2.0]")
        if not 1.5 <= self.m2 <= 2.0:
            raise ValueError("m2 must lie in [1.5, 2.0]")
        if not 0.0 < self.d < 1.0:
            raise ValueError("d must lie in (0, 1)")


def map_step(p: ErramilliParams, x: float) -> float:
    """One application of the map; the first branch covers [0, d].

    Clamped into [0, 1] to absorb floating-point overshoot at the branch
    ends (mathematically the image already lies in [0, 1]).
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    if x <= p.d:
        y = x + (1.0 - p.d) * (x / p.d) ** p.m1
    else:
        y = x - p.d * ((1.0 - x) / (1.0 - p.d)) ** p.m2
    return min(max(y, 0.0), 1.0)


class ErramilliSource:
    """A single traffic source: owns its orbit point and its PRNG.

    The PRNG seeds the initial condition and reinjects orbits that land on
    the absorbing endpoints (0 stays Off-side, 1 stays On-side, so the
    current regime is preserved). A burn-in discards the transient before
    any bit is consumed.
    """

    def __init__(
        self,
        params: ErramilliParams,
        seed=None,
        x0: float | None = None,
        burn_in: int = 1000,
    ):
        self.params = params
        self.rng = np.random.default_rng(seed)
        if x0 is None:
            x0 = self.rng.random()
            while not 0.0 < x0 < 1.0:
                x0 = self.rng.random()
        elif not 0.0 < x0 < 1.0:
            raise ValueError("x0 must lie in (0, 1)")
        self.x = float(x0)
        for _ in range(burn_in):
            self.advance()

    def advance(self) -> float:
        """Apply the map once, reinjecting away from the endpoint traps."""
        x = map_step(self.params, self.x)
        if x >= 1.0 - _ENDPOINT_EPS:
            x = self.params.d + (1.0 - self.params.d) * self.rng.random()
        elif x <= _ENDPOINT_EPS:
            x = self.params.d * self.rng.random()
        self.x = x
        return x

    def next_bit(self) -> int:
        """Advance once; 1 (On, a packet is generated) iff the orbit lands above d."""
        return 1 if self.advance() > self.params.d else 0

    def bits(self, count: int) -> np.ndarray:
        """Vector of `count` consecutive bits (uint8).

        Inlines advance() for speed; the branch structure and RNG
        consumption are identical, so the stream matches repeated
        next_bit() calls bit for bit.
        """
        p = self.params
        d, m1, m2 = p.d, p.m1, p.m2
        omd = 1.0 - d
        hi = 1.0 - _ENDPOINT_EPS
        rand = self.rng.random
        out = np.empty(count, dtype=np.uint8)
        x = self.x
        for i in range(count):
            if x <= d:
                x = x + omd * (x / d) ** m1
            else:
                x = x - d * ((1.0 - x) / omd) ** m2
            if x >= hi:
                x = d + omd * rand()
            elif x <= _ENDPOINT_EPS:
                x = d * rand()
            out[i] = x > d
        self.x = x
        return out

    def on_count(self, count: int) -> int:
        """Number of On bits among the next `count` (no array materialized)."""
        p = self.params
        d, m1, m2 = p.d, p.m1, p.m2
        omd = 1.0 - d
        hi = 1.0 - _ENDPOINT_EPS
        rand = self.rng.random
        total = 0
        x = self.x
        for _ in range(count):
            if x <= d:
                x = x + omd * (x / d) ** m1
            else:
                x = x - d * ((1.0 - x) / omd) ** m2
            if x >= hi:
                x = d + omd * rand()
            elif x <= _ENDPOINT_EPS:
                x = d * rand()
            if x > d:
                total += 1
        self.x = x
        return total


def estimate_rate(
    params: ErramilliParams,
    burn_in: int = 1000,
    samples: int = 100_000,
    seed=0,
    n_orbits: int = 8,
) -> float:
    """Mean On fraction after burn-in, averaged over independent orbits.

    Deterministic for a given seed: orbit seeds are spawned from it.
    """
    if n_orbits < 1:
        raise ValueError("n_orbits must be >= 1")
    children = np.random.SeedSequence(seed).spawn(n_orbits)
    total = 0
    for child in children:
        src = ErramilliSource(params, seed=child, burn_in=burn_in)
        total += src.on_count(samples)
    return total / (n_orbits * samples)


def calibrate_d(
    m1: float,
    m2: float,
    target_lambda: float,
    tol: float = 0.01,
    seed=0,
    burn_in: int = 1000,
    samples: int = 100_000,
    n_orbits: int = 8,
    max_steps: int = 60,
) -> float:
    """Bisect the threshold d until the measured On rate matches the target.

    The On rate decreases in d (larger Off interval), and evaluations reuse
    the same seed so the objective is a fixed deterministic function of d.
    """
    if not 0.0 < target_lambda < 1.0:
        raise ValueError("target_lambda must lie in (0, 1)")
    lo, hi = 1e-9, 1.0 - 1e-9
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        rate = estimate_rate(
            ErramilliParams(m1, m2, mid),
            burn_in=burn_in,
            samples=samples,
            seed=seed,
            n_orbits=n_orbits,
        )
        if abs(rate - target_lambda) <= tol:
            return mid
        if rate > target_lambda:
            lo = mid
        else:
            hi = mid
    raise NoConvergence(
        f"no d with |rate - {target_lambda}| <= {tol} in {max_steps} bisection steps"
    )


def default_block_sizes(
    min_size: int = 100, max_size: int = 10_000, count: int = 8
) -> list[int]:
    """Log-spaced block sizes for the aggregated-variance fit.

    Starting at 100 keeps the fit out of the small-block region where
    short-range correlations inflate the slope.
    """
    sizes = np.unique(
        np.round(np.logspace(math.log10(min_size), math.log10(max_size), count))
    )
    return [int(s) for s in sizes]


def hurst_aggregated_variance(bits, block_sizes) -> float:
    """Hurst exponent via the aggregated-variance method.

    Blocks the series into non-overlapping windows of each size, fits
    log(variance of block means) against log(block size) by least squares,
    and returns H = 1 + slope/2. An independent sequence has slope -1 and
    so H = 0.5; slower variance decay signals long-range dependence.
    """
    x = np.asarray(bits, dtype=np.float64)
    sizes = sorted({int(s) for s in block_sizes})
    if len(sizes) < 4:
        raise InsufficientData("need at least 4 distinct block sizes")
    if sizes[0] < 1:
        raise InsufficientData("block sizes must be positive")
    if sizes[-1] < 100 * sizes[0]:
        raise InsufficientData("block sizes must span at least two decades")
    if x.size < 100 * sizes[-1]:
        raise InsufficientData(
            f"sequence of length {x.size} too short for block size {sizes[-1]}"
        )
    log_s = []
    log_var = []
    for s in sizes:
        n_blocks = x.size // s
        means = x[: n_blocks * s].reshape(n_blocks, s).mean(axis=1)
        var = float(means.var())
        if var <= 0.0:
            raise InsufficientData(f"degenerate block means at block size {s}")
        log_s.append(math.log(s))
        log_var.append(math.log(var))
    slope = float(np.polyfit(log_s, log_var, 1)[0])
    return 1.0 + slope / 2.0


def write_bit_trace(bits, path: str, fmt: str = "raw") -> None:
    """Export a bit sequence: `raw` is one 0/1 per line, `rle` is a single
    line of `On:len Off:len ...` run tokens."""
    arr = np.asarray(bits, dtype=np.uint8)
    if fmt == "raw":
        body = "\n".join(str(int(b)) for b in arr)
    elif fmt == "rle":
        tokens = []
        i = 0
        n = arr.size
        while i < n:
            j = i
            while j < n and arr[j] == arr[i]:
                j += 1
            tokens.append(f"{'On' if arr[i] else 'Off'}:{j - i}")
            i = j
        body = " ".join(tokens)
    else:
        raise ValueError(f"unknown trace format {fmt!r}")
    with open(path, "w") as f:
        f.write(body + "\n")


def read_bit_trace(path: str) -> np.ndarray:
    """Read either trace format back into a uint8 bit vector."""
    with open(path) as f:
        content = f.read().strip()
    if not content:
        return np.zeros(0, dtype=np.uint8)
    if content[0] in "01":
        return np.array([int(line) for line in content.split()], dtype=np.uint8)
    out: list[int] = []
    for token in content.split():
        state, length = token.split(":")
        out.extend([1 if state == "On" else 0] * int(length))
    return np.array(out, dtype=np.uint8)
