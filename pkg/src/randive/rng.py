"""Deterministic, splittable random streams and elementary distribution samplers.

Every stochastic component of the package draws through an :class:`RngStream`,
a counter-based Philox generator keyed by ``(seed, stream_index)``.  Two
streams built from the same pair replay the same draw sequence on any run and
platform; distinct stream indices give statistically independent streams, so
replicated chains can run in parallel and still be reproduced one by one.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "RngStream",
    "uniform01",
    "sample_normal",
    "sample_beta",
    "sample_cauchy",
]


class RngStream:
    """A reproducible pseudo-random stream identified by ``(seed, stream_index)``.

    Parameters
    ----------
    seed : int
        64-bit unsigned master seed shared by a family of streams.
    stream_index : int, optional
        Non-negative replicate id.  Streams with different indices are
        independent (the index enters the generator key, nothing is shared).
    """

    __slots__ = ("seed", "stream_index", "generator")

    def __init__(self, seed, stream_index=0):
        seed = int(seed)
        stream_index = int(stream_index)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
        if stream_index < 0:
            raise ValueError(f"stream_index must be non-negative, got {stream_index}")
        self.seed = seed
        self.stream_index = stream_index
        key = np.random.SeedSequence(entropy=seed, spawn_key=(stream_index,))
        self.generator = np.random.Generator(np.random.Philox(key))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_index={self.stream_index})"

    def __getstate__(self):
        return {"seed": self.seed, "stream_index": self.stream_index,
                "bit_generator": self.generator.bit_generator.state}

    def __setstate__(self, state):
        self.seed = state["seed"]
        self.stream_index = state["stream_index"]
        key = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_index,))
        self.generator = np.random.Generator(np.random.Philox(key))
        self.generator.bit_generator.state = state["bit_generator"]


def uniform01(rng, size=None):
    """Draw from the open interval (0, 1).

    Endpoint values are rejected and redrawn so that downstream code may take
    logarithms and form strict comparisons without special cases.
    """
    g = rng.generator
    if size is None:
        u = g.random()
        while u == 0.0:
            u = g.random()
        return u
    out = g.random(size)
    bad = out == 0.0
    while bad.any():
        out[bad] = g.random(int(bad.sum()))
        bad = out == 0.0
    return out


def sample_normal(rng, mu, sigma, size=None):
    """Draw from N(mu, sigma^2); ``sigma`` must be positive."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if size is None:
        return mu + sigma * rng.generator.standard_normal()
    return mu + sigma * rng.generator.standard_normal(size)


def sample_beta(rng, a, b, size=None):
    """Draw from Beta(a, b) on the open interval (0, 1).

    Uses the two-gamma ratio X/(X+Y) with X~Gamma(a), Y~Gamma(b), which is
    correct for every positive shape pair, including shapes below one.  Draws
    that round to exactly 0 or 1 are redrawn.
    """
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"beta shapes must be positive, got a={a}, b={b}")
    g = rng.generator
    if size is None:
        while True:
            x = g.standard_gamma(a)
            y = g.standard_gamma(b)
            v = x / (x + y)
            if 0.0 < v < 1.0:
                return v
    x = g.standard_gamma(a, size)
    y = g.standard_gamma(b, size)
    with np.errstate(invalid="ignore"):
        out = x / (x + y)
    bad = ~((out > 0.0) & (out < 1.0))
    while bad.any():
        m = int(bad.sum())
        x = g.standard_gamma(a, m)
        y = g.standard_gamma(b, m)
        with np.errstate(invalid="ignore"):
            out[bad] = x / (x + y)
        bad = ~((out > 0.0) & (out < 1.0))
    return out


def sample_cauchy(rng, loc, scale, size=None):
    """Draw from Cauchy(loc, scale); ``scale`` must be positive."""
    if not scale > 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    if size is None:
        return loc + scale * rng.generator.standard_cauchy()
    return loc + scale * rng.generator.standard_cauchy(size)
