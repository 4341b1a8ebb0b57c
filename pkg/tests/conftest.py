"""Shared test helpers: independent oracles kept separate from the library."""

import math

import numpy as np
import pytest


def thick_tail_exact_draws(n, seed):
    """Exact draws from (2/pi)(1+x^2)^-2 via rejection on theta = arctan x.

    Under the substitution x = tan(theta) the density of theta is
    (2/pi) cos^2(theta) on (-pi/2, pi/2), bounded by 2/pi, so uniform
    rejection with acceptance cos^2(theta) is exact.  Uses numpy's default
    generator directly, independent of the package's stream machinery.
    """
    g = np.random.default_rng(seed)
    out = np.empty(n)
    i = 0
    while i < n:
        m = 2 * (n - i) + 16
        theta = g.uniform(-np.pi / 2, np.pi / 2, m)
        keep = g.random(m) < np.cos(theta) ** 2
        vals = np.tan(theta[keep])
        take = min(len(vals), n - i)
        out[i : i + take] = vals[:take]
        i += take
    return out


def central_difference(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2.0 * h)


@pytest.fixture
def rng_pair():
    """Two independent streams from the same master seed."""
    from randive.rng import RngStream

    return RngStream(123, 0), RngStream(123, 1)
