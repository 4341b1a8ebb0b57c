"""Target densities, all evaluated in log space.

A :class:`TargetDensity` bundles an unnormalized log-density on R^dim with an
optional gradient and an optional polynomial tail exponent.  States of zero
mass are representable as ``-inf``; the built-in one-dimensional targets
accept any float (including ``inf`` from an overflowed proposal) and return
``-inf`` where the density vanishes.

The built-ins are the three benchmark targets used throughout the experiment
harness: a well-separated bimodal normal mixture, a needle-in-haystack normal
mixture, and a polynomially thick-tailed density with a closed-form CDF.

The mixture components are parameterized by their variances (0.25, 1e-4, 1):
the published acceptance rates for these benchmarks pin that reading down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

__all__ = [
    "TargetDensity",
    "bimodal_example1",
    "needle_example2",
    "thick_tailed",
    "thick_tailed_cdf",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_2_OVER_PI = math.log(2.0 / math.pi)
_INF = math.inf


@dataclass(frozen=True)
class TargetDensity:
    """An unnormalized log-density with optional gradient and tail exponent.

    ``log_density`` maps a float (dim == 1) or a length-``dim`` array to a
    float or ``-inf``.  ``tail_exponent_p`` is the polynomial decay rate p of
    the tails: pi(x)/pi(x*eps) -> |eps|^p as |x| -> inf, with ``math.inf``
    for tails that decay faster than any polynomial.
    """

    dim: int
    log_density: Callable
    grad_log_density: Optional[Callable] = None
    tail_exponent_p: Optional[float] = None
    label: str = ""


def _two_normal_mixture(w1, mu1, sd1, w2, mu2, sd2, label, tail_p):
    """Mixture w1*N(mu1, sd1^2) + w2*N(mu2, sd2^2) in guarded log space."""
    c1 = math.log(w1) - math.log(sd1) - _LOG_SQRT_2PI
    c2 = math.log(w2) - math.log(sd2) - _LOG_SQRT_2PI
    v1 = sd1 * sd1
    v2 = sd2 * sd2

    def log_density(x):
        if not -_INF < x < _INF:
            return -_INF
        a = c1 - 0.5 * (x - mu1) ** 2 / v1
        b = c2 - 0.5 * (x - mu2) ** 2 / v2
        # log-sum-exp guard: the needle component underflows linear space
        # a fraction of a unit away from its peak.
        hi, lo = (a, b) if a >= b else (b, a)
        return hi + math.log1p(math.exp(lo - hi))

    def grad_log_density(x):
        a = c1 - 0.5 * (x - mu1) ** 2 / v1
        b = c2 - 0.5 * (x - mu2) ** 2 / v2
        hi = a if a >= b else b
        ra = math.exp(a - hi)
        rb = math.exp(b - hi)
        da = -(x - mu1) / v1
        db = -(x - mu2) / v2
        return (ra * da + rb * db) / (ra + rb)

    return TargetDensity(
        dim=1,
        log_density=log_density,
        grad_log_density=grad_log_density,
        tail_exponent_p=tail_p,
        label=label,
    )


def bimodal_example1():
    """Equal mixture of normals at 0 and 10, each with variance 0.25.

    Two sharp, far-separated modes: a random walk with a moderate step size
    gets trapped in one of them, while multiplicative dives cross freely.
    """
    return _two_normal_mixture(
        0.5, 0.0, 0.5, 0.5, 10.0, 0.5, label="bimodal", tail_p=_INF
    )


def needle_example2():
    """Needle-in-haystack mixture: N(0, 1e-4) with weight 1/2 inside N(5, 1).

    Half the mass sits in a needle of width 0.01 at the origin, the rest in a
    unit-width haystack at 5.
    """
    return _two_normal_mixture(
        0.5, 0.0, 0.01, 0.5, 5.0, 1.0, label="needle", tail_p=_INF
    )


def thick_tailed():
    """Polynomially tailed density (2/pi) / (1 + x^2)^2 with tail exponent 4.

    Not log-concave in the tails, so random walk and Langevin chains lose
    geometric ergodicity on it; it has finite variance (E X^2 = 1).
    """

    def log_density(x):
        if not -_INF < x < _INF:
            return -_INF
        return _LOG_2_OVER_PI - 2.0 * math.log1p(x * x)

    def grad_log_density(x):
        return -4.0 * x / (1.0 + x * x)

    return TargetDensity(
        dim=1,
        log_density=log_density,
        grad_log_density=grad_log_density,
        tail_exponent_p=4.0,
        label="thicktail",
    )


def thick_tailed_cdf(x):
    """CDF of the thick-tailed density: arctan(x)/pi + 1/2 + sin(2*arctan(x))/(2*pi)."""
    if x == _INF:
        return 1.0
    if x == -_INF:
        return 0.0
    t = math.atan(x)
    return t / math.pi + 0.5 + math.sin(2.0 * t) / (2.0 * math.pi)
