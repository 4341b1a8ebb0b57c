"""Multiplier proposal densities g on Y = (-1, 1) \\ {0}.

A random dive proposes ``x * eps`` or ``x / eps`` with ``eps`` drawn from a
density g supported on Y.  The family implemented here is a two-branch Beta
mixture,

    g(eps) = gamma * Beta(-eps; a1, b1)   on (-1, 0)
           + (1 - gamma) * Beta(eps; a2, b2) on (0, 1),

which covers the uniform choice (gamma = 1/2, all shapes 1) and every skewed
variant used by the experiment harness.  The regularity exponent s0 certifies
that ``integral |eps|^{-s0} g(eps) d(eps)`` is finite, the condition that
upgrades plain ergodicity of the dive chain to a geometric rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy.special import betaln

from .rng import sample_beta, uniform01

__all__ = [
    "MultiplierProposal",
    "uniform_y",
    "beta_mixture",
    "proposal_from_spec",
    "sample_multiplier",
    "multiplier_log_density",
    "regularity_witness",
]

_INF = math.inf

KIND_UNIFORM = "uniform"
KIND_BETA_MIXTURE = "beta-mixture"


@dataclass(frozen=True)
class MultiplierProposal:
    """Two-branch Beta mixture on (-1, 1) \\ {0}.

    ``gamma`` is the weight of the negative branch; ``(a1, b1)`` shape the
    negative branch and ``(a2, b2)`` the positive one.  ``s0`` optionally
    pins an explicit regularity exponent; when absent a safe witness is
    derived from the shapes.
    """

    kind: str = KIND_UNIFORM
    gamma: float = 0.5
    a1: float = 1.0
    b1: float = 1.0
    a2: float = 1.0
    b2: float = 1.0
    s0: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (KIND_UNIFORM, KIND_BETA_MIXTURE):
            raise ValueError(f"unknown proposal kind {self.kind!r}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        for name in ("a1", "b1", "a2", "b2"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.s0 is not None and not 0.0 < self.s0 < 1.0:
            raise ValueError(f"s0 must lie in (0, 1), got {self.s0}")

    def as_spec(self):
        """Config-file form of the proposal."""
        return {
            "kind": self.kind,
            "gamma": self.gamma,
            "a1": self.a1,
            "b1": self.b1,
            "a2": self.a2,
            "b2": self.b2,
        }


def uniform_y():
    """The uniform density 1/2 on (-1, 1) \\ {0}."""
    return MultiplierProposal(kind=KIND_UNIFORM)


def beta_mixture(gamma, a1, b1, a2, b2, s0=None):
    """Beta mixture with negative-branch weight ``gamma``."""
    return MultiplierProposal(KIND_BETA_MIXTURE, gamma, a1, b1, a2, b2, s0)


def proposal_from_spec(spec):
    """Build a proposal from its config-file dictionary form."""
    d = dict(spec)
    kind = d.pop("kind", KIND_UNIFORM)
    known = {"gamma", "a1", "b1", "a2", "b2", "s0"}
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown proposal keys: {sorted(unknown)}")
    if kind == KIND_UNIFORM:
        base = uniform_y()
        if d and any(d[k] != getattr(base, k) for k in d):
            raise ValueError("uniform proposal takes no shape parameters")
        return base
    return MultiplierProposal(kind=kind, **d)


def sample_multiplier(p, rng, size=None):
    """Draw eps from g: negative branch with probability ``p.gamma``.

    A draw of exactly 0 or +-1 (measure-zero endpoint events) is rejected and
    redrawn so the dive chain can never be absorbed at the origin.
    """
    if size is None:
        while True:
            if uniform01(rng) < p.gamma:
                a, b, sign = p.a1, p.b1, -1.0
            else:
                a, b, sign = p.a2, p.b2, 1.0
            if a == 1.0 and b == 1.0:
                mag = uniform01(rng)
            else:
                mag = sample_beta(rng, a, b)
            if 0.0 < mag < 1.0:
                return sign * mag

    import numpy as np

    out = np.empty(size)
    neg = rng.generator.random(size) < p.gamma
    n_neg = int(neg.sum())
    out[neg] = -_beta_branch(p.a1, p.b1, rng, n_neg)
    out[~neg] = _beta_branch(p.a2, p.b2, rng, size - n_neg)
    return out


def _beta_branch(a, b, rng, n):
    if n == 0:
        import numpy as np

        return np.empty(0)
    if a == 1.0 and b == 1.0:
        return uniform01(rng, n)
    return sample_beta(rng, a, b, n)


def _beta_logpdf(x, a, b):
    return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - betaln(a, b)


def multiplier_log_density(p, eps):
    """Log of g at ``eps``; ``-inf`` outside (-1, 1) \\ {0}."""
    if not -1.0 < eps < 1.0 or eps == 0.0:
        return -_INF
    if eps < 0.0:
        return math.log(p.gamma) + _beta_logpdf(-eps, p.a1, p.b1)
    return math.log1p(-p.gamma) + _beta_logpdf(eps, p.a2, p.b2)


def regularity_witness(p):
    """A regularity exponent s0 with ``integral |eps|^{-s0} g < inf``.

    Returns ``min(1/2, a_min / 2)`` where ``a_min`` is the smaller Beta shape
    at the origin side of each branch (integrability near zero needs
    ``s0 < a_min``), or the stored ``p.s0``.  The moment itself is evaluated
    through the Beta-function identity

        integral_0^1 t^{-s} Beta(t; a, b) dt = B(a - s, b) / B(a, b),

    and a non-finite result raises.
    """
    if p.s0 is not None:
        s0 = p.s0
    else:
        s0 = min(0.5, min(p.a1, p.a2) / 2.0)
    if s0 >= min(p.a1, p.a2):
        raise ValueError("regularity exponent must stay below the origin-side shapes")
    moment = p.gamma * math.exp(betaln(p.a1 - s0, p.b1) - betaln(p.a1, p.b1)) + (
        1.0 - p.gamma
    ) * math.exp(betaln(p.a2 - s0, p.b2) - betaln(p.a2, p.b2))
    if not math.isfinite(moment):
        raise ValueError(f"|eps|^(-s0) moment diverges for s0={s0}")
    return s0
