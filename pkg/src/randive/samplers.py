"""Metropolis-Hastings steps and chain drivers.

The random dive step proposes ``x * eps`` (an inner dive, shrinking the
magnitude) or ``x / eps`` (an outer dive, expanding it) with ``eps`` drawn
from a multiplier proposal on (-1, 1) \\ {0}; a fair coin picks the
direction.  The acceptance ratio carries the Jacobian of the map, ``|eps|``
for inner and ``1/|eps|`` for outer dives, and is free of the proposal
density itself.

Baselines share the same driver: a symmetric random walk with normal or
Cauchy increments, and a Langevin walk whose proposal mean drifts by
``(sigma^2 / 2) * grad log pi``.

All acceptance arithmetic happens in log space; the ``min(..., 1)`` of the
acceptance probability becomes a ``min(..., 0)`` that is folded into the
comparison ``log(u') < log_alpha`` with a fresh uniform ``u'``.  An outer
dive that overflows to infinity (or an inner dive that underflows to zero)
is treated as a zero-density proposal and rejected, which keeps every chain
state nonzero and finite without clamping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .proposals import MultiplierProposal, sample_multiplier
from .rng import RngStream, sample_normal, uniform01
from .targets import TargetDensity

__all__ = [
    "InvalidStateError",
    "ChainConfig",
    "Trace",
    "DiveOutcome",
    "INNER",
    "OUTER",
    "rdmh_accept_log",
    "dive_outcome",
    "rdmh_step",
    "rdmh_step_multivariate",
    "rdmh_componentwise_sweep",
    "rwmh_step",
    "lmh_step",
    "run_chain",
]

_INF = math.inf
_LOG = math.log

INNER = "inner"
OUTER = "outer"

SAMPLER_NAMES = ("rdmh", "rdmh-mv", "rdmh-cw", "rwmh-normal", "rwmh-cauchy", "lmh")

# Randomness is pre-drawn in blocks of this many steps inside the chain
# drivers; the value only affects speed, never the draw sequence.
_BLOCK = 16384


class InvalidStateError(ValueError):
    """The chain sits at a state of zero target density (or at the origin)."""


@dataclass
class ChainConfig:
    """Run-length bookkeeping for a single chain.

    ``init`` is a float for one-dimensional samplers or a length-k array for
    the multivariate ones; random dive samplers additionally require every
    coordinate of ``init`` to be nonzero.
    """

    n_iter: int
    burn_in: int = 0
    thin: int = 1
    init: Union[float, Sequence[float]] = 1.0
    seed: int = 0
    stream_index: int = 0

    def __post_init__(self):
        if self.n_iter < 1:
            raise ValueError("n_iter must be at least 1")
        if not 0 <= self.burn_in < self.n_iter:
            raise ValueError("burn_in must satisfy 0 <= burn_in < n_iter")
        if self.thin < 1:
            raise ValueError("thin must be at least 1")


@dataclass
class Trace:
    """Recorded chain output.

    ``states`` holds the post-burn-in, thinned states; ``accepted`` holds one
    flag per accept decision over the whole run (per step for single-block
    samplers, per coordinate update for componentwise sweeps), before any
    thinning.  ``acceptance_rate`` is the mean of ``accepted``.
    """

    states: np.ndarray
    accepted: np.ndarray
    acceptance_rate: float
    config: ChainConfig
    sampler: dict = field(default_factory=dict)

    @property
    def dim(self):
        return 1 if self.states.ndim == 1 else self.states.shape[1]


@dataclass(frozen=True)
class DiveOutcome:
    """One proposed dive: the proposal, its direction, and its log acceptance."""

    proposed: float
    direction: str
    log_alpha: float


def _jacobian_log(eps, direction):
    if direction == INNER:
        return _LOG(abs(eps))
    if direction == OUTER:
        return -_LOG(abs(eps))
    raise ValueError(f"direction must be {INNER!r} or {OUTER!r}, got {direction!r}")


def _proposal_log_density(target, x_prime):
    """Target log-density of a proposal, with origin and overflow guarded."""
    if x_prime == 0.0 or not -_INF < x_prime < _INF:
        return -_INF
    return target.log_density(x_prime)


def rdmh_accept_log(x, x_prime, eps, direction, target):
    """Log acceptance probability of a dive from ``x`` to ``x_prime``.

    Inner dives accept with ``min(1, pi(x*eps)/pi(x) * |eps|)`` and outer
    dives with ``min(1, pi(x/eps)/pi(x) / |eps|)``; this returns the log of
    that probability (always <= 0).
    """
    if x == 0.0:
        raise InvalidStateError("current state is the origin")
    if not (-1.0 < eps < 1.0) or eps == 0.0:
        raise ValueError(f"eps must lie in (-1, 1) away from 0, got {eps}")
    lp_x = target.log_density(x)
    if lp_x == -_INF:
        raise InvalidStateError(f"current state {x} has zero target density")
    jac = _jacobian_log(eps, direction)
    lp_p = _proposal_log_density(target, x_prime)
    return min(0.0, lp_p - lp_x + jac)


def dive_outcome(x, eps, direction, target):
    """Apply one dive deterministically and report its acceptance log-probability."""
    x_prime = x * eps if direction == INNER else x / eps
    return DiveOutcome(x_prime, direction, rdmh_accept_log(x, x_prime, eps, direction, target))


def _require_valid_scalar_state(x, target):
    if x == 0.0:
        raise InvalidStateError("current state is the origin")
    lp = target.log_density(x)
    if lp == -_INF:
        raise InvalidStateError(f"current state {x} has zero target density")
    return lp


def rdmh_step(x, target, proposal, rng):
    """One random dive update from a nonzero state; returns ``(next, accepted)``."""
    lp = _require_valid_scalar_state(x, target)
    x_new, _, accepted = _rdmh_move(x, lp, target, proposal, rng)
    return x_new, accepted


def _rdmh_move(x, lp_x, target, proposal, rng):
    eps = sample_multiplier(proposal, rng)
    u = uniform01(rng)
    if u < 0.5:
        x_prime = x * eps
        jac = _LOG(abs(eps))
    else:
        x_prime = x / eps
        jac = -_LOG(abs(eps))
    lp_prime = _proposal_log_density(target, x_prime)
    log_alpha = lp_prime - lp_x + jac
    if _LOG(uniform01(rng)) < log_alpha:
        return x_prime, lp_prime, True
    return x, lp_x, False


def _as_proposal_list(proposal, k):
    if isinstance(proposal, MultiplierProposal):
        return [proposal] * k
    proposals = list(proposal)
    if len(proposals) != k:
        raise ValueError(f"need one proposal per coordinate ({k}), got {len(proposals)}")
    return proposals


def _require_valid_vector_state(x, target):
    if np.any(x == 0.0):
        raise InvalidStateError("a coordinate of the current state is zero")
    lp = target.log_density(x)
    if lp == -_INF:
        raise InvalidStateError("current state has zero target density")
    return lp


def rdmh_step_multivariate(x, target, proposals, rng):
    """Jointly dive every coordinate and accept or reject the whole move.

    Each coordinate draws its own multiplier and direction coin; the log
    acceptance ratio sums ``log pi(x') - log pi(x)`` with ``+log|eps_i|``
    over inner coordinates and ``-log|eps_j|`` over outer ones (the Jacobian
    magnitude of the joint map).  With k = 1 this makes exactly the same
    decisions as :func:`rdmh_step` on the same stream.
    """
    x = np.asarray(x, dtype=float)
    lp_x = _require_valid_vector_state(x, target)
    x_new, _, accepted = _rdmh_mv_move(x, lp_x, target, _as_proposal_list(proposals, x.size), rng)
    return x_new, accepted


def _rdmh_mv_move(x, lp_x, target, proposals, rng):
    k = x.size
    eps = np.empty(k)
    for i in range(k):
        eps[i] = sample_multiplier(proposals[i], rng)
    inner = np.empty(k, dtype=bool)
    for i in range(k):
        inner[i] = uniform01(rng) < 0.5
    x_prime = np.where(inner, x * eps, x / eps)
    log_abs = np.log(np.abs(eps))
    jac = float(log_abs[inner].sum() - log_abs[~inner].sum())
    if np.any(x_prime == 0.0) or not np.all(np.isfinite(x_prime)):
        lp_prime = -_INF
    else:
        lp_prime = target.log_density(x_prime)
    log_alpha = lp_prime - lp_x + jac
    if _LOG(uniform01(rng)) < log_alpha:
        return x_prime, lp_prime, True
    return x, lp_x, False


def rdmh_componentwise_sweep(x, target, proposals, rng):
    """Dive each coordinate in order, holding the others at their newest values.

    Every coordinate update is a one-dimensional random dive against the full
    joint log-density; the updated point is returned.
    """
    x = np.array(x, dtype=float)
    lp = _require_valid_vector_state(x, target)
    x, _, _ = _rdmh_cw_sweep(x, lp, target, _as_proposal_list(proposals, x.size), rng)
    return x


def _rdmh_cw_sweep(x, lp_x, target, proposals, rng):
    """One in-place sweep; returns ``(x, lp, accepted_flags)``."""
    k = x.size
    flags = np.zeros(k, dtype=bool)
    for i in range(k):
        eps = sample_multiplier(proposals[i], rng)
        u = uniform01(rng)
        xi = x[i]
        if u < 0.5:
            xi_new = xi * eps
            jac = _LOG(abs(eps))
        else:
            xi_new = xi / eps
            jac = -_LOG(abs(eps))
        if xi_new == 0.0 or not -_INF < xi_new < _INF:
            lp_new = -_INF
        else:
            x[i] = xi_new
            lp_new = target.log_density(x)
        if _LOG(uniform01(rng)) < lp_new - lp_x + jac:
            lp_x = lp_new
            flags[i] = True
        else:
            x[i] = xi
    return x, lp_x, flags


def _increment_drawer(increment):
    """Parse an increment spec ("normal", tau) or ("cauchy", scale)."""
    kind, scale = increment
    if not scale > 0.0:
        raise ValueError(f"increment scale must be positive, got {scale}")
    if kind == "normal":
        return lambda g, size=None: scale * g.standard_normal(size)
    if kind == "cauchy":
        return lambda g, size=None: scale * g.standard_cauchy(size)
    raise ValueError(f"increment kind must be 'normal' or 'cauchy', got {kind!r}")


def rwmh_step(x, target, increment, rng):
    """One symmetric random walk update; ``increment`` is ``(kind, scale)``."""
    draw = _increment_drawer(increment)
    lp = target.log_density(x)
    x_new, _, accepted = _rwmh_move(x, lp, target, draw, rng)
    return x_new, accepted


def _rwmh_move(x, lp_x, target, draw, rng):
    y = x + draw(rng.generator)
    lp_y = target.log_density(y)
    if lp_y == -_INF:
        accepted = False
    elif lp_x == -_INF:
        accepted = True
    else:
        accepted = _LOG(uniform01(rng)) < lp_y - lp_x
    if accepted:
        return y, lp_y, True
    return x, lp_x, False


def lmh_step(x, target, sigma, rng):
    """One Langevin walk update with proposal N(x + (sigma^2/2) grad, sigma^2).

    Accepts with the full Hastings ratio, including the forward and backward
    Gaussian proposal densities.
    """
    if target.grad_log_density is None:
        raise ValueError("Langevin steps need a target with a gradient")
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    lp = target.log_density(x)
    g = target.grad_log_density(x)
    x_new, _, _, accepted = _lmh_move(x, lp, g, target, sigma, rng)
    return x_new, accepted


def _lmh_move(x, lp_x, grad_x, target, sigma, rng):
    half_s2 = 0.5 * sigma * sigma
    two_s2 = 2.0 * sigma * sigma
    z = rng.generator.standard_normal()
    y = x + half_s2 * grad_x + sigma * z
    lp_y = target.log_density(y)
    if lp_y == -_INF:
        log_alpha = -_INF
        grad_y = 0.0
    else:
        grad_y = target.grad_log_density(y)
        mean_back = y + half_s2 * grad_y
        # forward log-density reduces to -z^2/2 because y - mean_forward = sigma*z
        log_alpha = lp_y - lp_x - (x - mean_back) ** 2 / two_s2 + 0.5 * z * z
    if _LOG(uniform01(rng)) < log_alpha:
        return y, lp_y, grad_y, True
    return x, lp_x, grad_x, False


# ---------------------------------------------------------------------------
# chain driver


def _n_recorded(config):
    return (config.n_iter - config.burn_in) // config.thin


def _validate_sampler_spec(sampler):
    spec = dict(sampler)
    name = spec.pop("sampler", None)
    if name not in SAMPLER_NAMES:
        raise ValueError(f"unknown sampler {name!r}; expected one of {SAMPLER_NAMES}")
    allowed = {
        "rdmh": set(),
        "rdmh-mv": set(),
        "rdmh-cw": set(),
        "rwmh-normal": {"tau"},
        "rwmh-cauchy": {"scale"},
        "lmh": {"scale"},
    }[name]
    unknown = set(spec) - allowed
    if unknown:
        raise ValueError(f"sampler {name!r} does not accept keys {sorted(unknown)}")
    missing = allowed - set(spec)
    if missing:
        raise ValueError(f"sampler {name!r} requires keys {sorted(missing)}")
    return name, spec


def run_chain(config, sampler, target, proposal=None):
    """Drive one chain and return its :class:`Trace`.

    ``sampler`` is a specification dictionary, e.g. ``{"sampler": "rdmh"}``,
    ``{"sampler": "rwmh-normal", "tau": 1.5}`` or ``{"sampler": "lmh",
    "scale": 2.0}``; random dive samplers take the multiplier ``proposal``
    (a single one, or one per coordinate for the multivariate drivers).

    The recorded states are those after burn-in, keeping every ``thin``-th;
    the acceptance rate is computed over every decision of the full run.
    Identical ``(config, sampler, target, proposal)`` always reproduce the
    same trace.
    """
    name, params = _validate_sampler_spec(sampler)
    rng = RngStream(config.seed, config.stream_index)
    n_rec = _n_recorded(config)
    if n_rec < 1:
        raise ValueError(
            f"no states would be recorded: (n_iter - burn_in) // thin = {n_rec}"
        )
    if name in ("rdmh-mv", "rdmh-cw"):
        x0 = np.array(config.init, dtype=float)
        if x0.ndim != 1:
            raise ValueError("multivariate samplers need a one-dimensional init vector")
        lp0 = _require_valid_vector_state(x0, target)
        proposals = _as_proposal_list(proposal, x0.size)
        states = np.empty((n_rec, x0.size))
        if name == "rdmh-mv":
            accepted = _loop_kernel_mv(x0, lp0, target, proposals, rng, config, states)
        else:
            accepted = _loop_kernel_cw(x0, lp0, target, proposals, rng, config, states)
    else:
        x0 = float(np.asarray(config.init, dtype=float))
        states = np.empty(n_rec)
        accepted = np.zeros(config.n_iter, dtype=bool)
        if name == "rdmh":
            if proposal is None:
                raise ValueError("random dive samplers need a multiplier proposal")
            lp0 = _require_valid_scalar_state(x0, target)
            _loop_rdmh(x0, lp0, target, proposal, rng, config, states, accepted)
        elif name in ("rwmh-normal", "rwmh-cauchy"):
            scale = params["tau"] if name == "rwmh-normal" else params["scale"]
            kind = "normal" if name == "rwmh-normal" else "cauchy"
            draw = _increment_drawer((kind, scale))
            lp0 = target.log_density(x0)
            if lp0 == -_INF:
                raise InvalidStateError("initial state has zero target density")
            _loop_rwmh(x0, lp0, target, draw, rng, config, states, accepted)
        else:
            if target.grad_log_density is None:
                raise ValueError("Langevin steps need a target with a gradient")
            sigma = params["scale"]
            if not sigma > 0.0:
                raise ValueError(f"scale must be positive, got {sigma}")
            lp0 = target.log_density(x0)
            if lp0 == -_INF:
                raise InvalidStateError("initial state has zero target density")
            _loop_lmh(x0, lp0, target, sigma, rng, config, states, accepted)
    return Trace(
        states=states,
        accepted=accepted,
        acceptance_rate=float(accepted.mean()),
        config=config,
        sampler=dict(sampler),
    )


def _loop_rdmh(x, lp, target, proposal, rng, config, states, accepted):
    logd = target.log_density
    n, thin = config.n_iter, config.thin
    next_rec = config.burn_in + thin
    j = 0
    done = 0
    while done < n:
        m = min(_BLOCK, n - done)
        eps_b = np.asarray(sample_multiplier(proposal, rng, size=m))
        jac_b = np.log(np.abs(eps_b)).tolist()
        eps = eps_b.tolist()
        inner = (rng.generator.random(m) < 0.5).tolist()
        log_u = np.log(uniform01(rng, size=m)).tolist()
        for i in range(m):
            e = eps[i]
            if inner[i]:
                xp = x * e
                jac = jac_b[i]
            else:
                xp = x / e
                jac = -jac_b[i]
            if xp == 0.0 or not -_INF < xp < _INF:
                lpp = -_INF
            else:
                lpp = logd(xp)
            d = lpp - lp + jac
            if d >= 0.0 or log_u[i] < d:
                x = xp
                lp = lpp
                accepted[done + i] = True
            if done + i + 1 == next_rec:
                states[j] = x
                j += 1
                next_rec += thin
        done += m


def _loop_rwmh(x, lp, target, draw, rng, config, states, accepted):
    logd = target.log_density
    n, thin = config.n_iter, config.thin
    next_rec = config.burn_in + thin
    j = 0
    done = 0
    while done < n:
        m = min(_BLOCK, n - done)
        inc = np.asarray(draw(rng.generator, m)).tolist()
        log_u = np.log(uniform01(rng, size=m)).tolist()
        for i in range(m):
            y = x + inc[i]
            lpy = logd(y)
            d = lpy - lp
            if d >= 0.0 or log_u[i] < d:
                x = y
                lp = lpy
                accepted[done + i] = True
            if done + i + 1 == next_rec:
                states[j] = x
                j += 1
                next_rec += thin
        done += m


def _loop_lmh(x, lp, target, sigma, rng, config, states, accepted):
    logd = target.log_density
    grad = target.grad_log_density
    gx = grad(x)
    half_s2 = 0.5 * sigma * sigma
    two_s2 = 2.0 * sigma * sigma
    n, thin = config.n_iter, config.thin
    next_rec = config.burn_in + thin
    j = 0
    done = 0
    while done < n:
        m = min(_BLOCK, n - done)
        z_b = rng.generator.standard_normal(m).tolist()
        log_u = np.log(uniform01(rng, size=m)).tolist()
        for i in range(m):
            z = z_b[i]
            y = x + half_s2 * gx + sigma * z
            lpy = logd(y)
            if lpy == -_INF:
                d = -_INF
                gy = gx
            else:
                gy = grad(y)
                mb = y + half_s2 * gy
                d = lpy - lp - (x - mb) * (x - mb) / two_s2 + 0.5 * z * z
            if d >= 0.0 or log_u[i] < d:
                x = y
                lp = lpy
                gx = gy
                accepted[done + i] = True
            if done + i + 1 == next_rec:
                states[j] = x
                j += 1
                next_rec += thin
        done += m


def _loop_kernel_mv(x, lp, target, proposals, rng, config, states):
    n, thin = config.n_iter, config.thin
    accepted = np.zeros(n, dtype=bool)
    next_rec = config.burn_in + thin
    j = 0
    for t in range(1, n + 1):
        x, lp, ok = _rdmh_mv_move(x, lp, target, proposals, rng)
        accepted[t - 1] = ok
        if t == next_rec:
            states[j] = x
            j += 1
            next_rec += thin
    return accepted


def _loop_kernel_cw(x, lp, target, proposals, rng, config, states):
    n, thin = config.n_iter, config.thin
    k = x.size
    accepted = np.zeros(n * k, dtype=bool)
    next_rec = config.burn_in + thin
    j = 0
    for t in range(1, n + 1):
        x, lp, flags = _rdmh_cw_sweep(x, lp, target, proposals, rng)
        accepted[(t - 1) * k : t * k] = flags
        if t == next_rec:
            states[j] = x
            j += 1
            next_rec += thin
    return accepted
