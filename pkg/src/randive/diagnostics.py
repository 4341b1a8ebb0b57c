"""Chain and kernel diagnostics.

Covers the transition-kernel side (the dive proposal's kernel density
``q(x -> y)`` and Monte Carlo estimates of the rejection probability
``rho(x)``) and the chain-output side (autocorrelation, ergodic averages,
Kolmogorov-Smirnov distance to a reference CDF, and three composite-null
normality tests).

The normality tests estimate mean and variance from the sample and use the
standard published p-value approximations (the same ones the usual R
implementations carry): the Anderson-Darling statistic with the
``(1 + 0.75/n + 2.25/n^2)`` small-sample modification, the Cramer-von Mises
statistic with the ``(1 + 0.5/n)`` modification, and the Lilliefors statistic
with the Dallal-Wilkinson / Stephens approximation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .proposals import multiplier_log_density, sample_multiplier
from .rng import RngStream
from .samplers import InvalidStateError

__all__ = [
    "DiagnosticsReport",
    "proposal_kernel_density",
    "rejection_prob_estimate",
    "acf",
    "ks_distance",
    "kolmogorov_pvalue",
    "normality_tests",
    "ergodic_mean",
]

_INF = math.inf


@dataclass
class DiagnosticsReport:
    """Per-chain diagnostic summary, serializable to JSON."""

    acceptance_rate: float
    acf: list = field(default_factory=list)
    ergodic_mean: float = math.nan
    ks_stat: Optional[float] = None
    ks_pvalue: Optional[float] = None
    normality: Optional[dict] = None

    def to_dict(self):
        return {
            "acceptance_rate": self.acceptance_rate,
            "acf": list(self.acf),
            "ergodic_mean": self.ergodic_mean,
            "ks_stat": self.ks_stat,
            "ks_pvalue": self.ks_pvalue,
            "normality": self.normality,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


def proposal_kernel_density(x, y, proposal):
    """Density of the dive kernel q(x -> y) for nonzero ``x`` and ``y``.

    q(x -> y) = (1/2) g(y/x) / |x|     if |y| < |x|   (inner dive)
              + (1/2) g(x/y) |x| / y^2 if |y| > |x|   (outer dive)

    and 0 on the measure-zero boundary |y| = |x|.
    """
    if x == 0.0 or y == 0.0:
        raise ValueError("kernel density needs nonzero x and y")
    ax, ay = abs(x), abs(y)
    if ay < ax:
        return 0.5 * math.exp(multiplier_log_density(proposal, y / x)) / ax
    if ay > ax:
        return 0.5 * math.exp(multiplier_log_density(proposal, x / y)) * ax / (y * y)
    return 0.0


def rejection_prob_estimate(x, target, proposal, n_mc, rng=None):
    """Monte Carlo estimate of the rejection probability rho(x).

    Averages ``1 - alpha`` over ``n_mc`` proposals: a multiplier drawn from
    the proposal and a fair coin for the dive direction.  As ``|x| -> inf``
    the limit is ``(1/2) * integral (1 - |eps|^{p-1}) g`` for a target with
    tail exponent p, and as ``x -> 0`` it is ``(1/2) * integral (1 - |eps|) g``.

    ``rng`` defaults to a fixed-seed stream, making repeated estimates at the
    same arguments identical.
    """
    if n_mc < 1:
        raise ValueError("n_mc must be at least 1")
    if x == 0.0:
        raise InvalidStateError("rho(x) is undefined at the origin")
    lp_x = target.log_density(x)
    if lp_x == -_INF:
        raise InvalidStateError(f"state {x} has zero target density")
    if rng is None:
        rng = RngStream(0)
    exp = math.exp
    total = 0.0
    done = 0
    while done < n_mc:
        m = min(1 << 16, n_mc - done)
        eps = np.asarray(sample_multiplier(proposal, rng, size=m))
        jac_b = np.log(np.abs(eps)).tolist()
        eps = eps.tolist()
        inner = (rng.generator.random(m) < 0.5).tolist()
        logd = target.log_density
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
            d = lpp - lp_x + jac
            if d < 0.0:
                total += 1.0 - exp(d)
        done += m
    return total / n_mc


def acf(series, max_lag):
    """Sample autocorrelation for lags 0..max_lag, biased (1/n) normalization."""
    x = np.asarray(series, dtype=float)
    n = x.size
    if n <= max_lag:
        raise ValueError("series must be longer than max_lag")
    x = x - x.mean()
    c0 = float(x @ x) / n
    if c0 == 0.0:
        raise ValueError("autocorrelation of a constant series is undefined")
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = float(x[:-k] @ x[k:]) / n / c0
    return out


def ks_distance(sample, cdf):
    """Exact Kolmogorov-Smirnov distance of a sample to a reference CDF.

    Returns ``(stat, pvalue)`` with the statistic computed as the exact
    supremum over the sample points and the p-value from the asymptotic
    Kolmogorov distribution of ``sqrt(n) * D``.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("sample must be nonempty")
    f = np.array([cdf(v) for v in x])
    i = np.arange(1, n + 1)
    d_plus = float((i / n - f).max())
    d_minus = float((f - (i - 1) / n).max())
    stat = max(d_plus, d_minus)
    return stat, kolmogorov_pvalue(math.sqrt(n) * stat)


def kolmogorov_pvalue(lam, terms=100):
    """Asymptotic Kolmogorov survival function 2 sum (-1)^{j-1} exp(-2 j^2 lam^2)."""
    if lam <= 0.0:
        return 1.0
    s = 0.0
    for j in range(1, terms + 1):
        s += (-1.0) ** (j - 1) * math.exp(-2.0 * j * j * lam * lam)
    return min(1.0, max(0.0, 2.0 * s))


def _anderson_darling(p, n):
    i = np.arange(1, n + 1)
    logs = np.log(p) + np.log1p(-p[::-1])
    a2 = -n - float(((2 * i - 1) * logs).mean())
    mod = a2 * (1.0 + 0.75 / n + 2.25 / (n * n))
    if mod < 0.2:
        pval = 1.0 - math.exp(-13.436 + 101.14 * mod - 223.73 * mod * mod)
    elif mod < 0.34:
        pval = 1.0 - math.exp(-8.318 + 42.796 * mod - 59.938 * mod * mod)
    elif mod < 0.6:
        pval = math.exp(0.9177 - 4.279 * mod - 1.38 * mod * mod)
    elif mod < 10.0:
        pval = math.exp(1.2937 - 5.709 * mod + 0.0186 * mod * mod)
    else:
        pval = 3.7e-24
    return a2, min(1.0, max(0.0, pval))


def _cramer_von_mises(p, n):
    i = np.arange(1, n + 1)
    w2 = 1.0 / (12.0 * n) + float(((p - (2 * i - 1) / (2 * n)) ** 2).sum())
    mod = w2 * (1.0 + 0.5 / n)
    if mod < 0.0275:
        pval = 1.0 - math.exp(-13.953 + 775.5 * mod - 12542.61 * mod * mod)
    elif mod < 0.051:
        pval = 1.0 - math.exp(-5.903 + 179.546 * mod - 1515.29 * mod * mod)
    elif mod < 0.092:
        pval = math.exp(0.886 - 31.62 * mod + 10.897 * mod * mod)
    elif mod < 1.1:
        pval = math.exp(1.111 - 34.242 * mod + 12.832 * mod * mod)
    else:
        pval = 7.37e-10
    return w2, min(1.0, max(0.0, pval))


def _lilliefors(p, n):
    i = np.arange(1, n + 1)
    d = max(float((i / n - p).max()), float((p - (i - 1) / n).max()))
    if n > 100:
        kd = d * (n / 100.0) ** 0.49
        nd = 100.0
    else:
        kd = d
        nd = float(n)
    pval = math.exp(
        -7.01256 * kd * kd * (nd + 2.78019)
        + 2.99587 * kd * math.sqrt(nd + 2.78019)
        - 0.122119
        + 0.974598 / math.sqrt(nd)
        + 1.67997 / nd
    )
    if pval > 0.1:
        kk = (math.sqrt(n) - 0.01 + 0.85 / math.sqrt(n)) * d
        if kk <= 0.302:
            pval = 1.0
        elif kk <= 0.5:
            pval = 2.76773 - 19.828315 * kk + 80.709644 * kk**2 - 138.55152 * kk**3 + 81.218052 * kk**4
        elif kk <= 0.9:
            pval = -4.901232 + 40.662806 * kk - 97.490286 * kk**2 + 94.029866 * kk**3 - 32.355711 * kk**4
        elif kk <= 1.31:
            pval = 6.198765 - 19.558097 * kk + 23.186922 * kk**2 - 12.234627 * kk**3 + 2.423045 * kk**4
        else:
            pval = 0.0
    return d, min(1.0, max(0.0, pval))


def normality_tests(sample):
    """Anderson-Darling, Cramer-von Mises and Lilliefors tests of normality.

    Composite null: the sample mean and (ddof=1) standard deviation are
    estimated from the data.  Returns a dictionary with keys ``ad_stat``,
    ``ad_p``, ``cvm_stat``, ``cvm_p``, ``lillie_stat``, ``lillie_p``.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n < 8:
        raise ValueError("normality tests need at least 8 observations")
    mu = float(x.mean())
    sd = float(x.std(ddof=1))
    if not (math.isfinite(sd) and sd > 0.0):
        raise ValueError("sample is degenerate (zero or non-finite variance)")
    p = ndtr((x - mu) / sd)
    p = np.clip(p, 1e-323, 1.0 - 1e-16)
    ad_stat, ad_p = _anderson_darling(p, n)
    cvm_stat, cvm_p = _cramer_von_mises(p, n)
    lillie_stat, lillie_p = _lilliefors(p, n)
    return {
        "ad_stat": ad_stat,
        "ad_p": ad_p,
        "cvm_stat": cvm_stat,
        "cvm_p": cvm_p,
        "lillie_stat": lillie_stat,
        "lillie_p": lillie_p,
    }


def ergodic_mean(trace, h):
    """Arithmetic mean of ``h`` over the recorded states of a trace."""
    states = np.asarray(trace.states)
    if states.size == 0:
        raise ValueError("trace has no recorded states")
    try:
        vals = np.asarray(h(states), dtype=float)
        if vals.shape != (len(states),):
            raise TypeError
    except Exception:
        vals = np.array([float(h(s)) for s in states])
    return float(vals.mean())
