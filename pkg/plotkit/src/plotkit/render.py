"""Render harness CSV output as histogram, traceplot, ACF plot, or QQ plot.

The input schema is the harness trace format (``iter``, one or more value
columns, ``accepted``) or any of its per-chain statistics files (``chains.csv``
and friends); the column to plot can be named explicitly and defaults to the
first value column.  Everything here is stateless: one CSV in, one image out,
plus a small metadata dictionary with the numerical self-checks.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from scipy.special import ndtri  # noqa: E402

__all__ = ["PlotSpec", "render", "load_column", "overlay_density", "OVERLAYS"]

KINDS = ("hist", "trace", "acf", "qq")

_NON_VALUE_COLUMNS = ("iter", "accepted", "chain")


@dataclass(frozen=True)
class PlotSpec:
    """One rendering job: input CSV, plot kind, optional overlay, output path."""

    input_path: str
    kind: str
    output_path: str
    column: Optional[str] = None
    overlay: Optional[str] = None
    max_lag: int = 50
    bins: int = 60

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.overlay is not None and self.overlay not in OVERLAYS:
            raise ValueError(
                f"unknown overlay {self.overlay!r}; expected one of {sorted(OVERLAYS)}"
            )


def _two_normal_mixture(sd1, mu2, sd2):
    c1 = 0.5 / (sd1 * math.sqrt(2.0 * math.pi))
    c2 = 0.5 / (sd2 * math.sqrt(2.0 * math.pi))

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return c1 * np.exp(-0.5 * (x / sd1) ** 2) + c2 * np.exp(-0.5 * ((x - mu2) / sd2) ** 2)

    return pdf


def _thick_tail_pdf(x):
    x = np.asarray(x, dtype=float)
    return (2.0 / math.pi) / (1.0 + x * x) ** 2


# Normalized densities of the named benchmark targets; mixture components are
# parameterized by their variances (0.25, 1e-4, 1), matching the harness.
OVERLAYS = {
    "bimodal": _two_normal_mixture(0.5, 10.0, 0.5),
    "needle": _two_normal_mixture(0.01, 5.0, 1.0),
    "thicktail": _thick_tail_pdf,
}


def overlay_density(name):
    """Normalized density curve for a named built-in target."""
    return OVERLAYS[name]


def _is_number(text):
    try:
        float(text)
        return True
    except (TypeError, ValueError):
        return False


def load_column(path, column=None):
    """Read one numeric column from a harness CSV.

    Returns ``(values, column_name)``.  With no explicit column, the first
    numeric non-bookkeeping column is used.  A missing file or column raises
    a descriptive error naming what was absent.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames
        if not fields:
            raise ValueError(f"{path}: empty file, expected a CSV header")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if column is None:
        candidates = [
            f for f in fields if f not in _NON_VALUE_COLUMNS and _is_number(rows[0].get(f))
        ]
        if not candidates:
            raise ValueError(f"{path}: no numeric value column among {fields}")
        column = candidates[0]
    elif column not in fields:
        raise ValueError(f"{path}: missing column {column!r} (file has {fields})")
    values = []
    for lineno, row in enumerate(rows, start=2):
        try:
            values.append(float(row[column]))
        except (TypeError, ValueError):
            raise ValueError(
                f"{path}:{lineno}: non-numeric value {row[column]!r} in column {column!r}"
            ) from None
    return np.asarray(values), column


def _biased_acf(x, max_lag):
    x = x - x.mean()
    c0 = float(x @ x) / x.size
    if c0 == 0.0:
        raise ValueError("cannot autocorrelate a constant series")
    lags = min(max_lag, x.size - 1)
    out = np.empty(lags + 1)
    out[0] = 1.0
    for k in range(1, lags + 1):
        out[k] = float(x[:-k] @ x[k:]) / x.size / c0
    return out


def render(spec):
    """Render one plot and return metadata from the numeric self-checks."""
    values, column = load_column(spec.input_path, spec.column)
    meta = {"output_path": spec.output_path, "column": column, "n_points": int(values.size)}
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    try:
        if spec.kind == "hist":
            ax.hist(values, bins=spec.bins, density=True, color="#7f9fc4", edgecolor="white")
            ax.set_xlabel(column)
            ax.set_ylabel("density")
            if spec.overlay:
                lo, hi = float(values.min()), float(values.max())
                grid = np.linspace(lo, hi, 2001)
                curve = OVERLAYS[spec.overlay](grid)
                ax.plot(grid, curve, "k-", lw=1.5, label=spec.overlay)
                ax.legend()
                meta["overlay_integral"] = float(np.trapezoid(curve, grid))
        elif spec.kind == "trace":
            ax.plot(values, lw=0.5, color="#33547a")
            ax.set_xlabel("iteration")
            ax.set_ylabel(column)
        elif spec.kind == "acf":
            rho = _biased_acf(values, spec.max_lag)
            ax.bar(np.arange(rho.size), rho, width=0.4, color="#33547a")
            ax.axhline(0.0, color="black", lw=0.8)
            ax.set_xlabel("lag")
            ax.set_ylabel("autocorrelation")
            meta["acf_lag1"] = float(rho[1]) if rho.size > 1 else None
        else:  # qq
            n = values.size
            sample = np.sort(values)
            theoretical = ndtri((np.arange(1, n + 1) - 0.5) / n)
            ax.plot(theoretical, sample, "o", ms=2.5, color="#33547a")
            slope, intercept = np.polyfit(theoretical, sample, 1)
            ax.plot(theoretical, slope * theoretical + intercept, "r-", lw=1.0)
            ax.set_xlabel("normal quantiles")
            ax.set_ylabel("sample quantiles")
            residual = sample - (slope * theoretical + intercept)
            meta["qq_max_abs_residual"] = float(np.max(np.abs(residual)))
        ax.set_title(f"{spec.kind}: {column}")
        fig.tight_layout()
        fig.savefig(spec.output_path, dpi=110)
    finally:
        plt.close(fig)
    return meta
