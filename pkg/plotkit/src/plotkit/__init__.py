"""Plotting scripts for randive harness output."""

from .render import OVERLAYS, PlotSpec, load_column, overlay_density, render

__version__ = "0.1.0"
