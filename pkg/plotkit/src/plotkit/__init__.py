"""Eigenvalue-histogram rendering with semicircle-density overlays."""

__version__ = "0.1.0"

from .render import PlotSpec, RenderResult, render_esd, semicircle_density

__all__ = ["PlotSpec", "RenderResult", "render_esd", "semicircle_density"]
