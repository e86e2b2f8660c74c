"""Render an eigenvalue histogram CSV with a semicircle-density overlay.

The input CSV is trusted as the single source of truth (this package never
recomputes spectra); the only math here is the closed-form density
rho(x; r) = (2 / (pi r^2)) sqrt((r^2 - x^2)_+). SVG output is deterministic:
no timestamps, fixed hash salt, so golden files are byte-stable.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

HEADER = ["bin_lo", "bin_hi", "density", "count"]
FORMATS = ("svg", "png")
MIN_CURVE_POINTS = 400


class SchemaError(ValueError):
    """Histogram CSV does not match the published schema."""


@dataclass(frozen=True)
class PlotSpec:
    histogram: str | Path
    radius: float
    title: str
    out: str | Path
    format: str = "svg"

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")


@dataclass(frozen=True)
class RenderResult:
    out: Path
    curve_x: np.ndarray
    curve_y: np.ndarray
    peak: float
    curve_integral: float


def semicircle_density(x, r: float):
    x = np.asarray(x, dtype=np.float64)
    return 2.0 / (math.pi * r * r) * np.sqrt(np.clip(r * r - x * x, 0.0, None))


def read_histogram(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Parse and validate a histogram CSV; returns (lo, hi, density, count)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != HEADER:
            raise SchemaError(f"{path}: header {header} != {HEADER}")
        lo, hi, dens, cnt = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise SchemaError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            try:
                lo.append(float(row[0]))
                hi.append(float(row[1]))
                dens.append(float(row[2]))
                cnt.append(int(row[3]))
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
    if not lo:
        raise SchemaError(f"{path}: no histogram rows")
    lo_a, hi_a = np.array(lo), np.array(hi)
    dens_a, cnt_a = np.array(dens), np.array(cnt, dtype=np.int64)
    if np.any(hi_a <= lo_a):
        raise SchemaError(f"{path}: bin_hi must exceed bin_lo in every row")
    if np.any(lo_a[1:] < hi_a[:-1] - 1e-12):
        raise SchemaError(f"{path}: bins overlap or are out of order")
    if np.any(dens_a < 0) or np.any(cnt_a < 0):
        raise SchemaError(f"{path}: negative density or count")
    return lo_a, hi_a, dens_a, cnt_a


def _curve_grid(lo: float, hi: float, radius: float) -> np.ndarray:
    base = np.linspace(lo, hi, MIN_CURVE_POINTS * 2 + 1)
    anchors = [v for v in (0.0, -radius, radius) if lo <= v <= hi]
    return np.unique(np.concatenate([base, np.array(anchors)]))


def render_esd(spec: PlotSpec) -> RenderResult:
    """Draw the density bars plus the overlay curve and write the image."""
    lo, hi, dens, cnt = read_histogram(spec.histogram)
    if int(cnt.sum()) == 0:
        raise SchemaError(f"{spec.histogram}: histogram is empty (all counts zero)")
    r = float(spec.radius)
    xs = _curve_grid(float(lo[0]), float(hi[-1]), r)
    ys = semicircle_density(xs, r)

    plt.rcParams["svg.hashsalt"] = "plotkit"
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.bar(lo, dens, width=hi - lo, align="edge",
           color="#9ecae1", edgecolor="#4a7fae", linewidth=0.4, label="ESD")
    ax.plot(xs, ys, color="#c23b22", linewidth=1.8, label="semicircle")
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    ax.set_title(spec.title)
    ax.legend(frameon=False)
    fig.tight_layout()
    out = Path(spec.out)
    try:
        fig.savefig(out, format=spec.format, metadata=_metadata(spec.format), dpi=150)
    finally:
        plt.close(fig)
    return RenderResult(
        out=out,
        curve_x=xs,
        curve_y=ys,
        peak=float(ys.max()),
        curve_integral=float(np.trapezoid(ys, xs)),
    )


def _metadata(fmt: str) -> dict:
    # drop run-dependent fields so repeated renders are byte-identical
    if fmt == "svg":
        return {"Date": None, "Creator": None}
    return {"Software": None}
