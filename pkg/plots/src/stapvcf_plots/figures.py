"""Figure rendering: one pure function per figure kind.

Rendering is a pure function of the input CSVs; a fixed style version and the
Agg backend make identical inputs produce byte-identical image files.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import schemas
from .schemas import SchemaError

STYLE_VERSION = 1
_METADATA = {"Software": f"stapvcf-plots style {STYLE_VERSION}"}

_AXIS_LABELS = {
    "IF": ("normalized Doppler", "improvement factor (dB)"),
    "output-SCNR": ("input SCNR (dB)", "output SCNR (dB)"),
    "output-power": ("range cell", "output power (dB)"),
    "beampattern-doppler": ("normalized Doppler", "gain (dB)"),
    "beampattern-spatial": ("normalized spatial frequency", "gain (dB)"),
}


@dataclass
class FigureSpec:
    figure_kind: str
    inputs: list[str]
    output: str
    db_floor: float = -80.0
    grid: bool = True
    title: str | None = None

    def __post_init__(self):
        if self.figure_kind not in schemas.FIGURE_KINDS:
            raise ValueError(f"unknown figure_kind '{self.figure_kind}'; "
                             f"one of {schemas.FIGURE_KINDS}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


@dataclass
class RenderResult:
    """Path of the written image plus per-kind diagnostics."""

    path: str
    info: dict = field(default_factory=dict)


def render(spec: FigureSpec) -> RenderResult:
    """Renders one figure; raises SchemaError (no file written) on bad input."""
    renderer = _RENDERERS[spec.figure_kind]
    fig, info = renderer(spec)
    try:
        if spec.title:
            fig.suptitle(spec.title)
        fig.savefig(spec.output, dpi=120, metadata=_METADATA)
    finally:
        plt.close(fig)
    return RenderResult(path=spec.output, info=info)


def _new_axes():
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    return fig, ax


def _render_curve_family(spec: FigureSpec):
    fig, ax = _new_axes()
    count = 0
    labels = ("abscissa", "value (dB)")
    for path in spec.inputs:
        for curve in schemas.read_curves(path, spec.figure_kind):
            y = np.maximum(np.asarray(curve.y), spec.db_floor)
            ax.plot(curve.x, y, label=curve.estimator)
            count += 1
            labels = _AXIS_LABELS[curve.metric_kind]
    ax.set_xlabel(labels[0])
    ax.set_ylabel(labels[1])
    if spec.grid:
        ax.grid(True, alpha=0.4)
    ax.legend(loc="best")
    return fig, {"curves": count}


def _render_capon(spec: FigureSpec):
    doppler, spatial, grid = schemas.read_capon(spec.inputs[0])
    fig, ax = _new_axes()
    z = np.maximum(np.asarray(grid), spec.db_floor)
    mesh = ax.pcolormesh(spatial, doppler, z, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="power (dB)")
    ax.set_xlabel("normalized spatial frequency")
    ax.set_ylabel("normalized Doppler")
    return fig, {"shape": (len(doppler), len(spatial))}


def _render_brauer(spec: FigureSpec):
    """Eigenvalue-inclusion discs: one circle per cell on the real axis plus
    the batch boundary circle; cells whose disc exceeds the boundary radius
    are marked as out-of-boundary."""
    cells = schemas.read_screening(spec.inputs[0])
    threshold = cells[0]["threshold"]
    fig, ax = _new_axes()
    out_of_boundary = 0
    for cell in cells:
        color = "tab:blue" if cell["is_clutter"] else "tab:red"
        circ = plt.Circle((cell["center"], 0.0), cell["radius"],
                          fill=False, color=color, alpha=0.7)
        ax.add_patch(circ)
        if not cell["is_clutter"]:
            out_of_boundary += 1
            ax.plot(cell["center"], cell["radius"], "rx", markersize=8)
    mean_center = float(np.mean([c["center"] for c in cells]))
    ax.add_patch(plt.Circle((mean_center, 0.0), threshold, fill=False,
                            color="black", linestyle="--", linewidth=1.5))
    ax.set_xlabel("real axis (disc center = snapshot power)")
    ax.set_ylabel("imaginary axis")
    ax.set_aspect("equal", adjustable="datalim")
    ax.autoscale_view()
    return fig, {"cells": len(cells), "out_of_boundary": out_of_boundary,
                 "threshold": threshold}


def _render_convergence(spec: FigureSpec):
    fig, ax = _new_axes()
    count = 0
    for path in spec.inputs:
        for curve in schemas.read_convergence(path):
            ax.plot(curve.x, curve.y, label=curve.estimator)
            count += 1
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective")
    if spec.grid:
        ax.grid(True, alpha=0.4)
    ax.legend(loc="best")
    return fig, {"curves": count}


_RENDERERS = {
    "capon": _render_capon,
    "brauer": _render_brauer,
    "beampattern": _render_curve_family,
    "if_curve": _render_curve_family,
    "scnr_curve": _render_curve_family,
    "power": _render_curve_family,
    "convergence": _render_convergence,
}
