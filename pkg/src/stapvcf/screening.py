"""Training-cell screening via Brauer-disc eigenvalue inclusion radii.

For a Hermitian Toeplitz matrix with constant diagonal r_0, every eigenvalue
lies inside |z - r_0| <= D with D = max_{i != j} sqrt(a_i a_j) built from the
off-diagonal absolute row sums a_i.  Cells whose radius exceeds the cluster
boundary T_B = (AM/GM of centers) * rho are flagged as target-contaminated;
rho is the minimum radius over the batch.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .thpd import ThpdCovariance

# Radii within this relative distance of T_B classify as clutter (tie-break).
TIE_BREAK_REL = 1e-12


@dataclass
class BrauerSummary:
    cell_index: int | None
    center: float
    radius: float
    is_clutter: bool
    threshold_used: float
    rho: float


@dataclass
class ScreeningResult:
    summaries: list[BrauerSummary]
    clutter_cells: list[int]
    target_cells: list[int]


def brauer_radius(R: np.ndarray) -> tuple[float, float]:
    """Disc center r_0 and radius D = sqrt of the two largest off-diagonal row sums."""
    R = np.asarray(R)
    n = R.shape[0]
    if R.ndim != 2 or R.shape[1] != n or n < 2:
        raise ValueError("need a square matrix of dimension >= 2")
    absR = np.abs(R)
    a = absR.sum(axis=1) - np.abs(np.diagonal(R))
    top2 = np.partition(a, n - 2)[n - 2:]
    D = float(np.sqrt(top2[0] * top2[1]))
    center = float(R[0, 0].real)
    return center, D


def brauer_threshold(centers, rho: float) -> float:
    """Cluster boundary: arithmetic/geometric mean ratio of the centers times rho."""
    centers = np.asarray(centers, dtype=float)
    if np.any(centers <= 0):
        raise ValueError("all centers must be positive")
    if rho <= 0:
        raise ValueError("rho must be positive")
    am = centers.mean()
    gm = float(np.exp(np.mean(np.log(centers))))
    return am / gm * rho


def screen(matrices: list[ThpdCovariance]) -> ScreeningResult:
    """Classifies each matrix as clutter-plus-noise or target-contaminated."""
    if len(matrices) < 2:
        raise ValueError("need at least two matrices to screen")
    centers = []
    radii = []
    for m in matrices:
        c, d = brauer_radius(m.matrix())
        centers.append(c)
        radii.append(d)
    rho = min(radii)
    # Degenerate batch with a zero-radius (diagonal) matrix: threshold collapses.
    t_b = brauer_threshold(centers, rho) if rho > 0 else 0.0
    summaries = []
    clutter, targets = [], []
    for m, c, d in zip(matrices, centers, radii):
        is_clutter = d <= t_b * (1.0 + TIE_BREAK_REL)
        idx = m.cell_index
        summaries.append(BrauerSummary(cell_index=idx, center=c, radius=d,
                                       is_clutter=is_clutter, threshold_used=t_b, rho=rho))
        (clutter if is_clutter else targets).append(idx)
    return ScreeningResult(summaries=summaries, clutter_cells=clutter, target_cells=targets)
