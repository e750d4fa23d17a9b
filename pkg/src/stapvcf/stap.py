"""STAP filter weights, baseline covariance estimators and evaluation metrics."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .sim import steering_vector
from .thpd import ThpdCovariance

DB_FLOOR = -300.0
COND_WARN = 1e12


@dataclass
class StapWeights:
    """Unit-gain filter weights for one steering direction."""

    w: np.ndarray
    v: np.ndarray
    estimator_name: str = ""

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=complex)
        self.v = np.asarray(self.v, dtype=complex)
        if self.w.shape != self.v.shape:
            raise ValueError("w and v must have the same length")


@dataclass
class MetricCurve:
    abscissa: np.ndarray
    values: np.ndarray
    estimator_name: str
    metric_kind: str

    def __post_init__(self):
        self.abscissa = np.asarray(self.abscissa, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.abscissa.shape != self.values.shape:
            raise ValueError("abscissa and values must have equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("curve values must be finite")


def _solve_pd(R: np.ndarray, B: np.ndarray, name: str = "") -> np.ndarray:
    """Hermitian PD solve with a condition warning; never forms the inverse."""
    R = np.asarray(R, dtype=complex)
    try:
        cf = cho_factor(R)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"covariance from estimator '{name}' is numerically singular") from exc
    d = np.abs(np.diagonal(cf[0]))
    if d.min() > 0 and (d.max() / d.min()) ** 2 > COND_WARN:
        warnings.warn(f"ill-conditioned covariance in estimator '{name}'", RuntimeWarning,
                      stacklevel=2)
    return cho_solve(cf, B)


def stap_weights(R: np.ndarray, v: np.ndarray, estimator_name: str = "") -> StapWeights:
    """w = R^{-1} v / (v^H R^{-1} v); unit gain at the steering direction."""
    v = np.asarray(v, dtype=complex)
    u = _solve_pd(R, v, estimator_name)
    w = u / (v.conj() @ u)
    return StapWeights(w=w, v=v, estimator_name=estimator_name)


def apply_filter(weights: StapWeights, x: np.ndarray) -> complex:
    """Filter output y = w^H x."""
    x = np.asarray(getattr(x, "data", x), dtype=complex)
    if x.shape != weights.w.shape:
        raise ValueError("snapshot length does not match the filter")
    return complex(weights.w.conj() @ x)


def scm(samples) -> np.ndarray:
    """Sample covariance (1/L) sum x x^H."""
    X = _sample_matrix(samples)
    return X.T @ X.conj() / X.shape[0]


def _sample_matrix(samples) -> np.ndarray:
    rows = [np.asarray(getattr(s, "data", s), dtype=complex) for s in samples]
    if not rows:
        raise ValueError("empty sample list")
    return np.stack(rows)


def noise_floor_estimate(S: np.ndarray) -> float:
    """Noise power from the sample covariance eigenvalues.

    Median eigenvalue when positive; with fewer samples than dimensions the
    median is zero, so fall back to the smallest significantly-positive one.
    """
    S = np.asarray(S, dtype=complex)
    eigs = np.linalg.eigvalsh(S)
    # Eigenvalues below the dense-eigensolver roundoff floor are numerical
    # zeros of the rank-deficient sample covariance, not noise.
    tol = max(eigs.max(), 0.0) * S.shape[0] * np.finfo(float).eps
    med = float(np.median(eigs))
    if med > tol:
        return med
    pos = eigs[eigs > tol]
    if pos.size == 0:
        raise ValueError("cannot estimate a noise floor from a zero matrix")
    return float(pos.min())


def lsmi(samples, loading_factor: float = 10.0) -> np.ndarray:
    """Diagonally loaded sample covariance: SCM + loading_factor * noise * I."""
    if loading_factor <= 0:
        raise ValueError("loading_factor must be positive")
    S = scm(samples)
    return S + loading_factor * noise_floor_estimate(S) * np.eye(S.shape[0])


def gip_select(samples, reference: np.ndarray | None = None, keep_fraction: float = 0.8):
    """Keeps the samples with the lowest generalized-inner-product statistic.

    The statistic is x^H R0^{-1} x; the reference R0 defaults to the loaded
    sample covariance of all inputs.  Returns the kept samples in input order.
    """
    if not (0.0 < keep_fraction <= 1.0):
        raise ValueError("keep_fraction must be in (0, 1]")
    X = _sample_matrix(samples)
    L = X.shape[0]
    R0 = lsmi(samples) if reference is None else np.asarray(reference, dtype=complex)
    Y = _solve_pd(R0, X.T, "gip-reference")
    stat = np.einsum("lk,kl->l", X.conj(), Y).real
    keep = max(1, int(round(keep_fraction * L)))
    order = np.argsort(stat, kind="stable")[:keep]
    order = np.sort(order)
    return [samples[i] for i in order]


def euclidean_mean_ccm(matrices: list[ThpdCovariance], weights=None) -> np.ndarray:
    """Weighted arithmetic mean of the covariance matrices (Frobenius barycenter)."""
    if not matrices:
        raise ValueError("empty matrix list")
    Q = len(matrices)
    w = np.full(Q, 1.0 / Q) if weights is None else np.asarray(weights, dtype=float)
    if w.size != Q:
        raise ValueError("weights length must match the number of matrices")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must sum to 1")
    dense = [m.matrix() if isinstance(m, ThpdCovariance) else np.asarray(m, dtype=complex)
             for m in matrices]
    return sum(wq * Rq for wq, Rq in zip(w, dense))


def improvement_factor(R_hat: np.ndarray, R_ideal: np.ndarray, doppler_grid,
                       f_s: float, M: int, N: int, estimator_name: str = "") -> MetricCurve:
    """IF(f_d) in dB with weights recomputed per Doppler from the estimate under test.

    IF = |w^H v|^2 tr(R) / ((w^H R w) (v^H v)) with R the ideal clutter-plus-noise
    covariance, so the ideal estimator attains the maximum at every Doppler.
    """
    doppler_grid = np.asarray(doppler_grid, dtype=float)
    tr = float(np.trace(R_ideal).real)
    vals = np.empty(doppler_grid.size)
    for i, f_d in enumerate(doppler_grid):
        v = steering_vector(f_d, f_s, M, N)
        ww = stap_weights(R_hat, v, estimator_name).w
        num = abs(ww.conj() @ v) ** 2 * tr
        den = (ww.conj() @ R_ideal @ ww).real * (v.conj() @ v).real
        vals[i] = 10.0 * np.log10(max(num / den, 10.0 ** (DB_FLOOR / 10.0)))
    return MetricCurve(abscissa=doppler_grid, values=vals,
                       estimator_name=estimator_name, metric_kind="IF")


def output_scnr(weights: StapWeights, signal: np.ndarray, R_ideal: np.ndarray) -> float:
    """Output signal-to-clutter-plus-noise ratio in dB, floored at -300 dB."""
    s = np.asarray(signal, dtype=complex)
    num = abs(weights.w.conj() @ s) ** 2
    den = (weights.w.conj() @ R_ideal @ weights.w).real
    if num <= 0:
        return DB_FLOOR
    return max(10.0 * np.log10(num / den), DB_FLOOR)


def beampattern_slices(weights: StapWeights, grid, axis: str, fixed_value: float,
                       M: int, N: int) -> MetricCurve:
    """|w^H v|^2 in dB along a fixed-spatial ('doppler') or fixed-Doppler
    ('spatial') slice of the space-time beampattern."""
    grid = np.asarray(grid, dtype=float)
    vals = np.empty(grid.size)
    for i, f in enumerate(grid):
        if axis == "doppler":
            v = steering_vector(f, fixed_value, M, N)
        elif axis == "spatial":
            v = steering_vector(fixed_value, f, M, N)
        else:
            raise ValueError("axis must be 'doppler' or 'spatial'")
        g = abs(weights.w.conj() @ v) ** 2
        vals[i] = max(10.0 * np.log10(g) if g > 0 else DB_FLOOR, DB_FLOOR)
    kind = "beampattern-doppler" if axis == "doppler" else "beampattern-spatial"
    return MetricCurve(abscissa=grid, values=vals,
                       estimator_name=weights.estimator_name, metric_kind=kind)
