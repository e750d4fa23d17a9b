"""Clutter subspace geometry: principal angles, subspace volumes, and
covariance estimation by projected gradient descent on the weighted
volume-cross-correlation objective.

A covariance matrix is mapped to the subspace spanned by its top-s
eigenvectors.  The dissimilarity between two subspaces is the product of the
sines of their principal angles, computed as sqrt(det(I - C^H C)) with
C = U1^H U2; it is 0 for identical subspaces and 1 for orthogonal ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .thpd import ThpdCovariance

ORTHO_TOL = 1e-8
EPS_SING = 1e-12


@dataclass
class GrassmannPoint:
    """An orthonormal basis with the eigenvalues it retained."""

    basis: np.ndarray          # (K, s), orthonormal columns
    eigenvalues: np.ndarray    # length s, positive, descending
    cell_index: int | None = None
    noise_floor: float | None = None  # mean of the discarded eigenvalues

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=complex)
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        s = self.basis.shape[1]
        gram_err = np.linalg.norm(self.basis.conj().T @ self.basis - np.eye(s))
        if gram_err > 1e-10 * max(1.0, np.sqrt(s)):
            raise ValueError("basis columns are not orthonormal")
        if np.any(self.eigenvalues <= 0):
            raise ValueError("eigenvalues must be positive")
        if np.any(np.diff(self.eigenvalues) > 0):
            raise ValueError("eigenvalues must be sorted descending")

    @property
    def subspace_dim(self) -> int:
        return self.basis.shape[1]


@dataclass
class OptimizerConfig:
    step_size: float = 0.1
    max_iterations: int = 200
    tolerance: float = 1e-6
    weights: np.ndarray | None = None  # uniform when None
    subspace_dim: int | None = None
    max_halvings: int = 20

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)
            if np.any(self.weights <= 0):
                raise ValueError("weights must be positive")
            if abs(self.weights.sum() - 1.0) > 1e-12:
                raise ValueError("weights must sum to 1")


@dataclass
class CcmEstimate:
    covariance: np.ndarray
    basis: GrassmannPoint
    objective_trace: np.ndarray
    converged: bool


def _fix_eigvec_phases(U: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    U = U.copy()
    idx = np.argmax(np.abs(U), axis=0)
    for j, i in enumerate(idx):
        z = U[i, j]
        if abs(z) > 0:
            U[:, j] *= np.conj(z) / abs(z)
    return U


def extract_subspace(R: ThpdCovariance | np.ndarray, s: int) -> GrassmannPoint:
    """Top-s eigenvector basis of a Hermitian PD matrix.

    Ties are broken by the original eigensolver order (stable descending sort)
    and the per-column phase is fixed for reproducibility.
    """
    cell = getattr(R, "cell_index", None)
    A = R.matrix() if isinstance(R, ThpdCovariance) else np.asarray(R, dtype=complex)
    K = A.shape[0]
    if not (1 <= s <= K):
        raise ValueError("s must be in [1, K]")
    vals, vecs = np.linalg.eigh(A)
    order = np.argsort(-vals, kind="stable")
    top = order[:s]
    lam = vals[top]
    U = _fix_eigvec_phases(vecs[:, top])
    if np.any(lam <= 0):
        raise ValueError("matrix is not positive definite on the retained subspace")
    rest = vals[order[s:]]
    floor = float(rest.mean()) if rest.size else 0.0
    return GrassmannPoint(basis=U, eigenvalues=lam, cell_index=cell, noise_floor=floor)


def volume(S: np.ndarray, d: int) -> float:
    """Product of the d largest singular values of S; 0 when rank-deficient."""
    S = np.asarray(S)
    if d != S.shape[1]:
        raise ValueError("d must equal the number of columns of S")
    sv = np.linalg.svd(S, compute_uv=False)
    return float(np.prod(sv[:d]))


def _check_basis(U: np.ndarray, name: str) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    s = U.shape[1]
    if np.linalg.norm(U.conj().T @ U - np.eye(s)) > ORTHO_TOL * max(1.0, np.sqrt(s)):
        raise ValueError(f"{name} does not have orthonormal columns")
    return U


def principal_angles(U1: np.ndarray, U2: np.ndarray) -> np.ndarray:
    """Canonical angles in [0, pi/2], sorted ascending."""
    U1 = _check_basis(U1, "U1")
    U2 = _check_basis(U2, "U2")
    if U1.shape[0] != U2.shape[0]:
        raise ValueError("bases must share the row dimension")
    sv = np.linalg.svd(U1.conj().T @ U2, compute_uv=False)
    cos = np.clip(sv, 0.0, 1.0)
    return np.sort(np.arccos(cos))


def vcf(U1: np.ndarray, U2: np.ndarray) -> float:
    """Sine-product subspace dissimilarity via sqrt(det(I - C^H C)), C = U1^H U2."""
    U1 = _check_basis(U1, "U1")
    U2 = _check_basis(U2, "U2")
    if U1.shape[0] != U2.shape[0] or U1.shape[1] != U2.shape[1]:
        raise ValueError("bases must share both dimensions")
    C = U1.conj().T @ U2
    G = np.eye(C.shape[1]) - C.conj().T @ C
    det = np.linalg.det(G).real
    return float(np.sqrt(np.clip(det, 0.0, 1.0)))


def vcf_gradient(U_q: np.ndarray, U: np.ndarray, eps_sing: float = EPS_SING) -> np.ndarray:
    """Euclidean gradient of U -> vcf(U_q, U): -f * P_q U G^{-1}.

    Directional derivative along a perturbation D is Re tr(grad^H D).  Near
    alignment (f < eps_sing) the inverse is Tikhonov-regularized.
    """
    U_q = _check_basis(U_q, "U_q")
    U = _check_basis(U, "U")
    C = U_q.conj().T @ U                      # (s_q, s)
    G = np.eye(C.shape[1]) - C.conj().T @ C
    f = float(np.sqrt(np.clip(np.linalg.det(G).real, 0.0, 1.0)))
    if f < eps_sing:
        G = G + eps_sing * np.eye(G.shape[0])
    G_inv = np.linalg.inv(G)
    return -f * U_q @ (C @ G_inv)


def _qr_retract(Y: np.ndarray) -> np.ndarray:
    """Thin QR with the R diagonal rotated positive for determinism."""
    Q, R = np.linalg.qr(Y)
    d = np.diagonal(R).copy()
    d[np.abs(d) == 0] = 1.0
    phase = d / np.abs(d)
    return Q * phase


def estimate_ccm(points: list[GrassmannPoint], cfg: OptimizerConfig | None = None) -> CcmEstimate:
    """Minimizes the weighted sum of VCF dissimilarities over the clutter points.

    Projected gradient descent with step-halving backtracking and thin-QR
    retraction; initialized at the medoid point.  The covariance is recomposed
    as U Lambda U^H plus a noise-floor diagonal load.
    """
    if not points:
        raise ValueError("need at least one clutter point")
    cfg = cfg or OptimizerConfig()
    K, s = points[0].basis.shape
    for p in points:
        if p.basis.shape != (K, s):
            raise ValueError("all points must share (K, s)")
    Q = len(points)
    w = cfg.weights if cfg.weights is not None else np.full(Q, 1.0 / Q)
    if w.size != Q:
        raise ValueError("weights length must match the number of points")
    bases = [p.basis for p in points]

    def objective(U):
        return float(sum(wq * vcf(Bq, U) for wq, Bq in zip(w, bases)))

    # Medoid initialization: the input point closest (in total VCF) to the rest.
    totals = [sum(vcf(Bq, B) for Bq in bases) for B in bases]
    U = bases[int(np.argmin(totals))].copy()

    f_cur = objective(U)
    trace = [f_cur]
    converged = False
    for _ in range(cfg.max_iterations):
        grad = sum(wq * vcf_gradient(Bq, U) for wq, Bq in zip(w, bases))
        xi = grad - U @ (U.conj().T @ grad)
        step = cfg.step_size
        accepted = False
        for _ in range(cfg.max_halvings + 1):
            U_try = _qr_retract(U - step * xi)
            f_try = objective(U_try)
            if f_try <= f_cur:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        drop = f_cur - f_try
        U, f_cur = U_try, f_try
        trace.append(f_cur)
        if drop <= cfg.tolerance * max(abs(f_cur), 1e-30):
            converged = True
            break

    lam = sum(wq * p.eigenvalues for wq, p in zip(w, points))
    floors = [p.noise_floor for p in points if p.noise_floor is not None and p.noise_floor > 0]
    load = float(np.mean(floors)) if floors else 1e-8 * float(lam.max())
    R = (U * lam) @ U.conj().T + load * np.eye(K)
    R = 0.5 * (R + R.conj().T)
    basis = GrassmannPoint(basis=U, eigenvalues=lam, noise_floor=load)
    return CcmEstimate(covariance=R, basis=basis,
                       objective_trace=np.asarray(trace), converged=converged)
