"""Toeplitz Hermitian positive-definite covariance construction per range cell.

A snapshot is fitted with a lattice (reflection-coefficient) model via the
regularized Burg recursion; the autocorrelation sequence is then rebuilt with
the inverse Levinson recursion and laid out as a Hermitian Toeplitz matrix.
Strict |mu| < 1 (enforced by clamping) guarantees positive definiteness.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

# Reflection coefficients at or above this magnitude are clamped (phase kept).
CLAMP_LIMIT = 1.0 - 1e-6


@dataclass
class ReflectionSpectrum:
    """Lattice parameters of one snapshot: power, reflection coefficients."""

    p0: float
    mu: np.ndarray
    prediction_powers: np.ndarray  # P_0 .. P_order
    psi1: float = 0.0
    clamped: bool = False
    cell_index: int | None = None

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=complex)
        self.prediction_powers = np.asarray(self.prediction_powers, dtype=float)
        if self.p0 <= 0:
            raise ValueError("p0 must be positive")
        if np.any(np.abs(self.mu) >= 1.0):
            raise ValueError("|mu| must be < 1")
        if np.any(self.prediction_powers <= 0):
            raise ValueError("prediction powers must be positive")

    @property
    def order(self) -> int:
        return self.mu.size


@dataclass
class ThpdCovariance:
    """Toeplitz Hermitian PD matrix stored by its first autocorrelation column."""

    r: np.ndarray
    cell_index: int | None = None

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=complex)
        if self.r.ndim != 1 or self.r.size < 1:
            raise ValueError("r must be a non-empty vector")
        if not (self.r[0].real > 0 and abs(self.r[0].imag) < 1e-12 * abs(self.r[0].real)):
            raise ValueError("r_0 must be real positive")

    @property
    def dim(self) -> int:
        return self.r.size

    def matrix(self) -> np.ndarray:
        """Dense K x K view with R[i][j] = r_{i-j}, r_{-i} = conj(r_i)."""
        return toeplitz(self.r, self.r.conj())


def burg_reflection(x: np.ndarray, psi1: float = 0.0, order: int | None = None,
                    cell_index: int | None = None) -> ReflectionSpectrum:
    """Regularized Burg recursion on one snapshot.

    Stage n weight nu_k = psi1*(2*pi)^2*(k-n)^2 penalizes high-order AR
    coefficients; psi1 = 0 recovers the classical Burg estimator.
    """
    x = np.asarray(getattr(x, "data", x), dtype=complex).ravel()
    K = x.size
    if order is None:
        order = K - 1
    if order > K - 1 or order < 1:
        raise ValueError("order must be in [1, len(x) - 1]")
    if psi1 < 0:
        raise ValueError("psi1 must be non-negative")

    p0 = float(np.mean(np.abs(x) ** 2))
    if p0 == 0.0:
        raise ValueError("all-zero snapshot: undefined reflection coefficients")

    f = x.copy()
    b = x.copy()
    a = np.zeros(order + 1, dtype=complex)
    a[0] = 1.0
    mu = np.zeros(order, dtype=complex)
    powers = np.empty(order + 1)
    powers[0] = p0
    clamped = False
    four_pi2 = (2.0 * np.pi) ** 2

    for n in range(1, order + 1):
        fw = f[n:]
        bw = b[n - 1:K - 1]
        m = K - n
        num = (2.0 / m) * np.sum(fw * bw.conj())
        den = (1.0 / m) * np.sum(np.abs(fw) ** 2 + np.abs(bw) ** 2)
        if psi1 > 0:
            k = np.arange(n)
            nu = psi1 * four_pi2 * (k - n) ** 2
            num += 2.0 * np.sum(nu[1:] * a[1:n] * a[n - 1:0:-1])
            den += 2.0 * np.sum(nu * np.abs(a[:n]) ** 2)
        mu_n = -num / den
        if abs(mu_n) >= CLAMP_LIMIT:
            mu_n = mu_n * (CLAMP_LIMIT / abs(mu_n)) if abs(mu_n) > 0 else CLAMP_LIMIT
            clamped = True
        mu[n - 1] = mu_n
        # Levinson step on the AR polynomial.
        a_prev = a[:n].copy()
        a[1:n] = a_prev[1:] + mu_n * a_prev[n - 1:0:-1].conj()
        a[n] = mu_n
        # Lattice update of the prediction errors (valid from index n on).
        f_new = fw + mu_n * bw
        b_new = bw + np.conj(mu_n) * fw
        f[n:] = f_new
        b[n:] = b_new
        powers[n] = powers[n - 1] * (1.0 - abs(mu_n) ** 2)

    if clamped:
        warnings.warn("reflection coefficient clamped to |mu| < 1", RuntimeWarning, stacklevel=2)
    return ReflectionSpectrum(p0=p0, mu=mu, prediction_powers=powers, psi1=psi1,
                              clamped=clamped, cell_index=cell_index)


def reconstruct_autocorrelation(spec: ReflectionSpectrum, K: int) -> np.ndarray:
    """Autocorrelation lags r_0..r_{K-1} from (P0, mu) by inverse Levinson.

    Model orders above spec.order use mu = 0, i.e. the AR extension.
    """
    if K < 1:
        raise ValueError("K must be positive")
    mu = np.zeros(K - 1, dtype=complex)
    mu[:min(spec.order, K - 1)] = spec.mu[:K - 1]
    r = np.zeros(K, dtype=complex)
    r[0] = spec.p0
    a = np.zeros(K, dtype=complex)
    a[0] = 1.0
    p = spec.p0
    for n in range(1, K):
        mu_n = mu[n - 1]
        r[n] = -mu_n * p - np.dot(a[1:n], r[n - 1:0:-1])
        a_prev = a[1:n].copy()
        a[1:n] = a_prev + mu_n * a[n - 1:0:-1].conj()
        a[n] = mu_n
        p *= 1.0 - abs(mu_n) ** 2
    return r


def assemble_thpd(r: np.ndarray, cell_index: int | None = None) -> ThpdCovariance:
    """Wraps an autocorrelation vector as a ThpdCovariance."""
    return ThpdCovariance(r=np.asarray(r, dtype=complex), cell_index=cell_index)


def thpd_from_snapshot(x: np.ndarray, psi1: float = 0.01, order: int | None = None,
                       cell_index: int | None = None) -> ThpdCovariance:
    """Snapshot -> reflection coefficients -> Toeplitz Hermitian PD covariance."""
    x = np.asarray(getattr(x, "data", x), dtype=complex).ravel()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        spec = burg_reflection(x, psi1=psi1, order=order, cell_index=cell_index)
    r = reconstruct_autocorrelation(spec, x.size)
    return assemble_thpd(r, cell_index=cell_index)
